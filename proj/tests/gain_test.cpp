#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "epicon/gain.hpp"
#include "oracles.hpp"

using epicon::CompetenceDistribution;
using epicon::CompetenceProfile;
using epicon::ConditionVerdict;
using epicon::EpsRule;
using epicon::GainEstimate;
using Method = epicon::GainEstimate::Method;
using Sign = epicon::ConditionVerdict::Sign;

TEST_CASE("exact gain at hand-checked profiles", "[gain]") {
  const CompetenceProfile dictator{{1.0, 0.5, 0.5}};
  const auto g1 = epicon::gainExact(dictator, 1);
  CHECK(g1.value == Catch::Approx(0.25).margin(1e-15));
  CHECK(g1.method == Method::kExactConditional);
  CHECK(g1.trials == 0);
  CHECK(g1.ci95Halfwidth == 0.0);

  const CompetenceProfile five{{0.6, 0.6, 0.6, 0.6, 0.6}};
  CHECK(epicon::gainExact(five, 1).value ==
        Catch::Approx(0.6 - 0.68256).margin(1e-14));
  CHECK(epicon::gainExact(five, 1).value ==
        Catch::Approx(oracle::enumeratedMajorityProb(five.top(1)) -
                      oracle::enumeratedMajorityProb(five.span()))
            .margin(1e-14));

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> probs(17);
    for (auto& p : probs) p = unif(gen);
    std::sort(probs.begin(), probs.end(), std::greater<>());
    const CompetenceProfile prof{probs};
    CHECK(epicon::gainExact(prof, prof.size()).value == 0.0);
  }

  CHECK_THROWS_AS(epicon::gainExact(five, 0), std::invalid_argument);
  CHECK_THROWS_AS(epicon::gainExact(five, 6), std::invalid_argument);
}

TEST_CASE("monte carlo gain near-perfect electorate", "[gain]") {
  const auto dist = CompetenceDistribution::uniform(0.99, 1.0);
  for (const auto mode : {Method::kExactConditional, Method::kVoteSampling}) {
    const auto est = epicon::gainMonteCarlo(dist, 101, 1, 400, 11, mode);
    CAPTURE(epicon::methodName(mode));
    CHECK(std::fabs(est.value) <= 0.02);
    CHECK(est.trials == 400);
    CHECK(est.method == mode);
  }
}

TEST_CASE("monte carlo gain is seed-deterministic", "[gain]") {
  const auto dist = CompetenceDistribution::uniform(0.2, 0.8);
  const auto a =
      epicon::gainMonteCarloDetailed(dist, 31, 5, 200, 77, Method::kVoteSampling);
  const auto b =
      epicon::gainMonteCarloDetailed(dist, 31, 5, 200, 77, Method::kVoteSampling);
  CHECK(a.gain.value == b.gain.value);
  CHECK(a.gain.ci95Halfwidth == b.gain.ci95Halfwidth);
  CHECK(a.repAcc == b.repAcc);
  CHECK(a.directAcc == b.directAcc);

  const auto c =
      epicon::gainMonteCarloDetailed(dist, 31, 5, 200, 78, Method::kVoteSampling);
  CHECK(a.gain.value != c.gain.value);

  // paired mean decomposes into the two accuracy means
  CHECK(a.gain.value ==
        Catch::Approx(a.repAcc - a.directAcc).margin(1e-12));

  CHECK_THROWS_AS(
      epicon::gainMonteCarlo(dist, 10, 11, 10, 1, Method::kExactConditional),
      std::invalid_argument);
  CHECK_THROWS_AS(
      epicon::gainMonteCarlo(dist, 10, 5, 0, 1, Method::kExactConditional),
      std::invalid_argument);
}

TEST_CASE("estimation modes agree and converge", "[gain][slow]") {
  const auto dist = CompetenceDistribution::uniform(0.0, 1.0);

  // long-run reference for the same estimand
  const auto ref = epicon::gainMonteCarlo(dist, 15, 3, 10000000, 900,
                                          Method::kExactConditional);
  const auto exact = epicon::gainMonteCarlo(dist, 15, 3, 100000, 901,
                                            Method::kExactConditional);
  const auto votes = epicon::gainMonteCarlo(dist, 15, 3, 100000, 902,
                                            Method::kVoteSampling);

  const auto se = [](const GainEstimate& e) { return e.ci95Halfwidth / 1.96; };
  CHECK(std::fabs(exact.value - ref.value) <=
        3.0 * std::hypot(se(exact), se(ref)));
  CHECK(std::fabs(votes.value - exact.value) <=
        3.0 * std::hypot(se(votes), se(exact)));
  // vote sampling carries strictly more noise per trial
  CHECK(votes.ci95Halfwidth > 2.0 * exact.ci95Halfwidth);

  // CI calibration against the long-run reference
  int covered = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto est = epicon::gainMonteCarlo(dist, 15, 3, 2000, 1000 + rep,
                                            Method::kExactConditional);
    if (std::fabs(est.value - ref.value) <= est.ci95Halfwidth) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("eps rules evaluate and round-trip", "[gain]") {
  const auto sqrtlog = EpsRule::parse("sqrtlog:1");
  CHECK(sqrtlog.value(1000) ==
        Catch::Approx(std::sqrt(std::log(1000.0) / 1000.0)).margin(1e-15));
  CHECK(sqrtlog.spec() == "sqrtlog:1");

  const auto sqrtloglog = EpsRule::parse("sqrtloglog:0.5");
  CHECK(sqrtloglog.value(1000) ==
        Catch::Approx(0.5 * std::sqrt(std::log(std::log(1000.0)) / 1000.0))
            .margin(1e-15));
  CHECK(sqrtloglog.value(2) == 0.0);  // inner log clamps at zero

  const auto dkw = EpsRule::parse("dkw");
  CHECK(dkw.value(1000) ==
        Catch::Approx(std::sqrt(std::log(1000.0) / 2000.0)).margin(1e-15));
  CHECK(dkw.spec() == "dkw");

  CHECK(EpsRule::parse("const:0.02").value(5) == 0.02);
  CHECK(EpsRule::parse("0.02").value(123456) == 0.02);
  CHECK(EpsRule::parse("0.02").spec() == "const:0.02");

  CHECK_THROWS_AS(EpsRule::parse("cube:1"), std::invalid_argument);
  CHECK_THROWS_AS(EpsRule::parse("sqrtlog:abc"), std::invalid_argument);
  CHECK_THROWS_AS(EpsRule::parse(""), std::invalid_argument);
}

TEST_CASE("congress size from the exponent rule", "[gain]") {
  CHECK(epicon::kFromExponent(10000, 0.36) == 28);
  CHECK(epicon::kFromExponent(100, 0.5) == 10);
  CHECK(epicon::kFromExponent(1, 0.36) == 1);
  CHECK(epicon::kFromExponent(2, 0.1) == 1);
  CHECK_THROWS_AS(epicon::kFromExponent(100, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(epicon::kFromExponent(100, 1.0), std::invalid_argument);
}

TEST_CASE("experiment runner", "[gain]") {
  epicon::ExperimentConfig config;
  config.nGrid = {15};
  config.trials = 1;
  config.seed = 5;
  config.epsRule = EpsRule{EpsRule::Kind::kConst, 0.0};
  config.mode = Method::kExactConditional;

  const auto rows = epicon::runExperiment(config);
  REQUIRE(rows.size() == 1);
  const auto& row = rows[0];
  CHECK(row.n == 15);
  CHECK(row.epsN == 0.0);
  CHECK(row.k == epicon::kFromExponent(15, 0.36));

  // one exact-conditional trial is literally gain_exact on that profile
  epicon::Rng rng = epicon::Rng::substream(5, 15, 0);
  const auto prof = epicon::sampleProfile(
      CompetenceDistribution::uniform(0.4, 0.6), 15, rng);
  const auto direct = epicon::gainExact(prof, row.k);
  CHECK(row.gain == direct.value);
  CHECK(row.gainCi == 0.0);
  CHECK(row.directCi == 0.0);

  // byte-for-byte determinism across reruns, and progress reporting
  epicon::ExperimentConfig wider = config;
  wider.nGrid = {15, 40, 90};
  wider.trials = 50;
  wider.epsRule = EpsRule::parse("sqrtlog:0.2");
  wider.mode = Method::kVoteSampling;
  std::ostringstream progress;
  const auto first = epicon::runExperiment(wider, &progress);
  const auto second = epicon::runExperiment(wider);
  REQUIRE(first.size() == 3);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].gain == second[i].gain);
    CHECK(first[i].repAcc == second[i].repAcc);
    CHECK(first[i].directAcc == second[i].directAcc);
    CHECK(first[i].directCi == second[i].directCi);
    CHECK(first[i].repCi == second[i].repCi);
    CHECK(std::isfinite(first[i].gain));
  }
  CHECK(progress.str().find("n=15") != std::string::npos);
  CHECK(progress.str().find("n=90") != std::string::npos);

  epicon::ExperimentConfig bad = config;
  bad.nGrid = {};
  CHECK_THROWS_AS(epicon::runExperiment(bad), std::invalid_argument);
  bad = config;
  bad.nGrid = {20, 10};
  CHECK_THROWS_AS(epicon::runExperiment(bad), std::invalid_argument);
  bad = config;
  bad.r = 1.5;
  CHECK_THROWS_AS(epicon::runExperiment(bad), std::invalid_argument);
  bad = config;
  bad.trials = 0;
  CHECK_THROWS_AS(epicon::runExperiment(bad), std::invalid_argument);
  bad = config;
  bad.epsRule = EpsRule{EpsRule::Kind::kConst, 0.3};  // lower edge passes 0.6
  CHECK_THROWS_AS(epicon::runExperiment(bad), std::invalid_argument);
}

TEST_CASE("dictatorship condition checker", "[gain]") {
  using Family = epicon::DictatorshipFamily;

  const auto pos = epicon::dictatorshipCondition(Family::kUniform, 0.3, 0.0,
                                                 10000);
  CHECK(pos.predictedSign == Sign::kPositive);
  CHECK(pos.theorem == ConditionVerdict::Theorem::kDictatorshipPositive);
  CHECK(pos.allSatisfied());
  bool sawCap = false;
  for (const auto& h : pos.hypotheses) {
    if (h.name == "a_below_variance_cap") {
      sawCap = true;
      CHECK(h.lhs == 0.3);
      CHECK(h.rhs == Catch::Approx(0.4118).margin(2e-3));
    }
  }
  CHECK(sawCap);

  const auto neg = epicon::dictatorshipCondition(Family::kUniform, 1.0, 0.0,
                                                 10000);
  CHECK(neg.predictedSign == Sign::kNegative);
  CHECK(neg.theorem == ConditionVerdict::Theorem::kDictatorshipNegative);
  CHECK(neg.allSatisfied());

  const auto gap = epicon::dictatorshipCondition(Family::kUniform, 0.5, 0.0,
                                                 10000);
  CHECK(gap.predictedSign == Sign::kNotApplicable);
  CHECK_FALSE(gap.allSatisfied());

  const auto betaPos = epicon::dictatorshipCondition(Family::kBeta, 0.3, 2.0,
                                                     10000);
  CHECK(betaPos.predictedSign == Sign::kPositive);

  // a spiking beta density at 1 has no constant ceiling: negative branch
  // cannot fire even for large a
  const auto spiky = epicon::dictatorshipCondition(Family::kBeta, 1.0, 0.8,
                                                   10000);
  CHECK(spiky.predictedSign == Sign::kNotApplicable);

  // the verdict invariant, across a sweep of a
  for (double a = 0.05; a < 1.3; a += 0.05) {
    const auto v = epicon::dictatorshipCondition(Family::kUniform, a, 0.0,
                                                 50000);
    CHECK((v.predictedSign != Sign::kNotApplicable) == v.allSatisfied());
  }
}

TEST_CASE("dictatorship preset families pin the mean", "[gain]") {
  const auto uni = epicon::dictatorshipUniformDist(0.3, 10000);
  const double t = epicon::meanShift(0.3, 10000);
  CHECK(uni.stats().mean == Catch::Approx(0.5 + t).margin(1e-14));

  const auto beta = epicon::dictatorshipBetaDist(0.7, 3.0, 10000);
  const double t7 = epicon::meanShift(0.7, 10000);
  CHECK(beta.stats().mean == Catch::Approx(0.5 + t7).margin(1e-14));

  // bias too large to fit the family
  CHECK_THROWS_AS(epicon::dictatorshipUniformDist(3.0, 10),
                  std::invalid_argument);
}

TEST_CASE("dictatorship predictions match exact gains in sample",
          "[gain][slow]") {
  using Family = epicon::DictatorshipFamily;
  const std::size_t n = 10000;

  for (const double a : {0.3, 1.0}) {
    const auto verdict = epicon::dictatorshipCondition(Family::kUniform, a,
                                                       0.0, n);
    REQUIRE(verdict.predictedSign != Sign::kNotApplicable);
    const auto dist = epicon::dictatorshipUniformDist(a, n);
    int agree = 0;
    const int draws = 24;
    for (int d = 0; d < draws; ++d) {
      epicon::Rng rng =
          epicon::Rng::substream(321, n, static_cast<std::uint64_t>(d));
      const auto prof = epicon::sampleProfile(dist, n, rng);
      const double g = epicon::gainExact(prof, 1).value;
      const bool positive = g > 0.0;
      if (positive == (verdict.predictedSign == Sign::kPositive)) ++agree;
    }
    CAPTURE(a);
    CHECK(agree >= (draws * 4) / 5);
  }
}

TEST_CASE("general-k condition checker", "[gain]") {
  epicon::GeneralKParams tn;
  tn.family = epicon::GeneralKParams::Family::kTruncatedNormal;
  tn.a = 0.3;
  tn.alpha = 0.5;
  tn.r = 0.36;
  tn.sigma0 = std::sqrt(2.0);
  const auto pos = epicon::generalKCondition(tn, 10000);
  CHECK(pos.theorem == ConditionVerdict::Theorem::kGeneralKPositive);
  CHECK(pos.predictedSign == Sign::kPositive);
  CHECK(pos.allSatisfied());

  epicon::GeneralKParams tnWeak = tn;
  tnWeak.sigma0 = std::sqrt(0.05);
  const auto weak = epicon::generalKCondition(tnWeak, 10000);
  CHECK(weak.predictedSign == Sign::kNotApplicable);

  epicon::GeneralKParams bt;
  bt.family = epicon::GeneralKParams::Family::kBeta;
  bt.a = 0.3;
  bt.alpha = 0.4;
  bt.r = 0.36;
  bt.gamma = 7.0;
  const auto neg = epicon::generalKCondition(bt, 10000);
  CHECK(neg.theorem == ConditionVerdict::Theorem::kGeneralKNegative);
  CHECK(neg.predictedSign == Sign::kNegative);
  CHECK(neg.allSatisfied());

  epicon::GeneralKParams btWide = bt;
  btWide.alpha = 0.55;  // negative branch requires alpha < 1/2
  CHECK(epicon::generalKCondition(btWide, 10000).predictedSign ==
        Sign::kNotApplicable);

  epicon::GeneralKParams btThin = bt;
  btThin.gamma = 5.0;  // below the gamma threshold of about 6.34
  CHECK(epicon::generalKCondition(btThin, 10000).predictedSign ==
        Sign::kNotApplicable);

  epicon::GeneralKParams btBad = bt;
  btBad.r = 1.2;
  CHECK_THROWS_AS(epicon::generalKCondition(btBad, 10000),
                  std::invalid_argument);
}

TEST_CASE("general-k preset families pin the mean", "[gain]") {
  const std::size_t n = 10000;
  const std::size_t k = epicon::kFromExponent(n, 0.36);
  const double t = epicon::meanShift(0.3, n);

  const auto tn = epicon::generalKTruncNormDist(0.3, std::sqrt(2.0), k, n);
  CHECK(tn.stats().mean == Catch::Approx(0.5 + t).margin(1e-9));
  // quadrature cross-check of the anchored mean
  const double quadMean = oracle::integrate(
      [&](double x) { return x * tn.pdf(x); }, 0.0, 1.0, 1e-11);
  CHECK(quadMean == Catch::Approx(0.5 + t).margin(1e-7));

  const auto bt = epicon::generalKBetaDist(0.3, 7.0, k, n);
  CHECK(bt.stats().mean == Catch::Approx(0.5 + t).margin(1e-12));
  CHECK(bt.paramB() == Catch::Approx(7.0 * static_cast<double>(k)).margin(1e-12));
}
