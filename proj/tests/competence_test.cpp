#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "epicon/competence.hpp"
#include "oracles.hpp"

using epicon::CompetenceDistribution;
using epicon::CompetenceProfile;
using epicon::ProfileSpec;

namespace {

std::vector<CompetenceDistribution> allFamilies() {
  return {
      CompetenceDistribution::uniform(0.0, 1.0),
      CompetenceDistribution::uniform(0.1, 0.9),
      CompetenceDistribution::beta(2.0, 2.0),
      CompetenceDistribution::beta(0.5, 0.5),
      CompetenceDistribution::beta(5.0, 1.5),
      CompetenceDistribution::truncatedNormal(0.5, 10.0),
      CompetenceDistribution::truncatedNormal(0.7, 0.2),
      CompetenceDistribution::truncatedNormal(-0.3, 0.8),
  };
}

double ksDistance(const CompetenceDistribution& dist,
                  std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = dist.cdf(sample[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("distribution densities normalize and match moments", "[competence]") {
  // Bounded densities only; the midpoint oracle cannot handle the
  // integrable endpoint singularities of beta shapes below 1.
  const std::vector<CompetenceDistribution> smooth = {
      CompetenceDistribution::uniform(0.1, 0.9),
      CompetenceDistribution::beta(2.0, 2.0),
      CompetenceDistribution::beta(5.0, 1.5),
      CompetenceDistribution::truncatedNormal(0.5, 10.0),
      CompetenceDistribution::truncatedNormal(0.7, 0.2),
  };
  for (const auto& dist : smooth) {
    CAPTURE(dist.spec());
    const double lo = dist.supportLo();
    const double hi = dist.supportHi();
    const double total =
        oracle::integrate([&](double x) { return dist.pdf(x); }, lo, hi, 1e-11);
    CHECK(std::fabs(total - 1.0) < 1e-8);

    const auto stats = dist.stats();
    const double mean = oracle::integrate(
        [&](double x) { return x * dist.pdf(x); }, lo, hi, 1e-11);
    const double p1mp = oracle::integrate(
        [&](double x) { return x * (1.0 - x) * dist.pdf(x); }, lo, hi, 1e-11);
    CHECK(std::fabs(stats.mean - mean) < 1e-8);
    CHECK(std::fabs(stats.meanP1mP - p1mp) < 1e-8);
  }
}

TEST_CASE("closed-form moments at hand-checked points", "[competence]") {
  const auto u01 = CompetenceDistribution::uniform(0.0, 1.0).stats();
  CHECK(u01.mean == Catch::Approx(0.5).margin(1e-15));
  CHECK(u01.meanP1mP == Catch::Approx(1.0 / 6.0).margin(1e-15));

  const double eps = 0.01;
  const auto shifted = CompetenceDistribution::uniform(2.0 * eps, 1.0).stats();
  CHECK(shifted.mean == Catch::Approx(0.5 + eps).margin(1e-15));

  const auto b22 = CompetenceDistribution::beta(2.0, 2.0).stats();
  CHECK(b22.mean == Catch::Approx(0.5).margin(1e-15));
  CHECK(b22.meanP1mP == Catch::Approx(0.2).margin(1e-15));
}

TEST_CASE("cdf and quantile are mutual inverses", "[competence]") {
  for (const auto& dist : allFamilies()) {
    CAPTURE(dist.spec());
    for (int i = 1; i < 1000; ++i) {
      const double u = static_cast<double>(i) / 1000.0;
      const double x = dist.quantile(u);
      REQUIRE(x >= dist.supportLo());
      REQUIRE(x <= dist.supportHi());
      REQUIRE(std::fabs(dist.cdf(x) - u) < 1e-9);
    }
    // cdf is non-decreasing across the support
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = static_cast<double>(i) / 200.0;
      const double f = dist.cdf(x);
      REQUIRE(f >= prev);
      prev = f;
    }
    CHECK(dist.quantile(0.0) == dist.supportLo());
    CHECK(dist.quantile(1.0) == dist.supportHi());
  }
}

TEST_CASE("sampled profiles are sorted, contained, and seed-stable",
          "[competence]") {
  for (const auto& dist : allFamilies()) {
    CAPTURE(dist.spec());
    for (std::uint64_t seed : {1ull, 77ull, 424242ull}) {
      const auto prof = epicon::sampleProfile(dist, 257, seed);
      REQUIRE(prof.size() == 257);
      for (std::size_t i = 0; i < prof.size(); ++i) {
        REQUIRE(prof.probs[i] >= dist.supportLo());
        REQUIRE(prof.probs[i] <= dist.supportHi());
        if (i > 0) REQUIRE(prof.probs[i - 1] >= prof.probs[i]);
      }
      const auto again = epicon::sampleProfile(dist, 257, seed);
      REQUIRE(prof.probs == again.probs);
    }
  }

  const auto narrow =
      epicon::sampleProfile(CompetenceDistribution::uniform(0.5, 0.5 + 1e-9),
                            3, 7);
  for (double p : narrow.probs) {
    CHECK(p >= 0.5);
    CHECK(p <= 0.5 + 1e-9);
  }

  // law of large numbers sanity check on the sample mean
  const auto wide =
      epicon::sampleProfile(CompetenceDistribution::uniform(0.1, 0.9), 10000, 5);
  double mean = 0.0;
  for (double p : wide.probs) mean += p;
  mean /= static_cast<double>(wide.size());
  CHECK(std::fabs(mean - 0.5) < 0.02);

  CHECK_THROWS_AS(
      epicon::sampleProfile(CompetenceDistribution::uniform(0.0, 1.0), 0, 1),
      std::invalid_argument);
}

TEST_CASE("empirical cdf of large samples tracks the analytic cdf",
          "[competence]") {
  for (const auto& dist : allFamilies()) {
    CAPTURE(dist.spec());
    const auto prof = epicon::sampleProfile(dist, 100000, 2024);
    CHECK(ksDistance(dist, prof.probs) <= 0.01);
  }
}

TEST_CASE("expected uniform profile is the exact order-statistic mean",
          "[competence]") {
  const auto one = epicon::expectedUniformProfile(1);
  REQUIRE(one.probs == std::vector<double>{0.5});

  const auto three = epicon::expectedUniformProfile(3);
  REQUIRE(three.probs == std::vector<double>{0.75, 0.5, 0.25});

  const auto nine = epicon::expectedUniformProfile(9);
  CHECK(nine.probs.front() == 0.9);
  CHECK(nine.probs.back() == Catch::Approx(0.1).margin(1e-15));

  const auto big = epicon::expectedUniformProfile(1234);
  for (std::size_t i = 1; i <= big.size(); ++i) {
    REQUIRE(big.probs[i - 1] ==
            static_cast<double>(1234 + 1 - i) / static_cast<double>(1235));
  }

  CHECK_THROWS_AS(epicon::expectedUniformProfile(0), std::invalid_argument);
}

TEST_CASE("quantile Lipschitz constant", "[competence]") {
  const auto u19 =
      CompetenceDistribution::uniform(0.1, 0.9).quantileLipschitzConstant();
  REQUIRE(u19.has_value());
  CHECK(*u19 == Catch::Approx(0.8).margin(1e-12));

  const auto u01 =
      CompetenceDistribution::uniform(0.0, 1.0).quantileLipschitzConstant();
  REQUIRE(u01.has_value());
  CHECK(*u01 == Catch::Approx(1.0).margin(1e-12));

  const auto flat = CompetenceDistribution::truncatedNormal(0.5, 10.0);
  const auto m = flat.quantileLipschitzConstant();
  REQUIRE(m.has_value());
  CHECK(std::fabs(*m - 1.0) < 0.05);
  // cross-check against a direct scan of the density
  double minPdf = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100000; ++i) {
    minPdf = std::min(minPdf, flat.pdf(static_cast<double>(i) / 100000.0));
  }
  CHECK(*m == Catch::Approx(1.0 / minPdf).epsilon(1e-6));

  // density touches zero at both endpoints: quantile is not Lipschitz
  CHECK_FALSE(CompetenceDistribution::beta(2.0, 2.0)
                  .quantileLipschitzConstant()
                  .has_value());
}

TEST_CASE("dkw band check", "[competence]") {
  const auto u = CompetenceDistribution::uniform(0.0, 1.0);

  const auto any = epicon::sampleProfile(u, 50, 3);
  CHECK(epicon::dkwBandCheck(u, any, 1.0));

  CompetenceProfile bad;
  bad.probs = {0.95, 0.5, 0.3};
  const auto narrow = CompetenceDistribution::uniform(0.1, 0.9);
  CHECK_FALSE(epicon::dkwBandCheck(narrow, bad, 0.1));

  CHECK_THROWS_AS(epicon::dkwBandCheck(u, bad, 0.0), std::invalid_argument);

  // band holds at eps = sqrt(log n / (2n)) for nearly every seed
  const std::size_t n = 1000;
  const double eps = std::sqrt(std::log(static_cast<double>(n)) /
                               (2.0 * static_cast<double>(n)));
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto prof = epicon::sampleProfile(u, n, 9000 + seed);
    if (epicon::dkwBandCheck(u, prof, eps)) ++hits;
  }
  CHECK(hits >= 499);
}

TEST_CASE("distribution spec grammar round-trips", "[competence]") {
  for (const char* text : {"uniform:0.1,0.9", "beta:2,2", "beta:0.5,3.25",
                           "truncnorm:0.5,10", "truncnorm:-0.3,0.8"}) {
    const auto dist = CompetenceDistribution::parse(text);
    CHECK(dist.spec() == text);
    const auto again = CompetenceDistribution::parse(dist.spec());
    CHECK(again.spec() == dist.spec());
  }

  CHECK_THROWS_AS(CompetenceDistribution::parse("uniform:0.9,0.1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::parse("uniform:-0.1,0.5"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::parse("beta:0,1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::parse("gamma:1,2"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::parse("truncnorm:0.5"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::parse("uniform:0.1,0.9,0.5"),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::parse("beta:nope,2"),
                  std::invalid_argument);

  const auto exp = ProfileSpec::parse("expuniform");
  CHECK(exp.expectedUniform());
  CHECK(exp.spec() == "expuniform");
  const auto prof = exp.materialize(9, 1);
  CHECK(prof.probs == epicon::expectedUniformProfile(9).probs);

  const auto sampled = ProfileSpec::parse("uniform:0.1,0.9");
  CHECK_FALSE(sampled.expectedUniform());
  CHECK(sampled.materialize(100, 42).probs ==
        epicon::sampleProfile(CompetenceDistribution::parse("uniform:0.1,0.9"),
                              100, 42)
            .probs);
}

TEST_CASE("constructor validation", "[competence]") {
  CHECK_THROWS_AS(CompetenceDistribution::uniform(0.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::uniform(0.0, 1.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::beta(-1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompetenceDistribution::truncatedNormal(0.5, 0.0),
                  std::invalid_argument);
  // all mass far outside [0, 1]
  CHECK_THROWS_AS(CompetenceDistribution::truncatedNormal(50.0, 0.5),
                  std::invalid_argument);
  const auto d = CompetenceDistribution::uniform(0.0, 1.0);
  CHECK_THROWS_AS(d.quantile(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(d.quantile(1.5), std::invalid_argument);
}
