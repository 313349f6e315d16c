#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "epicon/competence.hpp"
#include "epicon/numerics.hpp"
#include "epicon/poisson_binomial.hpp"
#include "epicon/rng.hpp"

// Gain of a top-k congress over the full electorate: exact evaluation on a
// fixed profile, seeded Monte Carlo over sampled profiles, experiment grids,
// and checkers for the sufficient conditions that predict the sign of the
// gain under the preset competence families.

namespace epicon {

struct GainEstimate {
  enum class Method { kExactConditional, kVoteSampling };

  double value = 0.0;
  Method method = Method::kExactConditional;
  std::uint64_t trials = 0;  // 0 when evaluated exactly on a fixed profile
  double ci95Halfwidth = 0.0;
};

inline const char* methodName(GainEstimate::Method m) {
  return m == GainEstimate::Method::kExactConditional ? "exact_conditional"
                                                      : "vote_sampling";
}

// majority_prob(top k) - majority_prob(all n), both exact given the profile.
inline GainEstimate gainExact(const CompetenceProfile& profile, std::size_t k) {
  const std::size_t n = profile.size();
  if (k < 1 || k > n) {
    throw std::invalid_argument("gainExact: requires 1 <= k <= n");
  }
  GainEstimate out;
  out.value = majorityProb(profile.top(k)) - majorityProb(profile.span());
  return out;
}

struct MonteCarloGainResult {
  GainEstimate gain;      // paired difference, trial by trial
  double repAcc = 0.0;    // congress accuracy estimate
  double repCi = 0.0;
  double directAcc = 0.0;  // full-electorate accuracy estimate
  double directCi = 0.0;
};

namespace detail {

class MeanAccumulator {
 public:
  void add(double x) {
    ++count_;
    sum_ += x;
    sumSq_ += x * x;
  }
  double mean() const { return sum_ / static_cast<double>(count_); }
  double ci95() const {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    double var = (sumSq_ - sum_ * sum_ / n) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    return 1.96 * std::sqrt(var / n);
  }

 private:
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
  double sumSq_ = 0.0;
};

}  // namespace detail

// Seeded Monte Carlo over freshly sampled profiles. exact_conditional scores
// each profile by its exact conditional correctness probabilities;
// vote_sampling draws one vote vector per trial and scores both majorities
// on it (higher variance, same expectation). Each trial runs on the
// substream (seed, n, trial), so results are independent of evaluation
// order and of other grid points sharing the seed.
inline MonteCarloGainResult gainMonteCarloDetailed(
    const CompetenceDistribution& dist, std::size_t n, std::size_t k,
    std::uint64_t trials, std::uint64_t seed, GainEstimate::Method mode) {
  if (n < 1 || k < 1 || k > n) {
    throw std::invalid_argument("gainMonteCarlo: requires 1 <= k <= n");
  }
  if (trials < 1) {
    throw std::invalid_argument("gainMonteCarlo: requires trials >= 1");
  }

  detail::MeanAccumulator rep;
  detail::MeanAccumulator dir;
  detail::MeanAccumulator gain;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(n), t);
    const CompetenceProfile prof = sampleProfile(dist, n, rng);
    double r;
    double d;
    if (mode == GainEstimate::Method::kExactConditional) {
      r = majorityProb(prof.top(k));
      d = majorityProb(prof.span());
    } else {
      // one shared vote vector; the congress tally is a prefix of the full
      // tally because the profile is sorted
      std::size_t votesTop = 0;
      std::size_t votesAll = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.nextUnit() < prof.probs[i]) {
          ++votesAll;
          if (i < k) ++votesTop;
        }
      }
      r = votesTop * 2 > k ? 1.0 : 0.0;
      d = votesAll * 2 > n ? 1.0 : 0.0;
    }
    rep.add(r);
    dir.add(d);
    gain.add(r - d);
  }

  MonteCarloGainResult out;
  out.gain.value = gain.mean();
  out.gain.method = mode;
  out.gain.trials = trials;
  out.gain.ci95Halfwidth = gain.ci95();
  out.repAcc = rep.mean();
  out.repCi = rep.ci95();
  out.directAcc = dir.mean();
  out.directCi = dir.ci95();
  return out;
}

inline GainEstimate gainMonteCarlo(const CompetenceDistribution& dist,
                                   std::size_t n, std::size_t k,
                                   std::uint64_t trials, std::uint64_t seed,
                                   GainEstimate::Method mode) {
  return gainMonteCarloDetailed(dist, n, k, trials, seed, mode).gain;
}

// Congress size from the power law k = n^r, rounded to nearest, at least 1.
inline std::size_t kFromExponent(std::size_t n, double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("kFromExponent: requires 0 < r < 1");
  }
  const auto k = static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(n), r)));
  return std::max<std::size_t>(std::min(k, n), 1);
}

// Population-bias schedules. The inner logarithms are clamped at zero so
// tiny n degrade to a zero bias instead of a NaN.
struct EpsRule {
  enum class Kind { kSqrtLog, kSqrtLogLog, kConst, kDkw };

  Kind kind = Kind::kConst;
  double a = 0.0;  // coefficient, or the value itself for kConst

  double value(std::size_t n) const {
    const double nd = static_cast<double>(n);
    switch (kind) {
      case Kind::kSqrtLog:
        return a * std::sqrt(std::log(nd) / nd);
      case Kind::kSqrtLogLog:
        return a * std::sqrt(std::max(std::log(std::log(nd)), 0.0) / nd);
      case Kind::kConst:
        return a;
      case Kind::kDkw:
        return std::sqrt(std::log(nd) / (2.0 * nd));
    }
    return 0.0;
  }

  // Text forms: sqrtlog:a | sqrtloglog:a | const:v | dkw; a bare number is
  // shorthand for const.
  static EpsRule parse(std::string_view text) {
    if (text == "dkw") return {Kind::kDkw, 0.0};
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      return {Kind::kConst, detail::parseDouble(text, "eps rule")};
    }
    const std::string_view name = text.substr(0, colon);
    const double arg = detail::parseDouble(text.substr(colon + 1), "eps rule");
    if (name == "sqrtlog") return {Kind::kSqrtLog, arg};
    if (name == "sqrtloglog") return {Kind::kSqrtLogLog, arg};
    if (name == "const") return {Kind::kConst, arg};
    throw std::invalid_argument(
        "eps rule: expected sqrtlog:a | sqrtloglog:a | const:v | dkw, got '" +
        std::string(text) + "'");
  }

  std::string spec() const {
    switch (kind) {
      case Kind::kSqrtLog:
        return "sqrtlog:" + detail::formatDouble(a);
      case Kind::kSqrtLogLog:
        return "sqrtloglog:" + detail::formatDouble(a);
      case Kind::kConst:
        return "const:" + detail::formatDouble(a);
      case Kind::kDkw:
        return "dkw";
    }
    return {};
  }
};

// One experiment: sweep n over a grid, at each n draw competencies from
// Uniform(lo + eps_n, hi) and compare the size-n^r congress against the
// full electorate.
struct ExperimentConfig {
  std::vector<std::size_t> nGrid;
  double r = 0.36;
  double distLo = 0.4;  // eps_n is added to this edge
  double distHi = 0.6;
  EpsRule epsRule;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  GainEstimate::Method mode = GainEstimate::Method::kExactConditional;

  void validate() const {
    if (nGrid.empty()) {
      throw std::invalid_argument("experiment: empty n grid");
    }
    for (std::size_t i = 0; i < nGrid.size(); ++i) {
      if (nGrid[i] < 1 || (i > 0 && nGrid[i] <= nGrid[i - 1])) {
        throw std::invalid_argument("experiment: n grid must be ascending");
      }
    }
    if (!(r > 0.0 && r < 1.0)) {
      throw std::invalid_argument("experiment: requires 0 < r < 1");
    }
    if (trials < 1) {
      throw std::invalid_argument("experiment: requires trials >= 1");
    }
    if (!(0.0 <= distLo && distLo < distHi && distHi <= 1.0)) {
      throw std::invalid_argument(
          "experiment: requires 0 <= lo < hi <= 1 for the base support");
    }
  }
};

struct ExperimentRow {
  std::size_t n = 0;
  double epsN = 0.0;
  std::size_t k = 0;
  double directAcc = 0.0;
  double repAcc = 0.0;
  double gain = 0.0;
  double directCi = 0.0;
  double repCi = 0.0;
  double gainCi = 0.0;  // paired-difference halfwidth; not a table column
};

inline std::vector<ExperimentRow> runExperiment(const ExperimentConfig& config,
                                                std::ostream* progress = nullptr) {
  config.validate();
  std::vector<ExperimentRow> rows;
  rows.reserve(config.nGrid.size());
  for (const std::size_t n : config.nGrid) {
    const double eps = config.epsRule.value(n);
    if (!(config.distLo + eps < config.distHi)) {
      throw std::invalid_argument(
          "experiment: eps_n pushes the lower support edge past the upper");
    }
    const auto dist =
        CompetenceDistribution::uniform(config.distLo + eps, config.distHi);
    const std::size_t k = kFromExponent(n, config.r);
    const auto mc = gainMonteCarloDetailed(dist, n, k, config.trials,
                                           config.seed, config.mode);
    rows.push_back({n, eps, k, mc.directAcc, mc.repAcc, mc.gain.value,
                    mc.directCi, mc.repCi, mc.gain.ci95Halfwidth});
    if (progress != nullptr) {
      *progress << "n=" << n << " k=" << k << " eps=" << eps
                << " gain=" << mc.gain.value << " ci=" << mc.gain.ci95Halfwidth
                << std::endl;
    }
  }
  return rows;
}

// Sufficient-condition checkers. Each verdict lists every hypothesis it
// evaluated with the probe values, so near-misses are auditable; a sign is
// predicted only when the whole list holds.
struct ConditionVerdict {
  enum class Theorem {
    kDictatorshipPositive,
    kDictatorshipNegative,
    kGeneralKPositive,
    kGeneralKNegative,
  };
  enum class Sign { kPositive, kNegative, kNotApplicable };

  struct Hypothesis {
    std::string name;
    bool satisfied = false;
    double lhs = 0.0;
    double rhs = 0.0;
  };

  Theorem theorem = Theorem::kDictatorshipPositive;
  Sign predictedSign = Sign::kNotApplicable;
  std::vector<Hypothesis> hypotheses;

  bool allSatisfied() const {
    for (const auto& h : hypotheses) {
      if (!h.satisfied) return false;
    }
    return true;
  }
};

inline const char* theoremName(ConditionVerdict::Theorem t) {
  switch (t) {
    case ConditionVerdict::Theorem::kDictatorshipPositive:
      return "dictatorship_positive";
    case ConditionVerdict::Theorem::kDictatorshipNegative:
      return "dictatorship_negative";
    case ConditionVerdict::Theorem::kGeneralKPositive:
      return "general_k_positive";
    case ConditionVerdict::Theorem::kGeneralKNegative:
      return "general_k_negative";
  }
  return "";
}

inline const char* signName(ConditionVerdict::Sign s) {
  switch (s) {
    case ConditionVerdict::Sign::kPositive:
      return "positive";
    case ConditionVerdict::Sign::kNegative:
      return "negative";
    case ConditionVerdict::Sign::kNotApplicable:
      return "not_applicable";
  }
  return "";
}

// Slack constants standing in for the asymptotic O/Omega terms of the
// sufficient conditions; reported alongside every probe so the choice is
// visible.
inline constexpr double kTailSlackMultiplier = 1.0;  // additive sqrt(log n / n)
inline constexpr double kExponentSlack = 0.1;        // tail exponent n^-(1+slack)

// Mean bias of the preset families at population size n.
inline double meanShift(double a, std::size_t n) {
  if (!(a >= 0.0)) throw std::invalid_argument("meanShift: requires a >= 0");
  return a * std::sqrt(std::log(static_cast<double>(n)) /
                       static_cast<double>(n));
}

// Uniform(2t, 1): mean exactly 1/2 + t where t = a sqrt(log n / n).
inline CompetenceDistribution dictatorshipUniformDist(double a, std::size_t n) {
  const double t = meanShift(a, n);
  if (!(2.0 * t < 1.0)) {
    throw std::invalid_argument("dictatorship preset: bias too large for n");
  }
  return CompetenceDistribution::uniform(2.0 * t, 1.0);
}

// Beta(shape * (1+2t)/(1-2t), shape): same exact mean by construction.
inline CompetenceDistribution dictatorshipBetaDist(double a, double shape,
                                                   std::size_t n) {
  const double t = meanShift(a, n);
  if (!(2.0 * t < 1.0)) {
    throw std::invalid_argument("dictatorship preset: bias too large for n");
  }
  return CompetenceDistribution::beta(shape * (1.0 + 2.0 * t) / (1.0 - 2.0 * t),
                                      shape);
}

enum class DictatorshipFamily { kUniform, kBeta };

namespace detail {

// inf and sup of pdf(x) / (1-x)^(shape-1) over [1/2, 1] for a Beta(a, b)
// density; the ratio reduces to x^(a-1) scaled by 1/B(a, b) when shape = b.
inline std::pair<double, double> betaEdgeRatioRange(double a, double b) {
  const double scale = std::exp(-num::logBeta(a, b));
  const double atHalf = std::pow(0.5, a - 1.0) * scale;
  const double atOne = scale;
  return {std::min(atHalf, atOne), std::max(atHalf, atOne)};
}

}  // namespace detail

// Predicts the sign of the gain of a dictator (k = 1) under the preset
// family with mean 1/2 + a sqrt(log n / n). Tries the positive sufficient
// condition, then the negative one; when neither list holds in full, both
// are reported and no sign is claimed.
inline ConditionVerdict dictatorshipCondition(DictatorshipFamily family,
                                              double a, double shape,
                                              std::size_t n) {
  using Verdict = ConditionVerdict;
  const CompetenceDistribution dist =
      family == DictatorshipFamily::kUniform
          ? dictatorshipUniformDist(a, n)
          : dictatorshipBetaDist(a, shape, n);
  const auto stats = dist.stats();
  const double t = meanShift(a, n);

  // The density floor / ceiling are against (1-x)^(shape-1) near the top of
  // the support; the uniform preset has shape 1 on both sides.
  std::vector<Verdict::Hypothesis> pos;
  std::vector<Verdict::Hypothesis> neg;
  double shapeFloor = 1.0;
  if (family == DictatorshipFamily::kUniform) {
    const double density = dist.pdf(0.75);
    pos.push_back({"density_floor_near_one", density >= 1.0, density, 1.0});
    neg.push_back({"density_ceiling_near_one", true, density, density});
  } else {
    shapeFloor = shape;
    const auto [lo, hi] =
        detail::betaEdgeRatioRange(dist.paramA(), dist.paramB());
    pos.push_back({"density_floor_near_one", lo > 0.0, lo, 0.0});
    // bounded by a constant multiple of (1-x)^(shape-1) only when the
    // density does not blow up at 1
    neg.push_back({"density_ceiling_near_one", shape >= 1.0, hi,
                   shape >= 1.0 ? hi : std::numeric_limits<double>::infinity()});
  }

  pos.push_back(
      {"mean_at_least_biased_half", stats.mean >= 0.5 + t - 1e-12, stats.mean,
       0.5 + t});
  const double aCap =
      std::sqrt(stats.meanP1mP * std::min(1.0, 2.0 / shapeFloor));
  pos.push_back({"a_below_variance_cap", a < aCap, a, aCap});

  neg.push_back({"mean_at_most_biased_half", stats.mean <= 0.5 + t + 1e-12,
                 stats.mean, 0.5 + t});
  const double aFloor = 1.0 / std::sqrt(2.0);
  neg.push_back({"a_above_sqrt_half", a > aFloor, a, aFloor});

  Verdict out;
  const auto holds = [](const std::vector<Verdict::Hypothesis>& hs) {
    for (const auto& h : hs) {
      if (!h.satisfied) return false;
    }
    return true;
  };
  if (holds(pos)) {
    out.theorem = Verdict::Theorem::kDictatorshipPositive;
    out.predictedSign = Verdict::Sign::kPositive;
    out.hypotheses = std::move(pos);
  } else if (holds(neg)) {
    out.theorem = Verdict::Theorem::kDictatorshipNegative;
    out.predictedSign = Verdict::Sign::kNegative;
    out.hypotheses = std::move(neg);
  } else {
    out.theorem = Verdict::Theorem::kDictatorshipPositive;
    out.predictedSign = Verdict::Sign::kNotApplicable;
    out.hypotheses = std::move(pos);
    out.hypotheses.insert(out.hypotheses.end(), neg.begin(), neg.end());
  }
  return out;
}

namespace detail {

// Mean of Normal(mu, sigma) conditioned on [0, 1], written with whichever
// normal tail stays representable so the bisection below can roam widely.
inline double truncatedNormalMean(double mu, double sigma) {
  const double al = (0.0 - mu) / sigma;
  const double be = (1.0 - mu) / sigma;
  double z;
  if (al >= 0.0) {
    z = num::normalCdf(-al) - num::normalCdf(-be);
  } else {
    z = num::normalCdf(be) - num::normalCdf(al);
  }
  if (!(z > 0.0)) z = std::numeric_limits<double>::min();
  const double phiAl = std::exp(-0.5 * al * al) / std::sqrt(2.0 * num::kPi);
  const double phiBe = std::exp(-0.5 * be * be) / std::sqrt(2.0 * num::kPi);
  return mu + sigma * (phiAl - phiBe) / z;
}

}  // namespace detail

// TruncatedNormal with sigma = sigma0 / sqrt(k) and the location solved so
// the truncated mean is exactly 1/2 + a sqrt(log n / n).
inline CompetenceDistribution generalKTruncNormDist(double a, double sigma0,
                                                    std::size_t k,
                                                    std::size_t n) {
  if (!(sigma0 > 0.0) || k < 1) {
    throw std::invalid_argument("general-k preset: requires sigma0 > 0, k >= 1");
  }
  const double sigma = sigma0 / std::sqrt(static_cast<double>(k));
  const double target = 0.5 + meanShift(a, n);
  const double mu = num::bisectMonotone(
      [sigma](double m) { return detail::truncatedNormalMean(m, sigma); },
      -30.0 * sigma, 1.0 + 30.0 * sigma, target);
  return CompetenceDistribution::truncatedNormal(mu, sigma);
}

// Beta(gamma k (1+2t)/(1-2t), gamma k): mean exactly 1/2 + t.
inline CompetenceDistribution generalKBetaDist(double a, double gamma,
                                               std::size_t k, std::size_t n) {
  if (!(gamma > 0.0) || k < 1) {
    throw std::invalid_argument("general-k preset: requires gamma > 0, k >= 1");
  }
  return dictatorshipBetaDist(a, gamma * static_cast<double>(k), n);
}

struct GeneralKParams {
  enum class Family { kTruncatedNormal, kBeta };

  Family family = Family::kTruncatedNormal;
  double a = 0.0;
  double alpha = 0.5;
  double r = 0.36;
  double sigma0 = 1.0;  // truncated-normal preset scale
  double gamma = 1.0;   // beta preset scale per congress seat
};

// Predicts the sign of the gain of a size-n^r congress. The truncated-normal
// preset carries the positive sufficient condition, the beta preset the
// negative one. The CDF-tail hypotheses are evaluated numerically at this n
// with the documented slack constants.
inline ConditionVerdict generalKCondition(const GeneralKParams& params,
                                          std::size_t n) {
  using Verdict = ConditionVerdict;
  if (!(params.r > 0.0 && params.r < 1.0)) {
    throw std::invalid_argument("generalKCondition: requires 0 < r < 1");
  }
  if (!(params.alpha > 0.0)) {
    throw std::invalid_argument("generalKCondition: requires alpha > 0");
  }
  const std::size_t k = kFromExponent(n, params.r);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double t = meanShift(params.a, n);
  // competence threshold probed by both tail hypotheses
  const double cut =
      0.5 + params.alpha * std::sqrt(std::max(std::log(kd), 0.0) / kd);

  Verdict out;
  if (params.family == GeneralKParams::Family::kTruncatedNormal) {
    const auto dist = generalKTruncNormDist(params.a, params.sigma0, k, n);
    const auto stats = dist.stats();
    const double tail = 1.0 - dist.cdf(cut);
    const double tailNeed =
        kd / nd + kTailSlackMultiplier * std::sqrt(std::log(nd) / nd);
    const double sigmaNeed = params.r * params.alpha * params.alpha /
                             (2.0 * std::min(1.0 - params.r, 0.5));
    out.theorem = Verdict::Theorem::kGeneralKPositive;
    out.hypotheses = {
        {"mean_anchor_at_biased_half", std::fabs(stats.mean - (0.5 + t)) <= 1e-9,
         stats.mean, 0.5 + t},
        {"upper_tail_above_seat_share", tail >= tailNeed, tail, tailNeed},
        {"sigma0_sq_above_threshold",
         params.sigma0 * params.sigma0 > sigmaNeed,
         params.sigma0 * params.sigma0, sigmaNeed},
    };
    out.predictedSign = out.allSatisfied() ? Verdict::Sign::kPositive
                                           : Verdict::Sign::kNotApplicable;
    return out;
  }

  const auto dist = generalKBetaDist(params.a, params.gamma, k, n);
  const auto stats = dist.stats();
  const double tail = 1.0 - dist.cdf(cut);
  const double tailCap = std::pow(nd, -(1.0 + kExponentSlack));
  const double gammaNeed =
      (1.0 / (4.0 * params.alpha * params.alpha)) *
      ((1.0 + kExponentSlack) / params.r + 1.0);
  out.theorem = Verdict::Theorem::kGeneralKNegative;
  out.hypotheses = {
      {"alpha_below_half", params.alpha < 0.5, params.alpha, 0.5},
      {"r_below_half", params.r < 0.5, params.r, 0.5},
      {"a_above_sqrt_r_alpha", params.a > std::sqrt(params.r) * params.alpha,
       params.a, std::sqrt(params.r) * params.alpha},
      {"gamma_above_threshold", params.gamma > gammaNeed, params.gamma,
       gammaNeed},
      {"mean_anchor_at_biased_half",
       std::fabs(stats.mean - (0.5 + t)) <= 1e-9, stats.mean, 0.5 + t},
      {"upper_tail_below_power_law", tail <= tailCap, tail, tailCap},
  };
  out.predictedSign = out.allSatisfied() ? Verdict::Sign::kNegative
                                         : Verdict::Sign::kNotApplicable;
  return out;
}

}  // namespace epicon
