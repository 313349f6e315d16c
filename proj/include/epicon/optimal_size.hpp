#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "epicon/competence.hpp"
#include "epicon/poisson_binomial.hpp"

// Optimal congress size: exhaustive scan of q_k over odd k, the pairwise
// ratio diagnostic, and the closed-form bound constants.

namespace epicon {

struct OptimalSizeResult {
  std::size_t n = 0;
  std::size_t kStar = 0;  // smallest odd maximizer of q_k
  double maxProb = 0.0;   // q_{kStar}
  std::vector<std::pair<std::size_t, double>> qCurve;  // (odd k, q_k)
};

// Scans every odd k by extending one Poisson-binomial DP across the profile.
// The argmax is taken on the failure side, comparing Pr[S_k <= k/2] instead
// of q_k: the two orders agree exactly in real arithmetic, but for large
// panels of competent voters q_k rounds to 1.0 while the failure mass stays
// resolvable. Failure masses below about 1e-300 underflow and tie at zero;
// beyond that scale the scan keeps the smallest such k.
inline OptimalSizeResult optimalK(const CompetenceProfile& profile) {
  const std::size_t n = profile.size();
  if (n == 0) throw std::invalid_argument("optimalK: requires n >= 1");

  OptimalSizeResult out;
  out.n = n;
  out.qCurve.reserve((n + 1) / 2);

  auto pmf = PoissonBinomialPmf::identity();
  double bestFail = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= n; ++k) {
    pmf.extend(profile.probs[k - 1]);
    if (k % 2 == 0) continue;
    const double fail = pmf.headAtMost(k / 2);
    out.qCurve.emplace_back(k, pmf.majorityProb());
    if (fail < bestFail) {
      bestFail = fail;
      out.kStar = k;
      out.maxProb = out.qCurve.back().second;
    }
  }
  return out;
}

struct RatioTestOutcome {
  enum class Verdict { kRulesOutK, kRulesOutKPlus2, kInconclusive };

  std::size_t k = 0;
  double lhs = 0.0;  // Pr[exactly (k+1)/2 correct] / Pr[exactly (k-1)/2 correct]
  double rhs = 0.0;  // odds product of voters k+1 and k+2
  Verdict verdict = Verdict::kInconclusive;
};

inline const char* verdictName(RatioTestOutcome::Verdict v) {
  switch (v) {
    case RatioTestOutcome::Verdict::kRulesOutK:
      return "rules_out_k";
    case RatioTestOutcome::Verdict::kRulesOutKPlus2:
      return "rules_out_k_plus_2";
    case RatioTestOutcome::Verdict::kInconclusive:
      return "inconclusive";
  }
  return "";
}

// Compares congresses k and k+2 through the identity
//   q_{k+2} - q_k = Pr[E_k^l] p1 p2 - Pr[E_k^{l+1}] (1-p1)(1-p2),
// with l = (k-1)/2 and p1, p2 the next two competence levels. lhs < rhs
// means k+2 strictly beats k, so k cannot be optimal, and vice versa.
inline RatioTestOutcome ratioTest(const CompetenceProfile& profile,
                                  std::size_t k) {
  if (k % 2 == 0 || k + 2 > profile.size()) {
    throw std::invalid_argument("ratioTest: requires odd k with k + 2 <= n");
  }
  const double p1 = profile.probs[k];
  const double p2 = profile.probs[k + 1];

  const PoissonBinomialPmf pmf(profile.top(k));
  const std::size_t l = (k - 1) / 2;
  const double el = pmf.massAt(l);
  const double el1 = pmf.massAt(l + 1);

  RatioTestOutcome out;
  out.k = k;
  using Verdict = RatioTestOutcome::Verdict;

  if (p1 >= 1.0 || p2 >= 1.0) {
    // Two more voters, at least one of them always right: the larger
    // congress can only gain, so k is ruled out in the limit.
    out.lhs = el > 0.0 ? el1 / el : std::numeric_limits<double>::infinity();
    out.rhs = std::numeric_limits<double>::infinity();
    out.verdict = Verdict::kRulesOutK;
    return out;
  }
  out.rhs = (p1 * p2) / ((1.0 - p1) * (1.0 - p2));
  if (el == 0.0 && el1 == 0.0) {
    // Both marginal events impossible; q_{k+2} = q_k.
    out.lhs = std::numeric_limits<double>::quiet_NaN();
    out.verdict = Verdict::kInconclusive;
    return out;
  }
  out.lhs = el > 0.0 ? el1 / el : std::numeric_limits<double>::infinity();
  if (std::fabs(out.lhs - out.rhs) <= 1e-12) {
    out.verdict = Verdict::kInconclusive;
  } else if (out.lhs < out.rhs) {
    out.verdict = Verdict::kRulesOutK;
  } else {
    out.verdict = Verdict::kRulesOutKPlus2;
  }
  return out;
}

// Closed-form band for the optimal size under the expected-uniform profile:
// (3 - 2 sqrt 2) n below, n/2 above, each up to an additive constant that
// callers absorb with a +-3 slack.
inline std::pair<double, double> uniformBounds(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniformBounds: requires n >= 1");
  const double nd = static_cast<double>(n);
  return {(3.0 - 2.0 * std::sqrt(2.0)) * nd, 0.5 * nd};
}

struct BoundedSupportBounds {
  double cH = 0.0;  // K* >= cH * n - O(1) ...
  double cL = 0.0;  // ... and K* <= cL * n + O(1)
  double probLowerBound = 0.0;  // with probability at least this
};

// Sampled-profile band for distributions on [L, H] straddling 1/2 with an
// M-Lipschitz quantile. eps is the empirical-CDF band radius; eps = 0 gives
// the asymptotic constants.
inline BoundedSupportBounds boundedSupportBounds(
    const CompetenceDistribution& dist, std::size_t n, double eps) {
  if (n == 0) throw std::invalid_argument("boundedSupportBounds: requires n >= 1");
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("boundedSupportBounds: requires eps >= 0");
  }
  const double lo = dist.supportLo();
  const double hi = dist.supportHi();
  if (!(0.0 < lo && lo < 0.5 && 0.5 < hi && hi < 1.0)) {
    throw std::invalid_argument(
        "boundedSupportBounds: requires support [L, H] with 0 < L < 1/2 < H < 1");
  }
  const auto m = dist.quantileLipschitzConstant();
  if (!m) {
    throw std::invalid_argument(
        "boundedSupportBounds: quantile is not Lipschitz (density reaches 0)");
  }

  const auto cutoff = [&](double edge, double shift) {
    double x = 1.0 / (1.0 + std::sqrt((1.0 - edge) / edge)) + shift;
    x = std::clamp(x, lo, hi);
    return 1.0 - dist.cdf(x);
  };

  BoundedSupportBounds out;
  out.cH = cutoff(hi, *m * eps);
  out.cL = cutoff(lo, -(*m * eps));
  out.probLowerBound =
      1.0 - 4.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps);
  return out;
}

}  // namespace epicon
