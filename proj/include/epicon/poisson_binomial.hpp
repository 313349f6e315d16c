#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Exact distribution of the number of successes among independent Bernoulli
// trials with heterogeneous success probabilities, built by convolving one
// trial at a time. Cost is O(k^2) for k trials and O(k) memory, and the
// incremental extend() makes a full k = 1..n sweep O(n^2) overall.

namespace epicon {

// Entries this far outside [0, 1] are treated as rounding noise and clamped;
// anything worse is rejected.
inline constexpr double kProbSlack = 1e-12;

// A computed mass entry below -kNegMassTol means the recurrence itself is
// broken, not rounding.
inline constexpr double kNegMassTol = 1e-15;

// Validates success probabilities and returns a copy clamped to [0, 1].
inline std::vector<double> validatedSuccessProbs(std::span<const double> probs) {
  if (probs.empty()) {
    throw std::invalid_argument("success probabilities: empty vector");
  }
  std::vector<double> out;
  out.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= -kProbSlack && p <= 1.0 + kProbSlack)) {
      throw std::invalid_argument("success probabilities: entry " +
                                  std::to_string(i) + " outside [0, 1]");
    }
    out.push_back(p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p));
  }
  return out;
}

class PoissonBinomialPmf {
 public:
  // Empty product: zero trials, all mass on zero successes. massFloor > 0
  // turns on window trimming: entries smaller than the floor at either end
  // of the support are dropped (total discarded mass stays below
  // 4 * trials * massFloor). The default keeps every representable entry,
  // which the optimal-size scan relies on to compare failure masses far
  // below double epsilon.
  static PoissonBinomialPmf identity(double massFloor = 0.0) {
    return PoissonBinomialPmf(massFloor);
  }

  explicit PoissonBinomialPmf(std::span<const double> probs,
                              double massFloor = 0.0)
      : PoissonBinomialPmf(massFloor) {
    for (double p : validatedSuccessProbs(probs)) extendUnchecked(p);
  }

  // Adds one trial with success probability p.
  void extend(double p) {
    if (!(p >= -kProbSlack && p <= 1.0 + kProbSlack)) {
      throw std::invalid_argument("extend: probability outside [0, 1]");
    }
    extendUnchecked(p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p));
  }

  PoissonBinomialPmf extended(double p) const {
    PoissonBinomialPmf out(*this);
    out.extend(p);
    return out;
  }

  // Number of trials convolved so far.
  std::size_t trials() const { return mass_.size() - 1; }

  // Full mass vector of length trials() + 1; trimmed entries read as zero.
  const std::vector<double>& mass() const { return mass_; }

  double massAt(std::size_t j) const {
    if (j >= mass_.size()) {
      throw std::invalid_argument("massAt: success count out of range");
    }
    return mass_[j];
  }

  double total() const {
    double s = 0.0;
    for (std::size_t j = lo_; j <= hi_; ++j) s += mass_[j];
    return s;
  }

  // Pr[successes >= j0].
  double tailAtLeast(std::size_t j0) const {
    double s = 0.0;
    for (std::size_t j = std::max(j0, lo_); j <= hi_; ++j) s += mass_[j];
    return s;
  }

  // Pr[successes <= j0].
  double headAtMost(std::size_t j0) const {
    double s = 0.0;
    for (std::size_t j = lo_; j <= std::min(j0, hi_); ++j) s += mass_[j];
    return s;
  }

  // Pr[successes > trials / 2]: a strict majority. Ties on even trial counts
  // do not count.
  double majorityProb() const { return tailAtLeast(trials() / 2 + 1); }

 private:
  explicit PoissonBinomialPmf(double massFloor)
      : mass_{1.0}, lo_(0), hi_(0), floor_(massFloor) {
    if (!(massFloor >= 0.0 && massFloor <= 1e-6)) {
      throw std::invalid_argument("PoissonBinomialPmf: unusable mass floor");
    }
  }

  void extendUnchecked(double p) {
    const double q = 1.0 - p;
    mass_.push_back(0.0);
    // In-place right-to-left update; mass_[j - 1] still holds the previous
    // trial count's value when row j is written.
    double minSeen = 0.0;
    for (std::size_t j = hi_ + 1; j > lo_; --j) {
      const double v = mass_[j] * q + mass_[j - 1] * p;
      minSeen = v < minSeen ? v : minSeen;
      mass_[j] = v < 0.0 ? 0.0 : v;
    }
    mass_[lo_] *= q;
    if (minSeen < -kNegMassTol) {
      throw std::logic_error("PoissonBinomialPmf: negative mass beyond tolerance");
    }
    ++hi_;
    // Trim vanished ends. With floor_ == 0 only exact zeros go (p == 1 or
    // p == 0 shifts the support), so nothing representable is ever lost.
    while (lo_ < hi_ && mass_[lo_] <= floor_) {
      mass_[lo_] = 0.0;
      ++lo_;
    }
    while (hi_ > lo_ && mass_[hi_] <= floor_) {
      mass_[hi_] = 0.0;
      --hi_;
    }
  }

  std::vector<double> mass_;
  std::size_t lo_;
  std::size_t hi_;
  double floor_;
};

// Mass floor used by the majority fast path. Total discarded probability is
// bounded by 4 * n * kMajorityMassFloor, far below the 1e-12 agreement
// tolerances used throughout, while the active window shrinks to
// O(sqrt(n log(1/floor))) entries.
inline constexpr double kMajorityMassFloor = 1e-22;

// Exact PMF of the success count.
inline PoissonBinomialPmf pmf(std::span<const double> probs) {
  return PoissonBinomialPmf(probs);
}

// Pr[strict majority of the trials succeed]. Uses the trimmed window, so the
// result carries absolute error below 1e-12 but is not meaningful closer to
// 0 or 1 than the mass floor.
inline double majorityProb(std::span<const double> probs) {
  return PoissonBinomialPmf(probs, kMajorityMassFloor).majorityProb();
}

// Pr[exactly j of the trials succeed], exact.
inline double eventProb(std::span<const double> probs, std::size_t j) {
  const PoissonBinomialPmf d(probs);
  if (j > d.trials()) {
    throw std::invalid_argument("eventProb: success count exceeds trial count");
  }
  return d.massAt(j);
}

struct RecursionIdentity {
  double lhs;  // Pr[exactly j successes], by convolution
  double rhs;  // the same probability, by the subset-sum recursion
};

// Cross-checks the convolution against the combinatorial identity
//
//   Pr[exactly j of k] = (1 / (k - j)) * sum over |S| = j + 1 of
//                        w(S) * sum_{i in S} (1 - p_i) / p_i
//
// where w(S) is the probability that exactly the trials in S succeed.
// Subset enumeration caps k at 15 and requires every p_i > 0.
inline RecursionIdentity recursionIdentityCheck(std::span<const double> probs,
                                                std::size_t j) {
  const std::vector<double> p = validatedSuccessProbs(probs);
  const std::size_t k = p.size();
  if (k > 15) {
    throw std::invalid_argument("recursionIdentityCheck: more than 15 trials");
  }
  if (j >= k) {
    throw std::invalid_argument("recursionIdentityCheck: requires j < k");
  }
  for (double v : p) {
    if (v <= 0.0) {
      throw std::domain_error("recursionIdentityCheck: requires every p > 0");
    }
  }
  // DFS over subsets of size j + 1, carrying the partial product of chosen
  // p_i and unchosen (1 - p_i) plus the running odds sum.
  double acc = 0.0;
  auto walk = [&](auto&& self, std::size_t idx, std::size_t chosen,
                  double weight, double oddsSum) -> void {
    if (chosen == j + 1) {
      for (std::size_t i = idx; i < k; ++i) weight *= 1.0 - p[i];
      acc += weight * oddsSum;
      return;
    }
    if (k - idx < j + 1 - chosen) return;
    self(self, idx + 1, chosen + 1, weight * p[idx],
         oddsSum + (1.0 - p[idx]) / p[idx]);
    self(self, idx + 1, chosen, weight * (1.0 - p[idx]), oddsSum);
  };
  walk(walk, 0, 0, 1.0, 0.0);
  return {eventProb(p, j), acc / static_cast<double>(k - j)};
}

}  // namespace epicon
