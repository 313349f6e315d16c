#pragma once

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "epicon/numerics.hpp"
#include "epicon/rng.hpp"

// Competence-distribution families on [0, 1], profile sampling, the
// deterministic expected-order-statistic profile, and the DKW band check.

namespace epicon {

namespace detail {

inline double parseDouble(std::string_view s, const char* what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": bad number '" +
                                std::string(s) + "'");
  }
  return v;
}

// Shortest round-trip formatting; keeps every serialized number re-parseable
// to the same double.
inline std::string formatDouble(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace detail

// One competence distribution: voters' success probabilities are i.i.d.
// draws from it. Immutable after construction.
class CompetenceDistribution {
 public:
  enum class Family { kUniform, kBeta, kTruncatedNormal };

  static CompetenceDistribution uniform(double lo, double hi) {
    if (!(0.0 <= lo && lo < hi && hi <= 1.0)) {
      throw std::invalid_argument("uniform: requires 0 <= lo < hi <= 1");
    }
    return CompetenceDistribution(Family::kUniform, lo, hi);
  }

  static CompetenceDistribution beta(double alpha, double betaShape) {
    if (!(alpha > 0.0) || !(betaShape > 0.0) || !std::isfinite(alpha) ||
        !std::isfinite(betaShape)) {
      throw std::invalid_argument("beta: requires alpha, beta > 0");
    }
    return CompetenceDistribution(Family::kBeta, alpha, betaShape);
  }

  // Normal(mu, sigma) conditioned on [0, 1].
  static CompetenceDistribution truncatedNormal(double mu, double sigma) {
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("truncnorm: requires finite mu and sigma > 0");
    }
    const double z = num::normalCdf((1.0 - mu) / sigma) -
                     num::normalCdf((0.0 - mu) / sigma);
    if (!(z > 1e-12)) {
      throw std::invalid_argument(
          "truncnorm: vanishing probability mass on [0, 1]");
    }
    return CompetenceDistribution(Family::kTruncatedNormal, mu, sigma);
  }

  // Text form: uniform:lo,hi | beta:alpha,beta | truncnorm:mu,sigma
  static CompetenceDistribution parse(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string_view::npos) {
      std::string_view rest = spec.substr(colon + 1);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        args.push_back(detail::parseDouble(rest.substr(0, comma), "distribution spec"));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
    if (name == "uniform" && args.size() == 2) return uniform(args[0], args[1]);
    if (name == "beta" && args.size() == 2) return beta(args[0], args[1]);
    if (name == "truncnorm" && args.size() == 2) {
      return truncatedNormal(args[0], args[1]);
    }
    throw std::invalid_argument("distribution spec: expected uniform:lo,hi | "
                                "beta:alpha,beta | truncnorm:mu,sigma, got '" +
                                std::string(spec) + "'");
  }

  std::string spec() const {
    switch (family_) {
      case Family::kUniform:
        return "uniform:" + detail::formatDouble(a_) + "," + detail::formatDouble(b_);
      case Family::kBeta:
        return "beta:" + detail::formatDouble(a_) + "," + detail::formatDouble(b_);
      case Family::kTruncatedNormal:
        return "truncnorm:" + detail::formatDouble(a_) + "," + detail::formatDouble(b_);
    }
    return {};
  }

  Family family() const { return family_; }
  double paramA() const { return a_; }
  double paramB() const { return b_; }
  double supportLo() const { return family_ == Family::kUniform ? a_ : 0.0; }
  double supportHi() const { return family_ == Family::kUniform ? b_ : 1.0; }

  double pdf(double x) const {
    switch (family_) {
      case Family::kUniform:
        return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
      case Family::kBeta: {
        if (x < 0.0 || x > 1.0) return 0.0;
        if (x == 0.0) {
          if (a_ < 1.0) return std::numeric_limits<double>::infinity();
          if (a_ > 1.0) return 0.0;
          return std::exp(-num::logBeta(a_, b_));  // alpha == 1
        }
        if (x == 1.0) {
          if (b_ < 1.0) return std::numeric_limits<double>::infinity();
          if (b_ > 1.0) return 0.0;
          return std::exp(-num::logBeta(a_, b_));
        }
        return std::exp((a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log1p(-x) -
                        num::logBeta(a_, b_));
      }
      case Family::kTruncatedNormal: {
        if (x < 0.0 || x > 1.0) return 0.0;
        const double z = (x - a_) / b_;
        return std::exp(-0.5 * z * z) /
               (b_ * std::sqrt(2.0 * num::kPi) * truncMass());
      }
    }
    return 0.0;
  }

  double cdf(double x) const {
    switch (family_) {
      case Family::kUniform:
        if (x <= a_) return 0.0;
        if (x >= b_) return 1.0;
        return (x - a_) / (b_ - a_);
      case Family::kBeta:
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return num::regularizedIncompleteBeta(a_, b_, x);
      case Family::kTruncatedNormal: {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double c =
            (num::normalCdf((x - a_) / b_) - num::normalCdf((0.0 - a_) / b_)) /
            truncMass();
        return std::clamp(c, 0.0, 1.0);
      }
    }
    return 0.0;
  }

  double quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw std::invalid_argument("quantile: requires u in [0, 1]");
    }
    if (family_ == Family::kUniform) return a_ + u * (b_ - a_);
    if (u == 0.0) return supportLo();
    if (u == 1.0) return supportHi();
    return num::bisectMonotone([this](double x) { return cdf(x); }, 0.0, 1.0, u);
  }

  struct Moments {
    double mean;      // E[p]
    double meanP1mP;  // E[p(1-p)]
  };

  // Closed forms for uniform, beta and truncated normal; the quadrature
  // oracle in the tests cross-checks them.
  Moments stats() const {
    switch (family_) {
      case Family::kUniform: {
        const double mean = 0.5 * (a_ + b_);
        const double m2 = (a_ * a_ + a_ * b_ + b_ * b_) / 3.0;
        return {mean, mean - m2};
      }
      case Family::kBeta: {
        const double s = a_ + b_;
        return {a_ / s, a_ * b_ / (s * (s + 1.0))};
      }
      case Family::kTruncatedNormal: {
        // Standard truncated-normal moments on [0, 1].
        const double al = (0.0 - a_) / b_;
        const double be = (1.0 - a_) / b_;
        const double z = truncMass();
        const double phiAl = stdNormalPdf(al);
        const double phiBe = stdNormalPdf(be);
        const double mean = a_ + b_ * (phiAl - phiBe) / z;
        const double var =
            b_ * b_ *
            (1.0 + (al * phiAl - be * phiBe) / z -
             ((phiAl - phiBe) / z) * ((phiAl - phiBe) / z));
        return {mean, mean - (var + mean * mean)};
      }
    }
    return {0.0, 0.0};
  }

  // M = 1 / inf pdf over the support: the Lipschitz constant of the quantile
  // function. Empty when the density touches zero (quantile not Lipschitz).
  std::optional<double> quantileLipschitzConstant() const {
    if (family_ == Family::kUniform) return b_ - a_;
    // Grid scan plus local refinement; densities here are piecewise smooth
    // with at most one interior minimum.
    constexpr int kGrid = 10000;
    double bestX = 0.0;
    double bestF = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGrid; ++i) {
      const double x = static_cast<double>(i) / kGrid;
      const double f = pdf(x);
      if (f < bestF) {
        bestF = f;
        bestX = x;
      }
    }
    const double lo = std::max(0.0, bestX - 1.0 / kGrid);
    const double hi = std::min(1.0, bestX + 1.0 / kGrid);
    // golden-section refinement
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = pdf(x1);
    double f2 = pdf(x2);
    for (int i = 0; i < 80; ++i) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = pdf(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = pdf(x2);
      }
    }
    bestF = std::min(bestF, std::min(f1, f2));
    if (!(bestF > 1e-12)) return std::nullopt;
    return 1.0 / bestF;
  }

 private:
  CompetenceDistribution(Family f, double a, double b)
      : family_(f), a_(a), b_(b) {}

  static double stdNormalPdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * num::kPi);
  }

  double truncMass() const {
    return num::normalCdf((1.0 - a_) / b_) - num::normalCdf((0.0 - a_) / b_);
  }

  Family family_;
  double a_;
  double b_;
};

// Voters sorted by decreasing competence.
struct CompetenceProfile {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  std::span<const double> span() const { return probs; }
  std::span<const double> top(std::size_t k) const {
    return std::span<const double>(probs).first(k);
  }
};

// n i.i.d. inverse-CDF draws using the caller's stream, sorted descending.
inline CompetenceProfile sampleProfile(const CompetenceDistribution& dist,
                                       std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sampleProfile: requires n >= 1");
  CompetenceProfile prof;
  prof.probs.resize(n);
  for (auto& p : prof.probs) p = dist.quantile(rng.nextUnit());
  std::sort(prof.probs.begin(), prof.probs.end(), std::greater<>());
  return prof;
}

inline CompetenceProfile sampleProfile(const CompetenceDistribution& dist,
                                       std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sampleProfile(dist, n, rng);
}

// The deterministic profile p_(i) = (n + 1 - i) / (n + 1): the expected
// order statistics of n independent U(0, 1) competence levels.
inline CompetenceProfile expectedUniformProfile(std::size_t n) {
  if (n == 0) throw std::invalid_argument("expectedUniformProfile: requires n >= 1");
  CompetenceProfile prof;
  prof.probs.resize(n);
  for (std::size_t i = 1; i <= n; ++i) {
    prof.probs[i - 1] =
        static_cast<double>(n + 1 - i) / static_cast<double>(n + 1);
  }
  return prof;
}

// True iff |F(p_(i)) - (n - i)/n| <= eps for every rank i = 1..n, the
// empirical band that holds with probability >= 1 - 2 exp(-2 n eps^2).
inline bool dkwBandCheck(const CompetenceDistribution& dist,
                         const CompetenceProfile& profile, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("dkwBandCheck: requires eps > 0");
  const std::size_t n = profile.size();
  for (std::size_t i = 1; i <= n; ++i) {
    const double want =
        static_cast<double>(n - i) / static_cast<double>(n);
    if (std::fabs(dist.cdf(profile.probs[i - 1]) - want) > eps) return false;
  }
  return true;
}

// Profile source used by the CLI: either a samplable distribution or the
// deterministic expected-uniform profile.
struct ProfileSpec {
  std::optional<CompetenceDistribution> dist;  // empty means expuniform

  static ProfileSpec parse(std::string_view text) {
    if (text == "expuniform") return ProfileSpec{std::nullopt};
    return ProfileSpec{CompetenceDistribution::parse(text)};
  }

  bool expectedUniform() const { return !dist.has_value(); }

  std::string spec() const { return dist ? dist->spec() : "expuniform"; }

  CompetenceProfile materialize(std::size_t n, std::uint64_t seed) const {
    return dist ? sampleProfile(*dist, n, seed) : expectedUniformProfile(n);
  }
};

}  // namespace epicon
