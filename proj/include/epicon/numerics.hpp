#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

// Small self-contained numeric kernel: log-gamma, the regularized incomplete
// beta function, the standard normal CDF and an adaptive quadrature routine.
// Only what the competence distributions need, nothing more.

namespace epicon::num {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// Lanczos approximation (g = 7, 9 terms), valid for x > 0 with relative
// error around 1e-15.
inline double logGamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("logGamma: requires x > 0");
  static constexpr double kCoef[] = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection keeps the series in its accurate range
    return std::log(kPi / std::sin(kPi * x)) - logGamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = kCoef[0];
  for (int i = 1; i < 9; ++i) sum += kCoef[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

inline double logBeta(double a, double b) {
  return logGamma(a) + logGamma(b) - logGamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz algorithm.
inline double betaContinuedFraction(double a, double b, double x) {
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("regularizedIncompleteBeta: continued fraction did not converge");
}

}  // namespace detail

// I_x(a, b), the regularized incomplete beta function, for a, b > 0 and
// x in [0, 1].
inline double regularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("regularizedIncompleteBeta: requires a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("regularizedIncompleteBeta: requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - logBeta(a, b));
  // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the side where the
  // continued fraction converges fastest.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::betaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * detail::betaContinuedFraction(b, a, 1.0 - x) / b;
}

// Standard normal CDF via erfc, accurate in both tails.
inline double normalCdf(double z) {
  return 0.5 * std::erfc(-z / kSqrt2);
}

namespace detail {

template <typename F>
double simpsonStep(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpsonStep(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpsonStep(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance tol.
template <typename F>
double adaptiveSimpson(const F& f, double a, double b, double tol,
                       int maxDepth = 52) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpsonStep(f, a, b, fa, fm, fb, whole, tol, maxDepth);
}

// Bisection for a monotone nondecreasing f on [lo, hi]: returns x with
// f(x) ~= target. Stops once either the bracket or the residual is tiny.
template <typename F>
double bisectMonotone(const F& f, double lo, double hi, double target,
                      double xtol = 1e-15, double ftol = 1e-15) {
  double a = lo;
  double b = hi;
  for (int i = 0; i < 200 && (b - a) > xtol * std::fmax(1.0, std::fabs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (std::fabs(fm - target) <= ftol) return m;
    if (fm < target) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace epicon::num
