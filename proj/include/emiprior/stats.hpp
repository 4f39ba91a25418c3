// stats.hpp - Regularized incomplete beta, Student t CDF and Welch's t-test
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "error.hpp"

namespace emiprior::stats {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw InvariantError("incomplete beta continued fraction did not converge");
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InvariantError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvariantError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                     + a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - bt * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T <= t) for Student's t with `dof` degrees of freedom (dof > 0,
/// not necessarily an integer).
inline double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw InvariantError("t distribution needs dof > 0");
  if (std::isnan(t)) throw InvariantError("t statistic is NaN");
  if (std::isinf(t)) return t < 0.0 ? 0.0 : 1.0;
  const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t < 0.0 ? tail : 1.0 - tail;
}

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 0.5;  // P(T <= t): small when mean(a) is clearly below mean(b)
  double dof = 0.0;
};

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;  // unbiased, 1/(n-1)
  double anchor = 0.0;    // first value; mean = anchor + offset
  double offset = 0.0;
};

/// Moments computed relative to the first value, so that shifting the
/// data leaves offset and variance unchanged whenever x - x0 is exact.
inline MeanVariance mean_variance(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientDataError("variance needs at least 2 values");
  MeanVariance mv;
  mv.anchor = x.front();
  for (double v : x) mv.offset += v - mv.anchor;
  mv.offset /= static_cast<double>(x.size());
  mv.mean = mv.anchor + mv.offset;
  for (double v : x) {
    const double d = (v - mv.anchor) - mv.offset;
    mv.variance += d * d;
  }
  mv.variance /= static_cast<double>(x.size() - 1);
  return mv;
}

/// Welch's unequal-variance two-sample t-test. The one-sided p-value is
/// the probability, under equal means, of a statistic at or below the
/// observed one; a small p supports mean(a) < mean(b). Swapping the
/// samples maps p to 1 - p.
inline TTestResult two_sample_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InsufficientDataError("t-test needs at least 2 values per sample");
  const auto ma = mean_variance(a), mb = mean_variance(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double qa = ma.variance / na, qb = mb.variance / nb;
  const double se2 = qa + qb;
  TTestResult r;
  if (se2 == 0.0) {
    r.dof = na + nb - 2.0;
    const double diff = (ma.anchor - mb.anchor) + (ma.offset - mb.offset);
    if (diff == 0.0) {
      r.t_statistic = 0.0;
      r.p_value = 0.5;
    } else {
      r.t_statistic = diff < 0.0 ? -std::numeric_limits<double>::infinity()
                                 : std::numeric_limits<double>::infinity();
      r.p_value = diff < 0.0 ? 0.0 : 1.0;
    }
    return r;
  }
  const double diff = (ma.anchor - mb.anchor) + (ma.offset - mb.offset);
  r.t_statistic = diff / std::sqrt(se2);
  r.dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  // Both signs go through the upper half so that swapping a and b maps p
  // to exactly 1 - p.
  const double upper = student_t_cdf(std::abs(r.t_statistic), r.dof);
  r.p_value = r.t_statistic < 0.0 ? 1.0 - upper : upper;
  return r;
}

} // namespace emiprior::stats
