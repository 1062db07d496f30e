#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "inferlab/error.hpp"
#include "inferlab/estimators.hpp"
#include "inferlab/special_functions.hpp"

namespace inferlab {

/// Two-sided Student coefficient: the t with P(|T| <= t) = confidence for
/// `dof` degrees of freedom. Inverts the incomplete-beta CDF by bracketing
/// then bisection.
inline double student_coefficient(double dof, double confidence) {
  if (!(dof >= 1.0)) throw ParameterError("student_coefficient: dof must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ParameterError("student_coefficient: confidence must lie in (0, 1)");
  const double target = 0.5 * (1.0 + confidence);
  double lo = 0.0;
  double hi = 1.0;
  while (student_cdf(hi, dof) < target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_cdf(mid, dof) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// One-sided quantile: the t with P(T <= t) = p, for p in (0, 1).
inline double student_quantile(double dof, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("student_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  const double t = student_coefficient(dof, std::fabs(2.0 * p - 1.0));
  return p > 0.5 ? t : -t;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

/// X̄ ± t(n-1, confidence) sigma_{n-1} / sqrt(n).
inline Interval mean_confidence_interval(std::span<const double> xs, double confidence) {
  if (xs.size() < 2) throw InsufficientDataError("confidence interval needs at least 2 values");
  const double m = sample_mean(xs);
  const double half = student_coefficient(static_cast<double>(xs.size() - 1), confidence) * sample_std(xs) /
                      std::sqrt(static_cast<double>(xs.size()));
  return {m - half, m + half};
}

}  // namespace inferlab
