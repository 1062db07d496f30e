#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "inferlab/error.hpp"
#include "inferlab/student.hpp"

namespace inferlab {

/// Paired observations y_i = a x_i + b + eps_i, with optional per-point
/// standard deviations of y.
struct Dataset {
  std::vector<double> xs;
  std::vector<double> ys;
  std::optional<std::vector<double>> sigmas;

  std::size_t size() const { return xs.size(); }

  void validate() const {
    if (xs.size() != ys.size()) throw ParameterError("dataset: xs and ys differ in length");
    if (sigmas) {
      if (sigmas->size() != xs.size()) throw ParameterError("dataset: sigmas length mismatch");
      for (double s : *sigmas)
        if (!(s > 0.0)) throw ParameterError("dataset: every sigma must be > 0");
    }
  }
};

struct LinearFit {
  double a = 0.0;  // slope
  double b = 0.0;  // intercept
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double chi2 = 0.0;
  std::vector<double> residuals;  // y_i - (a x_i + b)
  double sigma_eps = 0.0;         // residual-based noise estimate; NaN when n < 3
  std::size_t n = 0;
  bool weighted = false;
  bool sigma_from_residuals = false;  // Student N-2 factors apply

  double predict(double x) const { return a * x + b; }
};

namespace detail {

struct Spread {
  double mean_x;
  double sxx;  // sum (x - mean_x)^2
};

inline Spread spread(std::span<const double> xs) {
  if (xs.size() < 2) throw InsufficientDataError("fit needs at least 2 points");
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double sxx = 0.0;
  for (double x : xs) sxx += (x - m) * (x - m);
  if (!(sxx > 0.0)) throw DegenerateDesignError("all x values are equal");
  return {m, sxx};
}

}  // namespace detail

/// sigma / sqrt(sum (x - x̄)^2)
inline double sigma_a(std::span<const double> xs, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma_a: sigma must be > 0");
  return sigma / std::sqrt(detail::spread(xs).sxx);
}

/// sigma sqrt(1/N + x̄^2 / sum (x - x̄)^2)
inline double sigma_b(std::span<const double> xs, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma_b: sigma must be > 0");
  const auto s = detail::spread(xs);
  return sigma * std::sqrt(1.0 / static_cast<double>(xs.size()) + s.mean_x * s.mean_x / s.sxx);
}

/// Unbiased residual variance sum eps^2 / (n - 2).
inline double residual_variance(std::span<const double> residuals) {
  if (residuals.size() < 3) throw InsufficientDataError("residual variance needs n >= 3");
  double ss = 0.0;
  for (double e : residuals) ss += e * e;
  return ss / static_cast<double>(residuals.size() - 2);
}

/// sqrt(sum eps^2 / (n - 2)); n must match the fit's residual count.
inline double residual_sigma(const LinearFit& fit, std::size_t n) {
  if (n < 3) throw InsufficientDataError("residual sigma needs n >= 3");
  if (n != fit.residuals.size()) throw ParameterError("residual_sigma: n does not match the fit");
  return std::sqrt(residual_variance(fit.residuals));
}

/// Ordinary least squares. The sigmas column, if any, is ignored.
/// Parameter uncertainties use `known_sigma` when given, otherwise the
/// residual estimate (NaN for a two-point fit).
inline LinearFit fit_ols(const Dataset& ds, std::optional<double> known_sigma = std::nullopt) {
  ds.validate();
  if (known_sigma && !(*known_sigma > 0.0)) throw ParameterError("fit_ols: known sigma must be > 0");
  const auto s = detail::spread(ds.xs);
  const std::size_t n = ds.size();
  double mean_y = 0.0;
  for (double y : ds.ys) mean_y += y;
  mean_y /= static_cast<double>(n);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (ds.ys[i] - mean_y) * (ds.xs[i] - s.mean_x);

  LinearFit fit;
  fit.n = n;
  fit.a = sxy / s.sxx;
  fit.b = mean_y - fit.a * s.mean_x;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = ds.ys[i] - fit.predict(ds.xs[i]);
    fit.chi2 += fit.residuals[i] * fit.residuals[i];
  }
  fit.sigma_eps = n >= 3 ? residual_sigma(fit, n) : std::numeric_limits<double>::quiet_NaN();

  const double sigma = known_sigma ? *known_sigma : fit.sigma_eps;
  fit.sigma_from_residuals = !known_sigma;
  fit.sigma_a = sigma / std::sqrt(s.sxx);
  fit.sigma_b = sigma * std::sqrt(1.0 / static_cast<double>(n) + s.mean_x * s.mean_x / s.sxx);
  return fit;
}

/// Weighted least squares minimizing sum ((y - a x - b) / sigma_i)^2.
/// Uncertainties come from the inverse of the weighted normal matrix.
inline LinearFit fit_wls(const Dataset& ds) {
  if (!ds.sigmas) throw ParameterError("fit_wls: dataset has no sigmas");
  ds.validate();
  const std::size_t n = ds.size();
  if (n < 2) throw InsufficientDataError("fit needs at least 2 points");
  const auto& sig = *ds.sigmas;

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / (sig[i] * sig[i]);
    sw += w;
    swx += w * ds.xs[i];
    swy += w * ds.ys[i];
  }
  const double xw = swx / sw;
  const double yw = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / (sig[i] * sig[i]);
    const double dx = ds.xs[i] - xw;
    sxx += w * dx * dx;
    sxy += w * dx * (ds.ys[i] - yw);
  }
  // Relative test: weights can span many orders of magnitude.
  double max_dx = 0.0;
  for (double x : ds.xs) max_dx = std::max(max_dx, std::fabs(x - ds.xs.front()));
  if (!(max_dx > 0.0) || !(sxx > 0.0)) throw DegenerateDesignError("all x values are equal");

  LinearFit fit;
  fit.n = n;
  fit.weighted = true;
  fit.a = sxy / sxx;
  fit.b = yw - fit.a * xw;
  fit.sigma_a = std::sqrt(1.0 / sxx);
  fit.sigma_b = std::sqrt(1.0 / sw + xw * xw / sxx);
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = ds.ys[i] - fit.predict(ds.xs[i]);
    const double r = fit.residuals[i] / sig[i];
    fit.chi2 += r * r;
  }
  fit.sigma_eps = n >= 3 ? residual_sigma(fit, n) : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

/// Confidence intervals on (a, b): Student with N-2 dof when the noise level
/// came from the residuals, normal-law factors otherwise.
inline std::pair<Interval, Interval> parameter_intervals(const LinearFit& fit, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("confidence must lie in (0, 1)");
  double k;
  if (fit.sigma_from_residuals) {
    if (fit.n < 3) throw InsufficientDataError("intervals from residuals need n >= 3");
    k = student_coefficient(static_cast<double>(fit.n - 2), confidence);
  } else {
    // Normal quantile by bisection on the coverage function.
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (normal_coverage(mid) < confidence ? lo : hi) = mid;
    }
    k = 0.5 * (lo + hi);
  }
  return {Interval{fit.a - k * fit.sigma_a, fit.a + k * fit.sigma_a},
          Interval{fit.b - k * fit.sigma_b, fit.b + k * fit.sigma_b}};
}

}  // namespace inferlab
