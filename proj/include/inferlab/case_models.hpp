#pragma once

// Concrete inference problems: radioactive activity (one and two
// parameters), resistance with a tolerance or Gaussian prior, machine
// failure onset, lighthouse position, and line fitting with outliers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "inferlab/bayes.hpp"
#include "inferlab/distributions.hpp"
#include "inferlab/error.hpp"
#include "inferlab/estimators.hpp"
#include "inferlab/random.hpp"
#include "inferlab/regression.hpp"
#include "inferlab/special_functions.hpp"

namespace inferlab {

// ---------------------------------------------------------------------------
// Activity

/// Counts per second with Poisson standard deviations e_i = sqrt(A_i).
struct ActivityData {
  std::vector<double> counts;
  std::vector<double> errors;

  std::size_t size() const { return counts.size(); }

  static ActivityData from_counts(std::vector<double> counts) {
    ActivityData d;
    for (double a : counts)
      if (!(a > 0.0)) throw ParameterError("activity: counts must be > 0");
    d.errors.reserve(counts.size());
    for (double a : counts) d.errors.push_back(std::sqrt(a));
    d.counts = std::move(counts);
    return d;
  }
};

inline ActivityData activity_generate(double a0, std::size_t n, RandomSource& rng) {
  if (!(a0 > 0.0)) throw ParameterError("activity_generate: A0 must be > 0");
  std::vector<double> counts = sample(Poisson{a0}, rng, n);
  for (double& c : counts) c = std::max(c, 1.0);  // zero counts have no sqrt(A) error
  return ActivityData::from_counts(std::move(counts));
}

/// sum_i [-1/2 ln(2 pi e_i^2) - (A_i - A)^2 / (2 e_i^2)]
inline double activity_loglike(double activity, const ActivityData& data) {
  if (data.counts.empty()) throw InsufficientDataError("activity_loglike: no data");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double var = data.errors[i] * data.errors[i];
    const double d = data.counts[i] - activity;
    total += -0.5 * std::log(2.0 * kPi * var) - d * d / (2.0 * var);
  }
  return total;
}

/// Flat prior on A.
struct ActivityModel {
  ActivityData data;
  std::size_t dimension() const { return 1; }
  double log_prior(std::span<const double>) const { return 0.0; }
  double log_likelihood(std::span<const double> theta) const { return activity_loglike(theta[0], data); }
};

/// Inverse-variance-weighted mean of the counts (the flat-prior MAP).
inline double weighted_mean(const ActivityData& data) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = 1.0 / (data.errors[i] * data.errors[i]);
    num += w * data.counts[i];
    den += w;
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Activity with intrinsic scatter: theta = [mu_A, sigma_A]

struct ScatterParams {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Counts from a fluctuating source: A0_i ~ N(mu, sigma_A), A_i ~ Poisson(A0_i).
inline ActivityData scatter_generate(double mu, double sigma_a, std::size_t n, RandomSource& rng) {
  if (!(mu > 0.0) || !(sigma_a >= 0.0)) throw ParameterError("scatter_generate: bad parameters");
  std::vector<double> counts;
  counts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double source = sigma_a > 0.0 ? sample_one(Normal{mu, sigma_a}, rng) : mu;
    counts.push_back(std::max(1.0, sample_one(Poisson{std::max(source, 1e-9)}, rng)));
  }
  return ActivityData::from_counts(std::move(counts));
}

/// Gaussian with combined variance sigma_A^2 + e_i^2.
inline double scatter_loglike(const ScatterParams& p, const ActivityData& data) {
  if (!(p.sigma >= 0.0)) return -kInf;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double var = p.sigma * p.sigma + data.errors[i] * data.errors[i];
    const double d = data.counts[i] - p.mu;
    total += -0.5 * std::log(2.0 * kPi * var) - d * d / (2.0 * var);
  }
  return total;
}

/// Flat prior on mu, sigma_A > 0.
struct ScatterModel {
  ActivityData data;
  std::size_t dimension() const { return 2; }
  double log_prior(std::span<const double> theta) const { return theta[1] > 0.0 ? 0.0 : -kInf; }
  double log_likelihood(std::span<const double> theta) const {
    return scatter_loglike({theta[0], theta[1]}, data);
  }
};

// ---------------------------------------------------------------------------
// Resistance

/// Flat on the open band (nominal (1 - tol), nominal (1 + tol)).
struct UniformTolerance {
  double nominal = 500.0;
  double tolerance = 0.05;
};

struct GaussianPrior {
  double mu = 490.0;
  double sigma = 2.0;
};

using ResistancePrior = std::variant<UniformTolerance, GaussianPrior>;

struct ResistanceCase {
  std::vector<double> readings;  // ohms
  double sigma_r = 5.0;
  ResistancePrior prior = UniformTolerance{};
};

inline double resistance_log_prior(const ResistancePrior& prior, double r0) {
  if (const auto* u = std::get_if<UniformTolerance>(&prior)) {
    return (r0 > u->nominal * (1.0 - u->tolerance) && r0 < u->nominal * (1.0 + u->tolerance)) ? 0.0 : -kInf;
  }
  const auto& g = std::get<GaussianPrior>(prior);
  const double z = (r0 - g.mu) / g.sigma;
  return -0.5 * z * z;
}

struct ResistanceModel {
  ResistanceCase problem;

  std::size_t dimension() const { return 1; }
  double log_prior(std::span<const double> theta) const { return resistance_log_prior(problem.prior, theta[0]); }
  double log_likelihood(std::span<const double> theta) const {
    double total = 0.0;
    for (double r : problem.readings) {
      const double d = theta[0] - r;
      total -= d * d / (2.0 * problem.sigma_r * problem.sigma_r);
    }
    return total;
  }
};

inline void validate(const ResistanceCase& c) {
  if (!(c.sigma_r > 0.0)) throw ParameterError("resistance: sigma_R must be > 0");
  if (const auto* u = std::get_if<UniformTolerance>(&c.prior)) {
    if (!(u->tolerance > 0.0) || !(u->nominal > 0.0)) throw ParameterError("resistance: bad tolerance prior");
  } else if (!(std::get<GaussianPrior>(c.prior).sigma > 0.0)) {
    throw ParameterError("resistance: Gaussian prior sigma must be > 0");
  }
}

/// Readings R_i ~ N(R_true, sigma_R).
inline std::vector<double> resistance_generate(double r_true, double sigma_r, std::size_t n, RandomSource& rng) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(Normal{r_true, sigma_r}, rng));
  return out;
}

/// Normalized posterior over R0 on n nodes of [lo, hi]. With no readings the
/// grid is the prior itself.
inline PosteriorGrid1D resistance_posterior(const ResistanceCase& c, double lo, double hi, std::size_t n) {
  validate(c);
  return grid_posterior_1d(ResistanceModel{c}, lo, hi, n);
}

// ---------------------------------------------------------------------------
// Failure onset (truncated exponential)

struct FailureData {
  std::vector<double> times;  // weeks

  void validate() const {
    if (times.empty()) throw InsufficientDataError("failure: no data");
    for (double t : times)
      if (!(t > 0.0)) throw ParameterError("failure: times must be > 0");
  }
  double earliest() const { return *std::min_element(times.begin(), times.end()); }
};

struct ClassicalEstimate {
  double theta_hat = 0.0;
  Interval ci;
};

/// theta_hat = mean(t) - 1, interval theta_hat ± 1/sqrt(n).
inline ClassicalEstimate failure_classical(const FailureData& d) {
  d.validate();
  const double theta = sample_mean(d.times) - 1.0;
  const double half = 1.0 / std::sqrt(static_cast<double>(d.times.size()));
  return {theta, {theta - half, theta + half}};
}

/// sum (theta - t_i) for theta <= min(t), -inf beyond. The theta-independent
/// normalization is dropped.
inline double failure_loglike(double theta, const FailureData& d) {
  if (theta > d.earliest()) return -kInf;
  double total = 0.0;
  for (double t : d.times) total += theta - t;
  return total;
}

struct FailureModel {
  FailureData data;
  std::size_t dimension() const { return 1; }
  double log_prior(std::span<const double>) const { return 0.0; }
  double log_likelihood(std::span<const double> theta) const { return failure_loglike(theta[0], data); }
};

/// Analytic shortest interval: [min(t) + ln(1 - mass)/n, min(t)].
inline CredibleInterval failure_credible(const FailureData& d, double mass) {
  d.validate();
  if (!(mass > 0.0 && mass < 1.0)) throw ParameterError("failure_credible: mass must lie in (0, 1)");
  const double hi = d.earliest();
  return {hi + std::log1p(-mass) / static_cast<double>(d.times.size()), hi, mass, false};
}

// ---------------------------------------------------------------------------
// Lighthouse

struct LighthouseData {
  std::vector<double> positions;  // km along the shore
};

/// Flash angles uniform on (-pi/2, pi/2); x = alpha + beta tan(angle).
template <UniformSource Rng>
LighthouseData lighthouse_generate(double alpha, double beta, std::size_t n, Rng& rng) {
  if (!(beta > 0.0)) throw ParameterError("lighthouse_generate: beta must be > 0");
  if (n < 1) throw ParameterError("lighthouse_generate: n must be >= 1");
  LighthouseData d;
  d.positions.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = kPi * (rng.uniform() - 0.5);
    d.positions.push_back(alpha + beta * std::tan(angle));
  }
  return d;
}

/// n ln(beta) - sum ln(beta^2 + (x_k - alpha)^2); -inf for beta <= 0.
inline double lighthouse_loglike(double alpha, double beta, std::span<const double> xs) {
  if (!(beta > 0.0)) return -kInf;
  double total = static_cast<double>(xs.size()) * std::log(beta);
  for (double x : xs) total -= std::log(beta * beta + (x - alpha) * (x - alpha));
  return total;
}

/// Fixed-beta variant; the n ln(beta) constant is dropped.
inline double lighthouse_loglike_alpha(double alpha, double beta, std::span<const double> xs) {
  if (!(beta > 0.0)) return -kInf;
  double total = 0.0;
  for (double x : xs) total -= std::log(beta * beta + (x - alpha) * (x - alpha));
  return total;
}

/// alpha only, beta known; flat prior on [alpha_lo, alpha_hi].
struct LighthouseAlphaModel {
  LighthouseData data;
  double beta = 1.0;
  double alpha_lo = -kInf;
  double alpha_hi = kInf;

  std::size_t dimension() const { return 1; }
  double log_prior(std::span<const double> theta) const {
    return (theta[0] >= alpha_lo && theta[0] <= alpha_hi) ? 0.0 : -kInf;
  }
  double log_likelihood(std::span<const double> theta) const {
    return lighthouse_loglike_alpha(theta[0], beta, data.positions);
  }
};

/// (alpha, beta), flat on alpha_lo < alpha < alpha_hi, beta_lo < beta < beta_hi.
struct LighthouseModel {
  LighthouseData data;
  double alpha_lo = -50.0;
  double alpha_hi = 50.0;
  double beta_lo = 0.0;
  double beta_hi = 50.0;

  std::size_t dimension() const { return 2; }
  double log_prior(std::span<const double> theta) const {
    return (theta[0] > alpha_lo && theta[0] < alpha_hi && theta[1] > beta_lo && theta[1] < beta_hi) ? 0.0 : -kInf;
  }
  double log_likelihood(std::span<const double> theta) const {
    return lighthouse_loglike(theta[0], theta[1], data.positions);
  }
};

// ---------------------------------------------------------------------------
// Line fit with outliers: theta = [b, a, g_1 .. g_N]

/// Each point either follows N(a x_i + b, sigma_i) (g_i above the threshold)
/// or the outlier law N(Y_A, sigma_B) with Y_A = mean(y). The branch switch
/// f(g_i) is binary.
class MixtureRegressionModel {
 public:
  MixtureRegressionModel(Dataset data, double sigma_b, double g0 = 0.5)
      : data_(std::move(data)), sigma_b_(sigma_b), g0_(g0) {
    data_.validate();
    if (!data_.sigmas) throw ParameterError("mixture: dataset needs per-point sigmas");
    if (data_.size() < 1) throw InsufficientDataError("mixture: empty dataset");
    if (!(sigma_b_ > 0.0)) throw ParameterError("mixture: sigma_B must be > 0");
    if (!(g0_ > 0.0 && g0_ < 1.0)) throw ParameterError("mixture: g0 must lie in (0, 1)");
    y_outlier_ = sample_mean(data_.ys);
  }

  std::size_t dimension() const { return data_.size() + 2; }
  const Dataset& data() const { return data_; }
  double sigma_b() const { return sigma_b_; }
  double g0() const { return g0_; }
  double outlier_center() const { return y_outlier_; }

  /// 0 when every g_i lies in the open interval (0, 1), else -inf. Flat in (a, b).
  double log_prior(std::span<const double> theta) const {
    check(theta);
    for (std::size_t i = 2; i < theta.size(); ++i)
      if (!(theta[i] > 0.0 && theta[i] < 1.0)) return -kInf;
    return 0.0;
  }

  double log_likelihood(std::span<const double> theta) const {
    check(theta);
    const double b = theta[0];
    const double a = theta[1];
    const auto& sig = *data_.sigmas;
    const double log_norm_b = -0.5 * std::log(2.0 * kPi * sigma_b_ * sigma_b_);
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double f = theta[i + 2] > g0_ ? 1.0 : 0.0;
      const double dy = (data_.ys[i] - b - a * data_.xs[i]) / sig[i];
      const double dy_out = (y_outlier_ - data_.ys[i]) / sigma_b_;
      const double inlier = std::log(f) - 0.5 * std::log(2.0 * kPi * sig[i] * sig[i]) - 0.5 * dy * dy;
      const double outlier = std::log(1.0 - f) + log_norm_b - 0.5 * dy_out * dy_out;
      total += log_add_exp(inlier, outlier);
    }
    return total;
  }

 private:
  void check(std::span<const double> theta) const {
    if (theta.size() != dimension()) throw ParameterError("mixture: theta must have N + 2 entries");
  }

  Dataset data_;
  double sigma_b_;
  double g0_;
  double y_outlier_ = 0.0;
};

inline double mixture_logprior(std::span<const double> theta, const MixtureRegressionModel& model) {
  return model.log_prior(theta);
}

inline double mixture_loglike(std::span<const double> theta, const MixtureRegressionModel& model) {
  return model.log_likelihood(theta);
}

struct OutlierDataset {
  Dataset data;
  std::vector<std::size_t> outlier_indices;  // ascending
};

/// Synthetic line with injected outliers: x = 0.5 + sorted 99 U(0,1),
/// sigma = 2 + 20 U(0,1), y = a x + b + N(0, sigma), then distinct indices
/// drawn from [0, N-2] receive the outlier values.
inline OutlierDataset outlier_dataset(RandomSource& rng, double a = 2.0, double b = -5.0, std::size_t n = 20,
                                      std::vector<double> outlier_values = {174.5, 115.9, 95.9}) {
  if (n < outlier_values.size() + 2) throw ParameterError("outlier_dataset: too few points");
  OutlierDataset out;
  auto& ds = out.data;
  for (std::size_t i = 0; i < n; ++i) ds.xs.push_back(0.5 + 99.0 * rng.uniform());
  std::sort(ds.xs.begin(), ds.xs.end());
  std::vector<double> sig;
  for (std::size_t i = 0; i < n; ++i) sig.push_back(2.0 + 20.0 * rng.uniform());
  for (std::size_t i = 0; i < n; ++i) ds.ys.push_back(a * ds.xs[i] + b + sig[i] * rng.normal());
  ds.sigmas = std::move(sig);

  std::vector<std::size_t> chosen;
  while (chosen.size() < outlier_values.size()) {
    const auto idx = static_cast<std::size_t>(rng.uniform_index(n - 1));
    if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
  }
  for (std::size_t k = 0; k < chosen.size(); ++k) ds.ys[chosen[k]] = outlier_values[k];
  std::sort(chosen.begin(), chosen.end());
  out.outlier_indices = std::move(chosen);
  return out;
}

}  // namespace inferlab
