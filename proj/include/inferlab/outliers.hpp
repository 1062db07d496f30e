#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "inferlab/bayes.hpp"
#include "inferlab/case_models.hpp"
#include "inferlab/ensemble.hpp"
#include "inferlab/random.hpp"

namespace inferlab {

struct OutlierFitConfig {
  std::size_t nwalkers = 50;
  std::size_t nsteps = 15000;
  std::size_t nburn = 10000;
  double sigma_b = 100.0;
  double g0 = 0.5;
  std::uint64_t seed = 0;
};

struct OutlierFit {
  FlatSamples samples;                 // [b, a, g_1 .. g_N] after burn-in
  std::vector<double> g_mean;          // posterior mean of each g_i
  std::vector<std::size_t> outliers;   // indices with g_mean < g0, ascending
  double mean_acceptance = 0.0;
};

/// b ~ N(-5, 10), a ~ N(2, 5), g_i ~ N(0.5, 0.25); unsupported rows redrawn.
inline std::vector<double> mixture_initial_walkers(const MixtureRegressionModel& model, std::size_t nwalkers,
                                                   RandomSource& rng) {
  std::vector<double> center(model.dimension(), 0.5), scale(model.dimension(), 0.25);
  center[0] = -5.0;
  scale[0] = 10.0;
  center[1] = 2.0;
  scale[1] = 5.0;
  return gaussian_ball(model, nwalkers, center, scale, rng);
}

inline std::vector<std::size_t> classify_outliers(const FlatSamples& samples, double g0,
                                                  std::vector<double>* g_mean = nullptr) {
  const auto means = column_means(samples);
  std::vector<std::size_t> flagged;
  for (std::size_t i = 2; i < means.size(); ++i)
    if (means[i] < g0) flagged.push_back(i - 2);
  if (g_mean) g_mean->assign(means.begin() + 2, means.end());
  return flagged;
}

/// Samples the mixture posterior and flags outliers. The initializer and the
/// sampler use independent streams split from cfg.seed.
inline OutlierFit fit_outliers(const Dataset& data, const OutlierFitConfig& cfg) {
  MixtureRegressionModel model(data, cfg.sigma_b, cfg.g0);
  const RandomSource root(cfg.seed);
  RandomSource init_rng = root.split(0);
  const auto init = mixture_initial_walkers(model, cfg.nwalkers, init_rng);
  SamplerConfig sc{cfg.nwalkers, cfg.nsteps, cfg.nburn, 2.0, root.split(1).seed()};
  const EnsembleChain chain = run(model, init, sc);

  OutlierFit out;
  out.samples = flatten(chain, cfg.nburn);
  out.outliers = classify_outliers(out.samples, cfg.g0, &out.g_mean);
  out.mean_acceptance = chain.mean_acceptance_fraction();
  return out;
}

struct BandPoint {
  double x = 0.0;
  double mean = 0.0;
  double lo = 0.0;  // mean - k std
  double hi = 0.0;  // mean + k std
};

/// Pointwise band of y = a x + b over (b, a) samples (columns 0 and 1).
inline std::vector<BandPoint> credible_band(const FlatSamples& samples, std::span<const double> xs, double k = 2.0) {
  if (samples.dim < 2) throw ParameterError("credible_band: samples need (b, a) columns");
  if (samples.rows() < 2) throw InsufficientDataError("credible_band: need at least 2 samples");
  std::vector<BandPoint> band;
  const auto rows = static_cast<double>(samples.rows());
  for (double x : xs) {
    double s = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < samples.rows(); ++r) {
      const double y = samples(r, 1) * x + samples(r, 0);
      s += y;
      ss += y * y;
    }
    const double m = s / rows;
    const double sd = std::sqrt(std::max(0.0, (ss - rows * m * m) / (rows - 1.0)));
    band.push_back({x, m, m - k * sd, m + k * sd});
  }
  return band;
}

}  // namespace inferlab
