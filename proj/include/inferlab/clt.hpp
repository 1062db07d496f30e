#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "inferlab/distributions.hpp"
#include "inferlab/error.hpp"
#include "inferlab/estimators.hpp"
#include "inferlab/random.hpp"
#include "inferlab/regression.hpp"

namespace inferlab {

struct CltConfig {
  Distribution dist = Uniform{0.0, 10.0};
  std::size_t group_size = 1;   // N draws averaged per replicate
  std::size_t repetitions = 1;  // P replicates
  std::uint64_t seed = 0;
};

/// std of replicate means against n, with the least-squares line in log-log space.
struct ScalingCurve {
  std::vector<std::size_t> ns;
  std::vector<double> stds;
  double loglog_slope = 0.0;
  double loglog_intercept = 0.0;
};

/// P means of N draws each. Replicate p draws from
/// RandomSource(seed).split(0).split(p), so the result does not depend on
/// `threads`. The extra split keeps nearby seeds from sharing replicate streams.
inline std::vector<double> mean_sampling_distribution(const CltConfig& cfg, unsigned threads = 1) {
  validate(cfg.dist);
  if (cfg.group_size < 1 || cfg.repetitions < 1) throw ParameterError("clt: N and P must be >= 1");
  const RandomSource root = RandomSource(cfg.seed).split(0);
  std::vector<double> means(cfg.repetitions);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      RandomSource rng = root.split(p);
      double sum = 0.0;
      for (std::size_t i = 0; i < cfg.group_size; ++i) sum += sample_one(cfg.dist, rng);
      means[p] = sum / static_cast<double>(cfg.group_size);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, cfg.repetitions);
    return means;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (cfg.repetitions + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(cfg.repetitions, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return means;
}

/// Fraction of means within [center - halfwidth, center + halfwidth].
inline double coverage_ratio(std::span<const double> means, double center, double halfwidth) {
  if (means.empty()) throw InsufficientDataError("coverage_ratio: no means");
  if (!(halfwidth > 0.0)) throw ParameterError("coverage_ratio: halfwidth must be > 0");
  std::size_t inside = 0;
  for (double m : means)
    if (m >= center - halfwidth && m <= center + halfwidth) ++inside;
  return static_cast<double>(inside) / static_cast<double>(means.size());
}

/// Roughly `points` log-spaced integers in [nmin, nmax], deduplicated.
inline std::vector<std::size_t> log_spaced_counts(std::size_t nmin, std::size_t nmax, std::size_t points) {
  if (nmin < 1 || nmax < nmin || points < 1) throw ParameterError("log_spaced_counts: bad range");
  std::vector<std::size_t> ns;
  if (points == 1 || nmin == nmax) return {nmin};
  const double lmin = std::log(static_cast<double>(nmin));
  const double lmax = std::log(static_cast<double>(nmax));
  for (std::size_t i = 0; i < points; ++i) {
    const double l = lmin + (lmax - lmin) * static_cast<double>(i) / static_cast<double>(points - 1);
    auto n = static_cast<std::size_t>(std::llround(std::exp(l)));
    n = std::clamp(n, nmin, nmax);
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }
  return ns;
}

inline void fit_loglog(ScalingCurve& curve) {
  if (curve.ns.size() < 2) {
    curve.loglog_slope = 0.0;
    curve.loglog_intercept = curve.stds.empty() ? 0.0 : std::log(curve.stds.front());
    return;
  }
  Dataset ds;
  for (std::size_t i = 0; i < curve.ns.size(); ++i) {
    ds.xs.push_back(std::log(static_cast<double>(curve.ns[i])));
    ds.ys.push_back(std::log(curve.stds[i]));
  }
  const LinearFit fit = fit_ols(ds);
  curve.loglog_slope = fit.a;
  curve.loglog_intercept = fit.b;
}

/// For each n: the unbiased std of `reps` means of n draws.
inline ScalingCurve std_scaling_curve(const Distribution& dist, std::span<const std::size_t> ns,
                                      std::size_t reps, RandomSource& rng) {
  validate(dist);
  if (ns.empty()) throw ParameterError("scaling: empty n list");
  if (reps < 100) throw ParameterError("scaling: reps must be >= 100");
  ScalingCurve curve;
  std::vector<double> means(reps);
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::size_t n = ns[k];
    if (n < 1) throw ParameterError("scaling: every n must be >= 1");
    if (k > 0 && n <= ns[k - 1]) throw ParameterError("scaling: ns must be strictly increasing");
    for (auto& m : means) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += sample_one(dist, rng);
      m = sum / static_cast<double>(n);
    }
    curve.ns.push_back(n);
    curve.stds.push_back(sample_std(means));
  }
  fit_loglog(curve);
  return curve;
}

/// Running-mean std for the dependent sequence x_0 ~ N(0, 1),
/// x_{i+1} ~ N(mean(x_0..x_i), 1), reported at the given checkpoints
/// (each a prefix length, strictly increasing).
inline ScalingCurve correlated_walk_std(std::span<const std::size_t> checkpoints, std::size_t reps,
                                        RandomSource& rng) {
  if (reps < 2) throw InsufficientDataError("correlated walk: std needs reps >= 2");
  if (checkpoints.empty()) throw ParameterError("correlated walk: no checkpoints");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 1) throw ParameterError("correlated walk: checkpoints must be >= 1");
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1])
      throw ParameterError("correlated walk: checkpoints must be strictly increasing");
  }
  const std::size_t n_max = checkpoints.back();
  std::vector<std::vector<double>> at_checkpoint(checkpoints.size(), std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r) {
    double running_mean = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < n_max; ++i) {
      const double x = running_mean + rng.normal();
      running_mean += (x - running_mean) / static_cast<double>(i + 1);
      if (i + 1 == checkpoints[next]) at_checkpoint[next++][r] = running_mean;
    }
  }
  ScalingCurve curve;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    curve.ns.push_back(checkpoints[k]);
    curve.stds.push_back(sample_std(at_checkpoint[k]));
  }
  fit_loglog(curve);
  return curve;
}

/// Slope outside -1/2 ± 0.2: the 1/sqrt(n) law does not hold.
inline bool is_non_convergent(const ScalingCurve& curve) { return std::fabs(curve.loglog_slope + 0.5) > 0.2; }

inline bool is_monotone_decreasing(const ScalingCurve& curve) {
  for (std::size_t i = 1; i < curve.stds.size(); ++i)
    if (!(curve.stds[i] < curve.stds[i - 1])) return false;
  return true;
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double center() const { return 0.5 * (lo + hi); }
};

/// Equal-width bins spanning [min, max] of the data; the max lands in the last bin.
inline std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins = 101) {
  if (values.empty()) throw InsufficientDataError("histogram: no values");
  if (bins < 1) throw ParameterError("histogram: bins must be >= 1");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lo = lo + width * static_cast<double>(i);
    out[i].hi = i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1);
  }
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++out[idx].count;
  }
  return out;
}

}  // namespace inferlab
