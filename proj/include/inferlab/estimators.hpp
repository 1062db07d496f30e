#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "inferlab/error.hpp"

namespace inferlab {

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> std_unbiased;    // sigma_{n-1}, needs n >= 2
  std::optional<double> std_known_mean;  // S, with the supplied expectation
};

inline double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("mean of empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

/// sigma_{n-1}: sqrt(sum (x - mean)^2 / (n - 1)).
inline double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) throw InsufficientDataError("unbiased std needs at least 2 values");
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Without known_mean the unbiased std is requested, so n >= 2 is required.
inline SampleStats summarize(std::span<const double> xs, std::optional<double> known_mean = std::nullopt) {
  if (xs.empty() || (!known_mean && xs.size() < 2))
    throw InsufficientDataError("summarize: not enough values");
  SampleStats stats;
  stats.n = xs.size();
  stats.mean = sample_mean(xs);
  if (xs.size() >= 2) stats.std_unbiased = sample_std(xs);
  if (known_mean) {
    double ss = 0.0;
    for (double x : xs) ss += (x - *known_mean) * (x - *known_mean);
    stats.std_known_mean = std::sqrt(ss / static_cast<double>(xs.size()));
  }
  return stats;
}

/// Sample skewness g1 (population moments).
inline double skewness(std::span<const double> xs) {
  if (xs.size() < 3) throw InsufficientDataError("skewness needs at least 3 values");
  const double m = sample_mean(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

/// Excess kurtosis g2 = m4 / m2^2 - 3.
inline double excess_kurtosis(std::span<const double> xs) {
  if (xs.size() < 4) throw InsufficientDataError("kurtosis needs at least 4 values");
  const double m = sample_mean(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d2 = (x - m) * (x - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

/// Linear-interpolated quantile (type 7), q in [0, 1].
inline double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw InsufficientDataError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile: q outside [0, 1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double median(std::span<const double> xs) { return quantile(xs, 0.5); }

}  // namespace inferlab
