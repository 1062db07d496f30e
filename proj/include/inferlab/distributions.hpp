#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "inferlab/error.hpp"
#include "inferlab/random.hpp"
#include "inferlab/special_functions.hpp"

namespace inferlab {

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Normal {
  double mu = 0.0;
  double sigma = 1.0;
};

struct Poisson {
  double lambda = 1.0;
};

struct Cauchy {
  double center = 0.0;
  double scale = 1.0;
};

/// Failure-time law p(t | theta) = exp(theta - t) for t >= theta.
struct TruncatedExponential {
  double theta = 0.0;
};

using Distribution = std::variant<Uniform, Normal, Poisson, Cauchy, TruncatedExponential>;

inline void validate(const Distribution& dist) {
  std::visit(
      [](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Uniform>) {
          if (!(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi))
            throw ParameterError("uniform: requires finite lo < hi");
        } else if constexpr (std::is_same_v<D, Normal>) {
          if (!std::isfinite(d.mu) || !(d.sigma > 0.0) || !std::isfinite(d.sigma))
            throw ParameterError("normal: requires sigma > 0");
        } else if constexpr (std::is_same_v<D, Poisson>) {
          if (!(d.lambda > 0.0) || !std::isfinite(d.lambda))
            throw ParameterError("poisson: requires lambda > 0");
        } else if constexpr (std::is_same_v<D, Cauchy>) {
          if (!std::isfinite(d.center) || !(d.scale > 0.0) || !std::isfinite(d.scale))
            throw ParameterError("cauchy: requires scale > 0");
        } else {
          if (!std::isfinite(d.theta)) throw ParameterError("truncated exponential: theta must be finite");
        }
      },
      dist);
}

namespace detail {

// Sequential-search inversion, used for small means.
template <UniformSource Rng>
double poisson_inversion(double lambda, Rng& rng) {
  double p = std::exp(-lambda);
  double cumulative = p;
  const double u = rng.uniform();
  double k = 0.0;
  while (u > cumulative) {
    k += 1.0;
    p *= lambda / k;
    cumulative += p;
    if (p == 0.0 && cumulative <= u) break;  // u beyond representable tail
  }
  return k;
}

// Transformed rejection with squeeze (Hormann's PTRS), exact for lambda >= 10.
template <UniformSource Rng>
double poisson_ptrs(double lambda, Rng& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0))
      return k;
  }
}

inline constexpr double kPoissonInversionLimit = 30.0;

}  // namespace detail

/// One variate. Normal draws use RandomSource::normal() when available.
template <UniformSource Rng>
double sample_one(const Distribution& dist, Rng& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Uniform>) {
          return d.lo + (d.hi - d.lo) * rng.uniform();
        } else if constexpr (std::is_same_v<D, Normal>) {
          if constexpr (requires { rng.normal(); }) {
            return d.mu + d.sigma * rng.normal();
          } else {
            double u, v, s;
            do {
              u = 2.0 * rng.uniform() - 1.0;
              v = 2.0 * rng.uniform() - 1.0;
              s = u * u + v * v;
            } while (s >= 1.0 || s == 0.0);
            return d.mu + d.sigma * u * std::sqrt(-2.0 * std::log(s) / s);
          }
        } else if constexpr (std::is_same_v<D, Poisson>) {
          return d.lambda < detail::kPoissonInversionLimit ? detail::poisson_inversion(d.lambda, rng)
                                                           : detail::poisson_ptrs(d.lambda, rng);
        } else if constexpr (std::is_same_v<D, Cauchy>) {
          return d.center + d.scale * std::tan(kPi * (rng.uniform() - 0.5));
        } else {
          return d.theta - std::log1p(-rng.uniform());
        }
      },
      dist);
}

/// n i.i.d. variates.
template <UniformSource Rng>
std::vector<double> sample(const Distribution& dist, Rng& rng, std::size_t n) {
  validate(dist);
  if (n == 0) throw ParameterError("sample: n must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(dist, rng));
  return out;
}

/// Natural log of the density (or mass, for Poisson). -inf outside the support.
inline double log_pdf(const Distribution& dist, double x) {
  validate(dist);
  return std::visit(
      [x](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Uniform>) {
          return (x >= d.lo && x <= d.hi) ? -std::log(d.hi - d.lo) : -kInf;
        } else if constexpr (std::is_same_v<D, Normal>) {
          const double z = (x - d.mu) / d.sigma;
          return -0.5 * z * z - std::log(d.sigma) - 0.5 * std::log(2.0 * kPi);
        } else if constexpr (std::is_same_v<D, Poisson>) {
          if (x < 0.0 || x != std::floor(x)) return -kInf;
          return x * std::log(d.lambda) - d.lambda - std::lgamma(x + 1.0);
        } else if constexpr (std::is_same_v<D, Cauchy>) {
          const double z = (x - d.center) / d.scale;
          return -std::log(kPi * d.scale) - std::log1p(z * z);
        } else {
          return x >= d.theta ? d.theta - x : -kInf;
        }
      },
      dist);
}

/// Cumulative distribution function.
inline double cdf(const Distribution& dist, double x) {
  validate(dist);
  return std::visit(
      [x](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Uniform>) {
          if (x <= d.lo) return 0.0;
          if (x >= d.hi) return 1.0;
          return (x - d.lo) / (d.hi - d.lo);
        } else if constexpr (std::is_same_v<D, Normal>) {
          return normal_cdf((x - d.mu) / d.sigma);
        } else if constexpr (std::is_same_v<D, Poisson>) {
          if (x < 0.0) return 0.0;
          const double k = std::floor(x);
          double p = std::exp(-d.lambda);
          double sum = p;
          for (double i = 1.0; i <= k; i += 1.0) {
            p *= d.lambda / i;
            sum += p;
          }
          return sum > 1.0 ? 1.0 : sum;
        } else if constexpr (std::is_same_v<D, Cauchy>) {
          return 0.5 + std::atan((x - d.center) / d.scale) / kPi;
        } else {
          return x <= d.theta ? 0.0 : -std::expm1(d.theta - x);
        }
      },
      dist);
}

/// Expectation, when it exists (Cauchy has none).
inline std::optional<double> mean(const Distribution& dist) {
  return std::visit(
      [](const auto& d) -> std::optional<double> {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Uniform>) return 0.5 * (d.lo + d.hi);
        else if constexpr (std::is_same_v<D, Normal>) return d.mu;
        else if constexpr (std::is_same_v<D, Poisson>) return d.lambda;
        else if constexpr (std::is_same_v<D, Cauchy>) return std::nullopt;
        else return d.theta + 1.0;
      },
      dist);
}

/// Standard deviation, when it exists.
inline std::optional<double> stddev(const Distribution& dist) {
  return std::visit(
      [](const auto& d) -> std::optional<double> {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Uniform>) return (d.hi - d.lo) / std::sqrt(12.0);
        else if constexpr (std::is_same_v<D, Normal>) return d.sigma;
        else if constexpr (std::is_same_v<D, Poisson>) return std::sqrt(d.lambda);
        else if constexpr (std::is_same_v<D, Cauchy>) return std::nullopt;
        else return 1.0;
      },
      dist);
}

/// Density of the mean of n Uniform{lo, hi} variates (Bates law), evaluated
/// by the alternating binomial sum. Stable for n up to about 20.
inline double bates_pdf(double x, int n, double lo = 0.0, double hi = 1.0) {
  if (n < 1) throw ParameterError("bates_pdf: n must be >= 1");
  if (!(lo < hi)) throw ParameterError("bates_pdf: requires lo < hi");
  const double t = (x - lo) / (hi - lo);
  if (t < 0.0 || t > 1.0) return 0.0;
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    const double u = n * t - k;
    const double sgn = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * std::pow(u, n - 1) * sgn;
    binom = binom * (n - k) / (k + 1);
  }
  const double factorial = std::tgamma(static_cast<double>(n));
  const double density = n * sum / (2.0 * factorial);
  return (density > 0.0 ? density : 0.0) / (hi - lo);
}

/// Parses `family:p1,p2` (uniform:lo,hi  normal:mu,sigma  poisson:lambda
/// cauchy:center,scale  truncexp:theta).
inline Distribution parse_distribution(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParameterError("distribution: expected family:params");
  const std::string family(text.substr(0, colon));
  std::vector<double> params;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string token(rest.substr(0, comma));
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
      throw ParameterError("distribution: bad number '" + token + "'");
    params.push_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  auto expect = [&](std::size_t count) {
    if (params.size() != count)
      throw ParameterError("distribution: " + family + " takes " + std::to_string(count) + " parameter(s)");
  };
  Distribution dist;
  if (family == "uniform") {
    expect(2);
    dist = Uniform{params[0], params[1]};
  } else if (family == "normal") {
    expect(2);
    dist = Normal{params[0], params[1]};
  } else if (family == "poisson") {
    expect(1);
    dist = Poisson{params[0]};
  } else if (family == "cauchy") {
    expect(2);
    dist = Cauchy{params[0], params[1]};
  } else if (family == "truncexp") {
    expect(1);
    dist = TruncatedExponential{params[0]};
  } else {
    throw ParameterError("distribution: unknown family '" + family + "'");
  }
  validate(dist);
  return dist;
}

}  // namespace inferlab
