#pragma once

// Affine-invariant ensemble sampler with the stretch move.
//
// Walkers are updated in sequence; walker k draws its partner uniformly from
// the other walkers' current positions. Per walker the random stream is
// consumed in a fixed order (partner index, stretch factor, acceptance
// uniform) whatever the positions are, so an affine change of coordinates
// maps every chain exactly onto the transformed chain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "inferlab/bayes.hpp"
#include "inferlab/error.hpp"
#include "inferlab/random.hpp"
#include "inferlab/special_functions.hpp"

namespace inferlab {

struct SamplerConfig {
  std::size_t nwalkers = 0;
  std::size_t nsteps = 0;
  std::size_t nburn = 0;
  double stretch_scale = 2.0;
  std::uint64_t seed = 0;

  void validate(std::size_t dim) const {
    if (dim < 1) throw ParameterError("sampler: dimension must be >= 1");
    if (nwalkers < 2 * dim || nwalkers % 2 != 0)
      throw ParameterError("sampler: nwalkers must be even and >= 2 * dimension");
    if (!(stretch_scale > 1.0)) throw ParameterError("sampler: stretch scale must be > 1");
    if (nsteps > 0 && nburn >= nsteps) throw ParameterError("sampler: nburn must be < nsteps");
  }
};

/// Row-major nwalkers x dim positions with the current log-posterior of each walker.
struct Ensemble {
  std::size_t dim = 0;
  std::vector<double> positions;
  std::vector<double> log_prob;

  std::size_t nwalkers() const { return log_prob.size(); }
  std::span<double> walker(std::size_t k) { return {positions.data() + k * dim, dim}; }
  std::span<const double> walker(std::size_t k) const { return {positions.data() + k * dim, dim}; }
};

/// samples[(k * nsteps + s) * dim + i]: walker k, step s, coordinate i.
struct EnsembleChain {
  std::size_t nwalkers = 0;
  std::size_t nsteps = 0;
  std::size_t dim = 0;
  std::vector<double> samples;
  std::vector<double> log_prob;              // [k * nsteps + s]
  std::vector<std::size_t> accepted;         // per walker
  Ensemble initial;

  std::span<const double> at(std::size_t walker, std::size_t step) const {
    return {samples.data() + (walker * nsteps + step) * dim, dim};
  }

  /// Ensemble state after the last recorded step (the initial ensemble when nsteps = 0).
  Ensemble last() const {
    if (nsteps == 0) return initial;
    Ensemble e{dim, std::vector<double>(nwalkers * dim), std::vector<double>(nwalkers)};
    for (std::size_t k = 0; k < nwalkers; ++k) {
      const auto row = at(k, nsteps - 1);
      std::copy(row.begin(), row.end(), e.walker(k).begin());
      e.log_prob[k] = log_prob[k * nsteps + nsteps - 1];
    }
    return e;
  }

  std::vector<double> acceptance_fraction() const {
    std::vector<double> out(nwalkers, 0.0);
    if (nsteps == 0) return out;
    for (std::size_t k = 0; k < nwalkers; ++k)
      out[k] = static_cast<double>(accepted[k]) / static_cast<double>(nsteps);
    return out;
  }

  double mean_acceptance_fraction() const {
    const auto f = acceptance_fraction();
    double s = 0.0;
    for (double v : f) s += v;
    return f.empty() ? 0.0 : s / static_cast<double>(f.size());
  }
};

/// Row-major rows x dim.
struct FlatSamples {
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t rows() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * dim, dim}; }
  double operator()(std::size_t r, std::size_t i) const { return values[r * dim + i]; }

  std::vector<double> column(std::size_t i) const {
    if (i >= dim) throw ParameterError("column index out of range");
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = values[r * dim + i];
    return out;
  }
};

/// z = ((a - 1) u + 1)^2 / a, density proportional to 1/sqrt(z) on [1/a, a].
inline double stretch_factor(double a, double u) {
  const double t = (a - 1.0) * u + 1.0;
  return t * t / a;
}

struct StretchProposal {
  std::vector<double> position;
  double z = 1.0;
};

/// other + z (walker - other).
inline StretchProposal propose_stretch(std::span<const double> walker, std::span<const double> other, double a,
                                       RandomSource& rng) {
  if (!(a > 1.0)) throw ParameterError("propose_stretch: a must be > 1");
  if (walker.size() != other.size()) throw ParameterError("propose_stretch: dimension mismatch");
  StretchProposal p;
  p.z = stretch_factor(a, rng.uniform());
  p.position.resize(walker.size());
  for (std::size_t i = 0; i < walker.size(); ++i) p.position[i] = other[i] + p.z * (walker[i] - other[i]);
  return p;
}

namespace detail {

template <LogDensityModel M>
double checked_log_posterior(const M& model, std::span<const double> theta) {
  const double lp = log_posterior(model, theta);
  if (std::isnan(lp)) throw ContractViolation("model returned NaN log-density");
  if (lp == kInf) throw ContractViolation("model returned +inf log-density");
  return lp;
}

}  // namespace detail

/// One sweep over all walkers. Returns per-walker acceptance flags.
template <LogDensityModel M>
std::vector<bool> step(Ensemble& ens, const M& model, double a, RandomSource& rng) {
  const std::size_t n = ens.nwalkers();
  const std::size_t d = ens.dim;
  if (n < 2) throw ParameterError("step: need at least 2 walkers");
  if (d != model.dimension()) throw ParameterError("step: ensemble and model dimensions differ");
  std::vector<bool> accepted(n, false);
  std::vector<double> proposal(d);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_index(n - 1));
    if (j >= k) ++j;
    const double z = stretch_factor(a, rng.uniform());
    const double u = rng.uniform();
    const auto xk = ens.walker(k);
    const auto xj = ens.walker(j);
    for (std::size_t i = 0; i < d; ++i) proposal[i] = xj[i] + z * (xk[i] - xj[i]);
    const double lp_new = detail::checked_log_posterior(model, proposal);
    if (lp_new == -kInf) continue;
    const double log_ratio = static_cast<double>(d - 1) * std::log(z) + lp_new - ens.log_prob[k];
    if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
      std::copy(proposal.begin(), proposal.end(), xk.begin());
      ens.log_prob[k] = lp_new;
      accepted[k] = true;
    }
  }
  return accepted;
}

/// Builds an ensemble from row-major init (nwalkers x dim), evaluating every row.
template <LogDensityModel M>
Ensemble make_ensemble(const M& model, std::span<const double> init, std::size_t nwalkers) {
  const std::size_t d = model.dimension();
  if (init.size() != nwalkers * d) throw ParameterError("init must hold nwalkers x dimension values");
  Ensemble e{d, std::vector<double>(init.begin(), init.end()), std::vector<double>(nwalkers)};
  for (std::size_t k = 0; k < nwalkers; ++k) {
    e.log_prob[k] = detail::checked_log_posterior(model, e.walker(k));
    if (e.log_prob[k] == -kInf)
      throw InitializationError("initial walker " + std::to_string(k) + " has zero posterior density");
  }
  return e;
}

/// Runs cfg.nsteps sweeps from init and records every step, burn-in included.
template <LogDensityModel M>
EnsembleChain run(const M& model, std::span<const double> init, const SamplerConfig& cfg) {
  cfg.validate(model.dimension());
  Ensemble ens = make_ensemble(model, init, cfg.nwalkers);
  RandomSource rng(cfg.seed);

  EnsembleChain chain;
  chain.nwalkers = cfg.nwalkers;
  chain.nsteps = cfg.nsteps;
  chain.dim = ens.dim;
  chain.samples.resize(cfg.nwalkers * cfg.nsteps * ens.dim);
  chain.log_prob.resize(cfg.nwalkers * cfg.nsteps);
  chain.accepted.assign(cfg.nwalkers, 0);
  chain.initial = ens;

  for (std::size_t s = 0; s < cfg.nsteps; ++s) {
    const auto acc = step(ens, model, cfg.stretch_scale, rng);
    for (std::size_t k = 0; k < cfg.nwalkers; ++k) {
      if (acc[k]) ++chain.accepted[k];
      const auto w = ens.walker(k);
      std::copy(w.begin(), w.end(), chain.samples.begin() + static_cast<std::ptrdiff_t>((k * cfg.nsteps + s) * ens.dim));
      chain.log_prob[k * cfg.nsteps + s] = ens.log_prob[k];
    }
  }
  return chain;
}

/// Steps nburn..nsteps-1 of every walker, walker-major then step-major.
inline FlatSamples flatten(const EnsembleChain& chain, std::size_t nburn) {
  if (nburn >= chain.nsteps) throw ParameterError("flatten: nburn must be < nsteps");
  FlatSamples out;
  out.dim = chain.dim;
  out.values.reserve(chain.nwalkers * (chain.nsteps - nburn) * chain.dim);
  for (std::size_t k = 0; k < chain.nwalkers; ++k)
    for (std::size_t s = nburn; s < chain.nsteps; ++s) {
      const auto r = chain.at(k, s);
      out.values.insert(out.values.end(), r.begin(), r.end());
    }
  return out;
}

/// Column selection in the given order.
inline FlatSamples marginal(const FlatSamples& samples, std::span<const std::size_t> dims) {
  if (dims.empty()) throw ParameterError("marginal: no dimensions selected");
  for (std::size_t i : dims)
    if (i >= samples.dim) throw ParameterError("marginal: dimension index out of range");
  FlatSamples out;
  out.dim = dims.size();
  out.values.reserve(samples.rows() * dims.size());
  for (std::size_t r = 0; r < samples.rows(); ++r)
    for (std::size_t i : dims) out.values.push_back(samples(r, i));
  return out;
}

inline std::vector<double> column_means(const FlatSamples& s) {
  std::vector<double> m(s.dim, 0.0);
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t i = 0; i < s.dim; ++i) m[i] += s(r, i);
  for (double& v : m) v /= static_cast<double>(s.rows());
  return m;
}

inline std::vector<double> column_stds(const FlatSamples& s) {
  if (s.rows() < 2) throw InsufficientDataError("column_stds: need at least 2 rows");
  const auto m = column_means(s);
  std::vector<double> v(s.dim, 0.0);
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t i = 0; i < s.dim; ++i) v[i] += (s(r, i) - m[i]) * (s(r, i) - m[i]);
  for (double& x : v) x = std::sqrt(x / static_cast<double>(s.rows() - 1));
  return v;
}

namespace detail {

template <LogDensityModel M, typename Draw>
std::vector<double> redraw_init(const M& model, std::size_t nwalkers, Draw&& draw_row) {
  constexpr int kMaxAttempts = 100;
  const std::size_t d = model.dimension();
  std::vector<double> init(nwalkers * d);
  for (std::size_t k = 0; k < nwalkers; ++k) {
    std::span<double> row(init.data() + k * d, d);
    int attempt = 0;
    for (;;) {
      draw_row(row);
      if (checked_log_posterior(model, row) > -kInf) break;
      if (++attempt >= kMaxAttempts)
        throw InitializationError("walker " + std::to_string(k) + " found no support after 100 draws");
    }
  }
  return init;
}

}  // namespace detail

/// Walkers drawn from independent N(center_i, scale_i); rows outside the
/// support are redrawn.
template <LogDensityModel M>
std::vector<double> gaussian_ball(const M& model, std::size_t nwalkers, std::span<const double> center,
                                  std::span<const double> scale, RandomSource& rng) {
  const std::size_t d = model.dimension();
  if (center.size() != d || scale.size() != d) throw ParameterError("gaussian_ball: dimension mismatch");
  for (double s : scale)
    if (!(s >= 0.0)) throw ParameterError("gaussian_ball: scales must be >= 0");
  return detail::redraw_init(model, nwalkers, [&](std::span<double> row) {
    for (std::size_t i = 0; i < d; ++i) row[i] = center[i] + scale[i] * rng.normal();
  });
}

/// Walkers uniform in the box [lo_i, hi_i); rows outside the support are redrawn.
template <LogDensityModel M>
std::vector<double> uniform_box(const M& model, std::size_t nwalkers, std::span<const double> lo,
                                std::span<const double> hi, RandomSource& rng) {
  const std::size_t d = model.dimension();
  if (lo.size() != d || hi.size() != d) throw ParameterError("uniform_box: dimension mismatch");
  for (std::size_t i = 0; i < d; ++i)
    if (!(lo[i] <= hi[i])) throw ParameterError("uniform_box: lo must be <= hi");
  return detail::redraw_init(model, nwalkers, [&](std::span<double> row) {
    for (std::size_t i = 0; i < d; ++i) row[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
  });
}

}  // namespace inferlab
