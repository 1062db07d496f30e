#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "inferlab/error.hpp"
#include "inferlab/special_functions.hpp"

namespace inferlab {

/// A posterior specified through its log-prior and log-likelihood, with the
/// data bound inside the model. Both must be pure and return -inf (never NaN)
/// outside the support.
template <class M>
concept LogDensityModel = requires(const M& m, std::span<const double> theta) {
  { m.dimension() } -> std::convertible_to<std::size_t>;
  { m.log_prior(theta) } -> std::convertible_to<double>;
  { m.log_likelihood(theta) } -> std::convertible_to<double>;
};

/// Model assembled from two callables.
class FunctionModel {
 public:
  using LogFn = std::function<double(std::span<const double>)>;

  FunctionModel(std::size_t dim, LogFn log_prior, LogFn log_likelihood)
      : dim_(dim), log_prior_(std::move(log_prior)), log_likelihood_(std::move(log_likelihood)) {}

  std::size_t dimension() const { return dim_; }
  double log_prior(std::span<const double> theta) const { return log_prior_(theta); }
  double log_likelihood(std::span<const double> theta) const { return log_likelihood_(theta); }

 private:
  std::size_t dim_;
  LogFn log_prior_;
  LogFn log_likelihood_;
};

/// log prior + log likelihood; the likelihood is skipped when the prior is -inf.
template <LogDensityModel M>
double log_posterior(const M& model, std::span<const double> theta) {
  if (theta.size() != model.dimension()) throw ParameterError("log_posterior: dimension mismatch");
  const double lp = model.log_prior(theta);
  if (lp == -kInf) return -kInf;
  return lp + model.log_likelihood(theta);
}

struct PosteriorGrid1D {
  std::vector<double> coords;
  std::vector<double> density;
  bool normalized = false;

  double step() const { return coords.size() > 1 ? coords[1] - coords[0] : 0.0; }
};

/// Density stored x-major: density[ix * ny + iy].
struct PosteriorGrid2D {
  std::vector<double> coords_x;
  std::vector<double> coords_y;
  std::vector<double> density;
  bool normalized = false;

  std::size_t nx() const { return coords_x.size(); }
  std::size_t ny() const { return coords_y.size(); }
  double at(std::size_t ix, std::size_t iy) const { return density[ix * ny() + iy]; }
};

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
};

struct CredibleInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;
  bool multimodal = false;  // superlevel set at the interval's threshold is disconnected

  double width() const { return hi - lo; }
  double half_width() const { return 0.5 * (hi - lo); }
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw ParameterError("linspace: need at least 2 points");
  std::vector<double> out(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + h * static_cast<double>(i);
  out.back() = hi;
  return out;
}

/// Trapezoid rule over (possibly nonuniform) strictly increasing coordinates.
inline double trapezoid(std::span<const double> coords, std::span<const double> values) {
  double total = 0.0;
  for (std::size_t i = 1; i < coords.size(); ++i)
    total += 0.5 * (coords[i] - coords[i - 1]) * (values[i] + values[i - 1]);
  return total;
}

namespace detail {

// Evaluates fn(i) for i in [0, n) into out[i]; chunks by index so the output
// is independent of thread count.
template <class Fn>
void parallel_fill(std::vector<double>& out, Fn&& fn, unsigned threads) {
  const std::size_t n = out.size();
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end)
      pool.emplace_back([&out, &fn, begin, end] {
        for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
      });
  }
  for (auto& th : pool) th.join();
}

// exp(logp - max) in place. Throws when nothing is finite.
inline void exponentiate(std::vector<double>& logp) {
  double mx = -kInf;
  for (double v : logp) {
    if (std::isnan(v)) throw ContractViolation("log density returned NaN");
    mx = std::max(mx, v);
  }
  if (mx == -kInf) throw EmptySupportError("posterior is zero on every grid node");
  for (double& v : logp) v = std::exp(v - mx);
}

}  // namespace detail

inline void normalize(PosteriorGrid1D& grid) {
  const double z = trapezoid(grid.coords, grid.density);
  if (!(z > 0.0)) throw EmptySupportError("grid has zero mass");
  for (double& d : grid.density) d /= z;
  grid.normalized = true;
}

/// Nested trapezoid integral over the 2D grid.
inline double integrate(const PosteriorGrid2D& grid) {
  std::vector<double> row_integrals(grid.nx());
  std::vector<double> column(grid.ny());
  for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) column[iy] = grid.at(ix, iy);
    row_integrals[ix] = trapezoid(grid.coords_y, column);
  }
  return trapezoid(grid.coords_x, row_integrals);
}

inline void normalize(PosteriorGrid2D& grid) {
  const double z = integrate(grid);
  if (!(z > 0.0)) throw EmptySupportError("grid has zero mass");
  for (double& d : grid.density) d /= z;
  grid.normalized = true;
}

/// Posterior of a one-parameter model on n uniform nodes of [lo, hi].
template <LogDensityModel M>
PosteriorGrid1D grid_posterior_1d(const M& model, double lo, double hi, std::size_t n, unsigned threads = 1) {
  if (model.dimension() != 1) throw ParameterError("grid_posterior_1d: model must be one-dimensional");
  if (!(lo < hi)) throw ParameterError("grid_posterior_1d: requires lo < hi");
  if (n < 16) throw ParameterError("grid_posterior_1d: n must be >= 16");
  PosteriorGrid1D grid;
  grid.coords = linspace(lo, hi, n);
  grid.density.resize(n);
  detail::parallel_fill(
      grid.density,
      [&](std::size_t i) {
        const std::array<double, 1> theta{grid.coords[i]};
        return log_posterior(model, theta);
      },
      threads);
  detail::exponentiate(grid.density);
  normalize(grid);
  return grid;
}

/// Posterior of a two-parameter model on an nx-by-ny uniform grid over box.
template <LogDensityModel M>
PosteriorGrid2D grid_posterior_2d(const M& model, const Box& box, std::size_t nx, std::size_t ny,
                                  unsigned threads = 1) {
  if (model.dimension() != 2) throw ParameterError("grid_posterior_2d: model must be two-dimensional");
  if (!(box.x_lo < box.x_hi) || !(box.y_lo < box.y_hi)) throw ParameterError("grid_posterior_2d: bad box");
  if (nx < 16 || ny < 16) throw ParameterError("grid_posterior_2d: nx, ny must be >= 16");
  PosteriorGrid2D grid;
  grid.coords_x = linspace(box.x_lo, box.x_hi, nx);
  grid.coords_y = linspace(box.y_lo, box.y_hi, ny);
  grid.density.resize(nx * ny);
  detail::parallel_fill(
      grid.density,
      [&](std::size_t k) {
        const std::array<double, 2> theta{grid.coords_x[k / ny], grid.coords_y[k % ny]};
        return log_posterior(model, theta);
      },
      threads);
  detail::exponentiate(grid.density);
  normalize(grid);
  return grid;
}

/// Coordinate of the maximum density; ties go to the lowest index.
inline double map_estimate(const PosteriorGrid1D& grid) {
  if (grid.density.empty()) throw ParameterError("map_estimate: empty grid");
  const auto it = std::max_element(grid.density.begin(), grid.density.end());
  return grid.coords[static_cast<std::size_t>(it - grid.density.begin())];
}

/// (x, y) of the maximum density; ties go to the lowest flat index.
inline std::pair<double, double> map_estimate(const PosteriorGrid2D& grid) {
  if (grid.density.empty()) throw ParameterError("map_estimate: empty grid");
  const auto k = static_cast<std::size_t>(std::max_element(grid.density.begin(), grid.density.end()) -
                                          grid.density.begin());
  return {grid.coords_x[k / grid.ny()], grid.coords_y[k % grid.ny()]};
}

/// Smallest-width contiguous interval [coords[i], coords[j]] whose trapezoid
/// mass reaches `mass`; among equal widths the larger mass wins, then the
/// leftmost. For unimodal grids this is the highest-density interval; for
/// multimodal ones it is the best single interval, and `multimodal` is set
/// when the density superlevel set holding `mass` is disconnected.
inline CredibleInterval hdi(const PosteriorGrid1D& grid, double mass) {
  if (!grid.normalized) throw ParameterError("hdi: grid must be normalized");
  if (!(mass > 0.0 && mass < 1.0)) throw ParameterError("hdi: mass must lie in (0, 1)");
  const std::size_t n = grid.coords.size();
  // cumulative[i] = integral from coords[0] to coords[i]
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    cumulative[i] = cumulative[i - 1] +
                    0.5 * (grid.coords[i] - grid.coords[i - 1]) * (grid.density[i] + grid.density[i - 1]);
  std::size_t best_lo = 0, best_hi = n - 1;
  double best_width = kInf;
  double best_mass = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j < n && cumulative[j] - cumulative[i] < mass - 1e-12) ++j;
    if (j == n) break;
    const double width = grid.coords[j] - grid.coords[i];
    const double covered = cumulative[j] - cumulative[i];
    const double tol = 1e-9 * (grid.coords.back() - grid.coords.front());
    if (width < best_width - tol || (width <= best_width + tol && covered > best_mass + 1e-12)) {
      best_width = std::min(width, best_width);
      best_mass = covered;
      best_lo = i;
      best_hi = j;
    }
  }
  CredibleInterval ci{grid.coords[best_lo], grid.coords[best_hi], cumulative[best_hi] - cumulative[best_lo],
                      false};

  // Density threshold from the sweep: nodes taken in decreasing density until
  // their trapezoid weights reach `mass`.
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double h = 0.5 * (grid.coords[i] - grid.coords[i - 1]);
    weight[i - 1] += h;
    weight[i] += h;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid.density[a] > grid.density[b]; });
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += grid.density[i] * weight[i];
  double running = 0.0;
  double threshold = 0.0;
  for (std::size_t idx : order) {
    running += grid.density[idx] * weight[idx];
    threshold = grid.density[idx];
    if (running >= mass * total) break;
  }
  if (threshold > 0.0) {
    int runs = 0;
    bool inside = false;
    for (double d : grid.density) {
      const bool above = d >= threshold;
      if (above && !inside) ++runs;
      inside = above;
    }
    ci.multimodal = runs > 1;
  }
  return ci;
}

/// Density thresholds whose superlevel sets enclose each requested mass.
/// Node masses (density times trapezoid cell area) are accumulated in
/// decreasing density order. mass >= 1 maps to threshold 0.
inline std::vector<double> contour_levels(const PosteriorGrid2D& grid, std::span<const double> masses) {
  if (!grid.normalized) throw ParameterError("contour_levels: grid must be normalized");
  auto weights = [](const std::vector<double>& c) {
    std::vector<double> w(c.size(), 0.0);
    for (std::size_t i = 1; i < c.size(); ++i) {
      const double h = 0.5 * (c[i] - c[i - 1]);
      w[i - 1] += h;
      w[i] += h;
    }
    return w;
  };
  const auto wx = weights(grid.coords_x);
  const auto wy = weights(grid.coords_y);
  std::vector<std::size_t> order(grid.density.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid.density[a] > grid.density[b]; });
  std::vector<double> cumulative(order.size());
  double running = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t idx = order[k];
    running += grid.density[idx] * wx[idx / grid.ny()] * wy[idx % grid.ny()];
    cumulative[k] = running;
  }
  std::vector<double> levels;
  levels.reserve(masses.size());
  for (double m : masses) {
    if (!(m > 0.0)) throw ParameterError("contour_levels: masses must be > 0");
    if (m >= 1.0) {
      levels.push_back(0.0);
      continue;
    }
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), m * running);
    const std::size_t k = it == cumulative.end() ? order.size() - 1
                                                 : static_cast<std::size_t>(it - cumulative.begin());
    levels.push_back(grid.density[order[k]]);
  }
  return levels;
}

/// Normalized 2D histogram of paired samples on an nx-by-ny node grid
/// spanning the sample range; each sample counts toward its nearest node.
inline PosteriorGrid2D histogram_grid_2d(std::span<const double> xs, std::span<const double> ys, std::size_t nx,
                                         std::size_t ny) {
  if (xs.size() != ys.size() || xs.empty()) throw ParameterError("histogram_grid_2d: bad samples");
  if (nx < 2 || ny < 2) throw ParameterError("histogram_grid_2d: need at least 2 nodes per axis");
  const auto [x_mn, x_mx] = std::minmax_element(xs.begin(), xs.end());
  const auto [y_mn, y_mx] = std::minmax_element(ys.begin(), ys.end());
  const double x_lo = *x_mn, y_lo = *y_mn;
  const double x_hi = *x_mx > x_lo ? *x_mx : x_lo + 1.0;
  const double y_hi = *y_mx > y_lo ? *y_mx : y_lo + 1.0;
  PosteriorGrid2D grid;
  grid.coords_x = linspace(x_lo, x_hi, nx);
  grid.coords_y = linspace(y_lo, y_hi, ny);
  grid.density.assign(nx * ny, 0.0);
  const double hx = (x_hi - x_lo) / static_cast<double>(nx - 1);
  const double hy = (y_hi - y_lo) / static_cast<double>(ny - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto ix = static_cast<std::size_t>(std::llround((xs[k] - x_lo) / hx));
    const auto iy = static_cast<std::size_t>(std::llround((ys[k] - y_lo) / hy));
    grid.density[std::min(ix, nx - 1) * ny + std::min(iy, ny - 1)] += 1.0;
  }
  normalize(grid);
  return grid;
}

/// Density at the grid node nearest to (x, y); 0 outside the grid.
inline double density_near(const PosteriorGrid2D& grid, double x, double y) {
  if (x < grid.coords_x.front() || x > grid.coords_x.back() || y < grid.coords_y.front() ||
      y > grid.coords_y.back())
    return 0.0;
  auto nearest = [](const std::vector<double>& c, double v) {
    const auto it = std::lower_bound(c.begin(), c.end(), v);
    if (it == c.begin()) return std::size_t{0};
    if (it == c.end()) return c.size() - 1;
    const auto i = static_cast<std::size_t>(it - c.begin());
    return (v - c[i - 1] < c[i] - v) ? i - 1 : i;
  };
  return grid.at(nearest(grid.coords_x, x), nearest(grid.coords_y, y));
}

}  // namespace inferlab
