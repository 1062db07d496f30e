// inferlab: regenerate the data behind each experiment from a fixed seed.
//
// Every run writes its outputs plus manifest.json into --out. `inferlab
// replay <manifest>` re-runs the recorded subcommand with the recorded
// parameters and seed.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "inferlab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace inferlab;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  fs::path out = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<std::string> outputs;

  std::ofstream open(const std::string& name) {
    fs::create_directories(out);
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    outputs.push_back(name);
    return f;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
};

json interval_json(double lo, double hi) { return json::array({lo, hi}); }

json fit_report(const LinearFit& fit) {
  json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["sigma_a"] = fit.sigma_a;
  j["sigma_b"] = fit.sigma_b;
  j["chi2"] = fit.chi2;
  j["n"] = fit.n;
  j["sigma_eps"] = std::isnan(fit.sigma_eps) ? json(nullptr) : json(fit.sigma_eps);
  return j;
}

/// The paper's line construction: x = 0.5 + sorted 99 U, sigma = 2 + 20 U,
/// y = 2 x - 5 + N(0, sigma).
Dataset builtin_line(RandomSource& rng) { return outlier_dataset(rng, 2.0, -5.0, 20, {}).data; }

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

// ---------------------------------------------------------------------------
// Parameter sets. Each is filled either from flags or from a manifest.

struct CltParams {
  std::string dist = "uniform:0,10";
  std::size_t group = 3;
  std::size_t reps = 300000;
  std::size_t bins = 101;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CltParams, dist, group, reps, bins)

struct ScalingParams {
  std::string dist = "normal:0,1";
  std::size_t nmin = 1;
  std::size_t nmax = 10000;
  std::size_t points = 20;
  std::size_t reps = 2000;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScalingParams, dist, nmin, nmax, points, reps)

struct CorrelatedParams {
  std::size_t nmin = 1;
  std::size_t nmax = 1000;
  std::size_t points = 15;
  std::size_t reps = 1000;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CorrelatedParams, nmin, nmax, points, reps)

struct FitParams {
  std::string input = "builtin:paper";
  bool weighted = false;
  double confidence = 0.95;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FitParams, input, weighted, confidence)

struct ActivityParams {
  double a0 = 1000.0;
  std::size_t n = 50;
  double lo = 975.0;
  double hi = 1020.0;
  std::size_t points = 500;
  double mass = 0.68;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ActivityParams, a0, n, lo, hi, points, mass)

struct ScatterParamsCli {
  double mu = 1000.0;
  double sigma_a = 10.0;
  std::size_t n = 50;
  double mu_min = 990.0;
  double mu_max = 1010.0;
  double sigma_min = 0.0;
  double sigma_max = 30.0;
  std::size_t nmu = 101;
  std::size_t nsigma = 101;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScatterParamsCli, mu, sigma_a, n, mu_min, mu_max, sigma_min,
                                                sigma_max, nmu, nsigma)

struct ResistanceParams {
  double r_true = 512.0;
  double sigma_r = 5.0;
  std::size_t n = 200;
  std::string prior = "uniform:500,0.05";
  double lo = 470.0;
  double hi = 535.0;
  std::size_t points = 200;
  double mass = 0.68;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ResistanceParams, r_true, sigma_r, n, prior, lo, hi, points, mass)

struct FailureParams {
  std::vector<double> data{10.0, 12.0, 15.0};
  double mass = 0.65;
  double lo = 5.0;
  double hi = 11.0;
  std::size_t points = 1201;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FailureParams, data, mass, lo, hi, points)

struct LighthouseParams {
  double alpha = 5.0;
  double beta = 4.0;
  std::size_t n = 1000;
  std::string mode = "2d";
  double alpha_min = -10.0;
  double alpha_max = 20.0;
  double beta_min = 0.1;
  double beta_max = 12.0;
  std::size_t nalpha = 201;
  std::size_t nbeta = 201;
  std::size_t walkers = 200;
  std::size_t steps = 6000;
  std::size_t burn = 3000;
  bool chain = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LighthouseParams, alpha, beta, n, mode, alpha_min, alpha_max,
                                                beta_min, beta_max, nalpha, nbeta, walkers, steps, burn, chain)

struct OutliersParams {
  std::string input = "builtin:paper";
  std::size_t walkers = 50;
  std::size_t steps = 15000;
  std::size_t burn = 10000;
  double sigma_b = 100.0;
  double g0 = 0.5;
  std::size_t band_points = 10;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OutliersParams, input, walkers, steps, burn, sigma_b, g0,
                                                band_points)

// ---------------------------------------------------------------------------
// Commands

void cmd_clt(const CltParams& p, Context& ctx) {
  const Distribution dist = parse_distribution(p.dist);
  require(p.group >= 1 && p.reps >= 2 && p.bins >= 1, "clt: --group >= 1, --reps >= 2, --bins >= 1");
  const auto means = mean_sampling_distribution({dist, p.group, p.reps, ctx.seed}, ctx.threads);
  {
    auto f = ctx.open("clt_histogram.csv");
    csv::write_histogram(f, histogram(means, p.bins));
  }
  json s;
  s["mean"] = sample_mean(means);
  s["std"] = sample_std(means);
  const auto mu = mean(dist);
  const auto sd = stddev(dist);
  s["expected_mean"] = mu ? json(*mu) : json(nullptr);
  s["expected_std"] = sd ? json(*sd / std::sqrt(static_cast<double>(p.group))) : json(nullptr);
  s["coverage_1sigma"] =
      (mu && sd) ? json(coverage_ratio(means, *mu, *sd / std::sqrt(static_cast<double>(p.group)))) : json(nullptr);
  ctx.write_json("clt_summary.json", s);
}

void cmd_scaling(const ScalingParams& p, Context& ctx) {
  const Distribution dist = parse_distribution(p.dist);
  require(p.nmin >= 1 && p.nmax >= p.nmin, "scaling: empty n range (need 1 <= --nmin <= --nmax)");
  require(p.points >= 1 && p.reps >= 100, "scaling: --points >= 1, --reps >= 100");
  RandomSource rng(ctx.seed);
  const auto ns = log_spaced_counts(p.nmin, p.nmax, p.points);
  const auto curve = std_scaling_curve(dist, ns, p.reps, rng);
  {
    auto f = ctx.open("scaling_curve.csv");
    csv::write_curve(f, curve);
  }
  ctx.write_json("scaling_summary.json", {{"slope", curve.loglog_slope},
                                          {"intercept", curve.loglog_intercept},
                                          {"non_convergent", is_non_convergent(curve)},
                                          {"monotone_decreasing", is_monotone_decreasing(curve)}});
}

void cmd_correlated(const CorrelatedParams& p, Context& ctx) {
  require(p.nmin >= 1 && p.nmax >= p.nmin, "correlated: empty n range");
  require(p.reps >= 2, "correlated: --reps >= 2");
  RandomSource rng(ctx.seed);
  const auto ns = log_spaced_counts(p.nmin, p.nmax, p.points);
  const auto curve = correlated_walk_std(ns, p.reps, rng);
  {
    auto f = ctx.open("correlated_curve.csv");
    csv::write_curve(f, curve);
  }
  ctx.write_json("correlated_summary.json", {{"slope", curve.loglog_slope},
                                             {"intercept", curve.loglog_intercept},
                                             {"non_convergent", is_non_convergent(curve)}});
}

void cmd_fit(const FitParams& p, Context& ctx) {
  Dataset ds;
  if (p.input == "builtin:paper") {
    RandomSource rng(ctx.seed);
    ds = builtin_line(rng);
    auto f = ctx.open("fit_data.csv");
    csv::write_dataset(f, ds);
  } else {
    ds = csv::to_dataset(csv::read_file(p.input));
  }
  require(!p.weighted || ds.sigmas.has_value(), "fit: --weighted needs a sigma column");
  require(p.confidence > 0.0 && p.confidence < 1.0, "fit: --confidence must lie in (0, 1)");
  const LinearFit fit = p.weighted ? fit_wls(ds) : fit_ols(ds);
  json j = fit_report(fit);
  j["weighted"] = fit.weighted;
  j["confidence"] = p.confidence;
  if (fit.weighted || fit.n >= 3) {
    const auto [ia, ib] = parameter_intervals(fit, p.confidence);
    j["a_interval"] = interval_json(ia.lo, ia.hi);
    j["b_interval"] = interval_json(ib.lo, ib.hi);
  }
  ctx.write_json("fit.json", j);
}

void cmd_activity(const ActivityParams& p, Context& ctx) {
  require(p.n >= 1, "activity: --n >= 1");
  RandomSource rng(ctx.seed);
  const auto data = activity_generate(p.a0, p.n, rng);
  {
    auto f = ctx.open("activity_data.csv");
    f << "A,e\n";
    for (std::size_t i = 0; i < data.size(); ++i)
      f << csv::format(data.counts[i]) << ',' << csv::format(data.errors[i]) << '\n';
  }
  const auto grid = grid_posterior_1d(ActivityModel{data}, p.lo, p.hi, p.points, ctx.threads);
  {
    auto f = ctx.open("activity_posterior.csv");
    csv::write_grid(f, grid, "A");
  }
  const auto ci = hdi(grid, p.mass);
  json j{{"map", map_estimate(grid)},
         {"sample_mean", sample_mean(data.counts)},
         {"weighted_mean", weighted_mean(data)},
         {"grid_step", grid.step()},
         {"hdi", interval_json(ci.lo, ci.hi)},
         {"hdi_mass", p.mass}};
  if (data.size() >= 2) j["sample_std"] = sample_std(data.counts);
  ctx.write_json("activity.json", j);
}

void cmd_scatter(const ScatterParamsCli& p, Context& ctx) {
  require(p.n >= 1, "scatter: --n >= 1");
  RandomSource rng(ctx.seed);
  const auto data = scatter_generate(p.mu, p.sigma_a, p.n, rng);
  {
    auto f = ctx.open("scatter_data.csv");
    f << "A,e\n";
    for (std::size_t i = 0; i < data.size(); ++i)
      f << csv::format(data.counts[i]) << ',' << csv::format(data.errors[i]) << '\n';
  }
  const auto grid = grid_posterior_2d(ScatterModel{data}, Box{p.mu_min, p.mu_max, p.sigma_min, p.sigma_max}, p.nmu,
                                      p.nsigma, ctx.threads);
  {
    auto f = ctx.open("scatter_posterior.csv");
    csv::write_grid(f, grid, "mu", "sigma_A");
  }
  const auto [mu, sig] = map_estimate(grid);
  const std::vector<double> masses{0.68, 0.95};
  const auto levels = contour_levels(grid, masses);
  ctx.write_json("scatter.json", {{"map_mu", mu},
                                  {"map_sigma_A", sig},
                                  {"contour_masses", masses},
                                  {"contour_levels", levels}});
}

ResistancePrior parse_prior(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, "resistance: --prior must look like uniform:NOM,TOL or gaussian:MU,SIGMA");
  const std::string family = text.substr(0, colon);
  const auto comma = text.find(',', colon);
  require(comma != std::string::npos, "resistance: --prior needs two parameters");
  double p1 = 0.0, p2 = 0.0;
  try {
    p1 = std::stod(text.substr(colon + 1, comma - colon - 1));
    p2 = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw UsageError("resistance: --prior parameters must be numbers");
  }
  if (family == "uniform") return UniformTolerance{p1, p2};
  if (family == "gaussian" || family == "normal") return GaussianPrior{p1, p2};
  throw UsageError("resistance: unknown prior family '" + family + "'");
}

void cmd_resistance(const ResistanceParams& p, Context& ctx) {
  const ResistancePrior prior = parse_prior(p.prior);
  RandomSource rng(ctx.seed);
  ResistanceCase c{resistance_generate(p.r_true, p.sigma_r, p.n, rng), p.sigma_r, prior};
  {
    auto f = ctx.open("resistance_data.csv");
    csv::write_values(f, "R", c.readings);
  }
  const auto grid = resistance_posterior(c, p.lo, p.hi, p.points);
  {
    auto f = ctx.open("resistance_posterior.csv");
    csv::write_grid(f, grid, "R0");
  }
  const auto ci = hdi(grid, p.mass);
  json j{{"map", map_estimate(grid)}, {"hdi", interval_json(ci.lo, ci.hi)}, {"hdi_mass", p.mass}, {"n", p.n}};
  if (!c.readings.empty()) j["sample_mean"] = sample_mean(c.readings);
  ctx.write_json("resistance.json", j);
}

void cmd_failure(const FailureParams& p, Context& ctx) {
  const FailureData d{p.data};
  d.validate();
  const auto credible = failure_credible(d, p.mass);
  const auto classical = failure_classical(d);
  const auto grid = grid_posterior_1d(FailureModel{d}, p.lo, p.hi, p.points, ctx.threads);
  {
    auto f = ctx.open("failure_posterior.csv");
    csv::write_grid(f, grid, "theta");
  }
  const auto grid_ci = hdi(grid, p.mass);
  ctx.write_json("failure.json", {{"credible", interval_json(credible.lo, credible.hi)},
                                  {"mass", p.mass},
                                  {"grid_hdi", interval_json(grid_ci.lo, grid_ci.hi)},
                                  {"classical_theta", classical.theta_hat},
                                  {"classical_ci", interval_json(classical.ci.lo, classical.ci.hi)},
                                  {"classical_ci_feasible", classical.ci.lo <= d.earliest()}});
}

void cmd_lighthouse(const LighthouseParams& p, Context& ctx) {
  require(p.mode == "1d" || p.mode == "2d" || p.mode == "mcmc", "lighthouse: --mode must be 1d, 2d or mcmc");
  require(p.alpha_min < p.alpha_max && p.beta_min < p.beta_max, "lighthouse: empty parameter box");
  const RandomSource root(ctx.seed);
  RandomSource data_rng = root.split(0);
  const auto data = lighthouse_generate(p.alpha, p.beta, p.n, data_rng);
  {
    auto f = ctx.open("lighthouse_data.csv");
    csv::write_values(f, "x", data.positions);
  }
  json j{{"mode", p.mode}, {"sample_mean", sample_mean(data.positions)}, {"sample_median", median(data.positions)}};
  if (p.mode == "1d") {
    const auto grid = grid_posterior_1d(LighthouseAlphaModel{data, p.beta, p.alpha_min, p.alpha_max}, p.alpha_min,
                                        p.alpha_max, p.nalpha, ctx.threads);
    auto f = ctx.open("lighthouse_posterior.csv");
    csv::write_grid(f, grid, "alpha");
    const auto ci = hdi(grid, 0.68);
    j["map_alpha"] = map_estimate(grid);
    j["hdi68"] = interval_json(ci.lo, ci.hi);
    j["multimodal"] = ci.multimodal;
  } else if (p.mode == "2d") {
    const LighthouseModel model{data, p.alpha_min, p.alpha_max, p.beta_min, p.beta_max};
    const auto grid =
        grid_posterior_2d(model, Box{p.alpha_min, p.alpha_max, p.beta_min, p.beta_max}, p.nalpha, p.nbeta, ctx.threads);
    auto f = ctx.open("lighthouse_posterior.csv");
    csv::write_grid(f, grid, "alpha", "beta");
    const auto [a, b] = map_estimate(grid);
    j["map_alpha"] = a;
    j["map_beta"] = b;
  } else {
    require(p.walkers >= 4 && p.walkers % 2 == 0, "lighthouse: --walkers must be even and >= 4");
    require(p.burn < p.steps, "lighthouse: --burn must be < --steps");
    const LighthouseModel model{data, p.alpha_min, p.alpha_max, p.beta_min, p.beta_max};
    RandomSource init_rng = root.split(1);
    const std::vector<double> lo{p.alpha_min, p.beta_min}, hi{p.alpha_max, p.beta_max};
    const auto init = uniform_box(model, p.walkers, lo, hi, init_rng);
    const auto chain = run(model, init, SamplerConfig{p.walkers, p.steps, p.burn, 2.0, root.split(2).seed()});
    if (p.chain) {
      auto f = ctx.open("lighthouse_chain.csv");
      csv::write_chain(f, chain);
    }
    const auto flat = flatten(chain, p.burn);
    {
      auto f = ctx.open("lighthouse_samples.csv");
      csv::write_flat(f, flat, {"alpha", "beta"});
    }
    const auto m = column_means(flat);
    const auto s = column_stds(flat);
    j["mean_alpha"] = m[0];
    j["mean_beta"] = m[1];
    j["std_alpha"] = s[0];
    j["std_beta"] = s[1];
    j["acceptance"] = chain.mean_acceptance_fraction();
  }
  ctx.write_json("lighthouse.json", j);
}

void cmd_outliers(const OutliersParams& p, Context& ctx) {
  const RandomSource root(ctx.seed);
  Dataset ds;
  std::vector<std::size_t> injected;
  if (p.input == "builtin:paper") {
    RandomSource data_rng = root.split(0);
    auto od = outlier_dataset(data_rng);
    ds = std::move(od.data);
    injected = std::move(od.outlier_indices);
    auto f = ctx.open("outliers_data.csv");
    csv::write_dataset(f, ds);
  } else {
    ds = csv::to_dataset(csv::read_file(p.input));
  }
  require(ds.sigmas.has_value(), "outliers: input needs a sigma column");
  const std::size_t ndim = ds.size() + 2;
  require(p.walkers >= 2 * ndim && p.walkers % 2 == 0,
          "outliers: --walkers must be even and >= 2 x (N + 2) = " + std::to_string(2 * ndim));
  require(p.burn < p.steps, "outliers: --burn must be < --steps");

  OutlierFitConfig cfg{p.walkers, p.steps, p.burn, p.sigma_b, p.g0, root.split(1).seed()};
  const auto fit = fit_outliers(ds, cfg);
  {
    const std::vector<std::size_t> ab{1, 0};
    auto f = ctx.open("outliers_samples.csv");
    csv::write_flat(f, marginal(fit.samples, ab), {"a", "b"});
  }
  {
    const auto xs = linspace(-1.0, 100.0, p.band_points);
    auto f = ctx.open("outliers_band.csv");
    f << "x,mean,lo,hi\n";
    for (const auto& bp : credible_band(fit.samples, xs)) csv::write_row(f, {bp.x, bp.mean, bp.lo, bp.hi});
  }
  const auto b = fit.samples.column(0);
  const auto a = fit.samples.column(1);
  const auto ols = fit_ols(ds);
  json j{{"outliers", fit.outliers},
         {"g_mean", fit.g_mean},
         {"mean_a", sample_mean(a)},
         {"mean_b", sample_mean(b)},
         {"std_a", sample_std(a)},
         {"std_b", sample_std(b)},
         {"ols_a", ols.a},
         {"ols_b", ols.b},
         {"acceptance", fit.mean_acceptance}};
  if (!injected.empty()) j["injected"] = injected;
  ctx.write_json("outliers.json", j);
}

// ---------------------------------------------------------------------------

struct Command {
  std::string name;
  std::function<json()> params;                         // current values
  std::function<void(const json&)> load;                // from manifest
  std::function<void(Context&)> execute;
};

template <class P>
Command make_command(const std::string& name, P& params, void (*fn)(const P&, Context&)) {
  return {name, [&params] { return json(params); }, [&params](const json& j) { params = j.get<P>(); },
          [&params, fn](Context& ctx) { fn(params, ctx); }};
}

void write_manifest(Context& ctx, const std::string& subcommand, const json& params, const json& args) {
  json m;
  m["subcommand"] = subcommand;
  m["params"] = params;
  m["args"] = args;
  m["seed"] = ctx.seed;
  auto outputs = ctx.outputs;
  m["outputs"] = outputs;
  m["version"] = kVersion;
  ctx.write_json("manifest.json", m);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("INFERLAB_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("INFERLAB_SEED must be a non-negative integer");
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"inferlab: regenerate uncertainty and inference experiments from fixed seeds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Context ctx;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (default: $INFERLAB_SEED or 0)");
  app.add_option("--threads", ctx.threads, "Worker threads for replicates and grid fills")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
  app.fallthrough();

  const std::string dist_help =
      "Distribution family:params, one of uniform:LO,HI normal:MU,SIGMA poisson:LAMBDA cauchy:X0,GAMMA "
      "truncexp:THETA";

  CltParams clt;
  auto* s_clt = app.add_subcommand("clt", "Sampling distribution of the mean of N draws");
  s_clt->add_option("--dist", clt.dist, dist_help)->capture_default_str();
  s_clt->add_option("--group,-N", clt.group, "Draws averaged per replicate")->capture_default_str();
  s_clt->add_option("--reps,-P", clt.reps, "Number of replicates")->capture_default_str();
  s_clt->add_option("--bins", clt.bins, "Histogram bins")->capture_default_str();

  ScalingParams scaling;
  auto* s_scaling = app.add_subcommand("scaling", "Std of the mean against n, with log-log slope");
  s_scaling->add_option("--dist", scaling.dist, dist_help)->capture_default_str();
  s_scaling->add_option("--nmin", scaling.nmin, "Smallest n")->capture_default_str();
  s_scaling->add_option("--nmax", scaling.nmax, "Largest n")->capture_default_str();
  s_scaling->add_option("--points", scaling.points, "Log-spaced n values")->capture_default_str();
  s_scaling->add_option("--reps", scaling.reps, "Replicates per n")->capture_default_str();

  CorrelatedParams correlated;
  auto* s_corr = app.add_subcommand("correlated", "Running-mean std of a dependent sequence");
  s_corr->add_option("--nmin", correlated.nmin, "Smallest n")->capture_default_str();
  s_corr->add_option("--nmax", correlated.nmax, "Largest n")->capture_default_str();
  s_corr->add_option("--points", correlated.points, "Log-spaced n values")->capture_default_str();
  s_corr->add_option("--reps", correlated.reps, "Replicates per n")->capture_default_str();

  FitParams fit;
  auto* s_fit = app.add_subcommand("fit", "Least-squares line fit of a CSV with columns x,y[,sigma]");
  s_fit->add_option("--input", fit.input, "CSV path or builtin:paper")->capture_default_str();
  s_fit->add_flag("--weighted", fit.weighted, "Weight by the sigma column");
  s_fit->add_option("--confidence", fit.confidence, "Confidence level of the coefficient intervals")->capture_default_str();

  ActivityParams activity;
  auto* s_act = app.add_subcommand("activity", "Posterior of a Poisson source activity");
  s_act->add_option("--a0", activity.a0, "True activity (counts/s)")->capture_default_str();
  s_act->add_option("--n", activity.n, "Number of one-second counts")->capture_default_str();
  s_act->add_option("--lo", activity.lo, "Grid lower bound")->capture_default_str();
  s_act->add_option("--hi", activity.hi, "Grid upper bound")->capture_default_str();
  s_act->add_option("--points", activity.points, "Grid points")->capture_default_str();
  s_act->add_option("--mass", activity.mass, "HDI mass")->capture_default_str();

  ScatterParamsCli scatter;
  auto* s_sc = app.add_subcommand("scatter", "Posterior of (mu_A, sigma_A) for a fluctuating source");
  s_sc->add_option("--mu", scatter.mu, "True mean count rate")->capture_default_str();
  s_sc->add_option("--sigma-a", scatter.sigma_a, "True source fluctuation")->capture_default_str();
  s_sc->add_option("--n", scatter.n, "Number of counts")->capture_default_str();
  s_sc->add_option("--mu-min", scatter.mu_min, "Grid lower bound for mu_A")->capture_default_str();
  s_sc->add_option("--mu-max", scatter.mu_max, "Grid upper bound for mu_A")->capture_default_str();
  s_sc->add_option("--sigma-min", scatter.sigma_min, "Grid lower bound for sigma_A")->capture_default_str();
  s_sc->add_option("--sigma-max", scatter.sigma_max, "Grid upper bound for sigma_A")->capture_default_str();
  s_sc->add_option("--nmu", scatter.nmu, "Grid points in mu_A")->capture_default_str();
  s_sc->add_option("--nsigma", scatter.nsigma, "Grid points in sigma_A")->capture_default_str();

  ResistanceParams resistance;
  auto* s_res = app.add_subcommand("resistance", "Posterior of a resistance under a tolerance or Gaussian prior");
  s_res->add_option("--r-true", resistance.r_true, "True resistance (ohm)")->capture_default_str();
  s_res->add_option("--sigma-r", resistance.sigma_r, "Measurement std (ohm)")->capture_default_str();
  s_res->add_option("--n", resistance.n, "Number of readings (0 gives the prior)")->capture_default_str();
  s_res->add_option("--prior", resistance.prior, "uniform:NOMINAL,TOL or gaussian:MU,SIGMA")->capture_default_str();
  s_res->add_option("--lo", resistance.lo, "Grid lower bound")->capture_default_str();
  s_res->add_option("--hi", resistance.hi, "Grid upper bound")->capture_default_str();
  s_res->add_option("--points", resistance.points, "Grid points")->capture_default_str();
  s_res->add_option("--mass", resistance.mass, "HDI mass")->capture_default_str();

  FailureParams failure;
  auto* s_fail = app.add_subcommand("failure", "Failure onset from truncated-exponential lifetimes");
  s_fail->add_option("--data", failure.data, "Failure times, comma separated")->delimiter(',')->capture_default_str();
  s_fail->add_option("--mass", failure.mass, "Credible mass")->capture_default_str();
  s_fail->add_option("--lo", failure.lo, "Grid lower bound")->capture_default_str();
  s_fail->add_option("--hi", failure.hi, "Grid upper bound")->capture_default_str();
  s_fail->add_option("--points", failure.points, "Grid points")->capture_default_str();

  LighthouseParams lighthouse;
  auto* s_lh = app.add_subcommand("lighthouse", "Lighthouse position from shore flashes");
  s_lh->add_option("--alpha", lighthouse.alpha, "True shore position (km)")->capture_default_str();
  s_lh->add_option("--beta", lighthouse.beta, "True distance offshore (km)")->capture_default_str();
  s_lh->add_option("--n", lighthouse.n, "Number of flashes")->capture_default_str();
  s_lh->add_option("--mode", lighthouse.mode, "1d (alpha, beta known), 2d grid, or mcmc")->capture_default_str();
  s_lh->add_option("--alpha-min", lighthouse.alpha_min, "Grid lower bound for alpha")->capture_default_str();
  s_lh->add_option("--alpha-max", lighthouse.alpha_max, "Grid upper bound for alpha")->capture_default_str();
  s_lh->add_option("--beta-min", lighthouse.beta_min, "Grid lower bound for beta")->capture_default_str();
  s_lh->add_option("--beta-max", lighthouse.beta_max, "Grid upper bound for beta")->capture_default_str();
  s_lh->add_option("--nalpha", lighthouse.nalpha, "Grid points in alpha")->capture_default_str();
  s_lh->add_option("--nbeta", lighthouse.nbeta, "Grid points in beta")->capture_default_str();
  s_lh->add_option("--walkers", lighthouse.walkers, "Ensemble walkers")->capture_default_str();
  s_lh->add_option("--steps", lighthouse.steps, "Sampler steps")->capture_default_str();
  s_lh->add_option("--burn", lighthouse.burn, "Burn-in steps discarded")->capture_default_str();
  s_lh->add_flag("--chain", lighthouse.chain, "Also write the full chain (mcmc mode)");

  OutliersParams outliers;
  auto* s_out = app.add_subcommand("outliers", "Line fit with outlier flags from the mixture model");
  s_out->add_option("--input", outliers.input, "CSV path (x,y,sigma) or builtin:paper")->capture_default_str();
  s_out->add_option("--walkers", outliers.walkers, "Ensemble walkers")->capture_default_str();
  s_out->add_option("--steps", outliers.steps, "Sampler steps")->capture_default_str();
  s_out->add_option("--burn", outliers.burn, "Burn-in steps discarded")->capture_default_str();
  s_out->add_option("--sigma-b", outliers.sigma_b, "Outlier component std")->capture_default_str();
  s_out->add_option("--g0", outliers.g0, "Flag threshold on the posterior mean of g_i")->capture_default_str();
  s_out->add_option("--band-points", outliers.band_points, "x values in the predictive band")->capture_default_str();

  std::string manifest_path;
  auto* s_replay = app.add_subcommand("replay", "Re-run a recorded manifest.json");
  s_replay->add_option("manifest", manifest_path)->required()->check(CLI::ExistingFile);

  const std::vector<std::pair<CLI::App*, Command>> commands{
      {s_clt, make_command("clt", clt, cmd_clt)},
      {s_scaling, make_command("scaling", scaling, cmd_scaling)},
      {s_corr, make_command("correlated", correlated, cmd_correlated)},
      {s_fit, make_command("fit", fit, cmd_fit)},
      {s_act, make_command("activity", activity, cmd_activity)},
      {s_sc, make_command("scatter", scatter, cmd_scatter)},
      {s_res, make_command("resistance", resistance, cmd_resistance)},
      {s_fail, make_command("failure", failure, cmd_failure)},
      {s_lh, make_command("lighthouse", lighthouse, cmd_lighthouse)},
      {s_out, make_command("outliers", outliers, cmd_outliers)},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  ctx.out = out_dir;
  ctx.seed = seed_opt->count() > 0 ? seed : default_seed();

  if (s_replay->parsed()) {
    std::ifstream in(manifest_path);
    json m;
    try {
      m = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(std::string("replay: unreadable manifest: ") + e.what());
    }
    const auto name = m.value("subcommand", std::string{});
    for (const auto& [sub, cmd] : commands) {
      if (cmd.name != name) continue;
      try {
        cmd.load(m.at("params"));
        ctx.seed = m.at("seed").get<std::uint64_t>();
      } catch (const json::exception& e) {
        throw UsageError(std::string("replay: bad manifest: ") + e.what());
      }
      if (seed_opt->count() > 0) ctx.seed = seed;
      cmd.execute(ctx);
      write_manifest(ctx, name, cmd.params(), m.value("args", json::array()));
      return 0;
    }
    throw UsageError("replay: unknown subcommand '" + name + "'");
  }

  // Arguments as typed, minus --out (outputs are location independent).
  json args = json::array();
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    args.push_back(a);
  }
  for (const auto& [sub, cmd] : commands) {
    if (!sub->parsed()) continue;
    cmd.execute(ctx);
    write_manifest(ctx, cmd.name, cmd.params(), args);
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InsufficientDataError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateDesignError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const inferlab::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
