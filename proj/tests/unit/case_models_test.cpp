#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "inferlab.hpp"
#include "support/mixture_oracle.hpp"

namespace {

using namespace inferlab;

// ---------------------------------------------------------------------------
// Activity and scatter

TEST(Activity, GeneratedMeanNearSource) {
  RandomSource rng(1);
  const auto d = activity_generate(1000.0, 50, rng);
  ASSERT_EQ(d.size(), 50u);
  EXPECT_NEAR(sample_mean(d.counts), 1000.0, 15.0);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_DOUBLE_EQ(d.errors[i], std::sqrt(d.counts[i]));
}

TEST(Activity, SingleDraw) {
  RandomSource rng(2);
  const auto d = activity_generate(1000.0, 1, rng);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.errors[0], std::sqrt(d.counts[0]));
  EXPECT_THROW(activity_generate(0.0, 3, rng), ParameterError);
  EXPECT_THROW(ActivityData::from_counts({4.0, 0.0}), ParameterError);
}

TEST(Activity, LoglikeMaximizers) {
  const auto single = ActivityData::from_counts({1000.0});
  EXPECT_GT(activity_loglike(1000.0, single), activity_loglike(999.0, single));
  EXPECT_GT(activity_loglike(1000.0, single), activity_loglike(1001.0, single));
  ActivityData pair{{990.0, 1010.0}, {30.0, 30.0}};
  EXPECT_NEAR(activity_loglike(1000.0 + 1e-3, pair), activity_loglike(1000.0 - 1e-3, pair), 1e-12);
  EXPECT_THROW(activity_loglike(1.0, ActivityData{}), InsufficientDataError);
}

TEST(Activity, GridMapIsInverseVarianceWeightedMean) {
  RandomSource rng(3);
  const ActivityModel model{activity_generate(1000.0, 50, rng)};
  const auto grid = grid_posterior_1d(model, 975.0, 1020.0, 500);
  EXPECT_NEAR(map_estimate(grid), weighted_mean(model.data), grid.step());
}

TEST(Scatter, ZeroScatterReducesToActivity) {
  RandomSource rng(4);
  const auto d = activity_generate(1000.0, 20, rng);
  for (double mu : {980.0, 1000.0, 1013.5}) EXPECT_NEAR(scatter_loglike({mu, 0.0}, d), activity_loglike(mu, d), 1e-9);
  EXPECT_EQ(scatter_loglike({1000.0, -1.0}, d), -kInf);
}

TEST(Scatter, PriorRejectsNonPositiveSigma) {
  const ScatterModel model{ActivityData::from_counts({1000.0, 1010.0})};
  const std::array<double, 2> zero{1000.0, 0.0}, pos{1000.0, 1.0};
  EXPECT_EQ(log_posterior(model, zero), -kInf);
  EXPECT_GT(log_posterior(model, pos), -kInf);
}

TEST(Scatter, EqualErrorsPeakAtSampleMean) {
  ActivityData d{{980.0, 1000.0, 1030.0, 1010.0}, {30.0, 30.0, 30.0, 30.0}};
  const double m = sample_mean(d.counts);
  for (double s : {0.5, 10.0, 40.0}) {
    EXPECT_GT(scatter_loglike({m, s}, d), scatter_loglike({m + 0.01, s}, d));
    EXPECT_GT(scatter_loglike({m, s}, d), scatter_loglike({m - 0.01, s}, d));
  }
}

TEST(Scatter, CredibleRegionCoverage) {
  RandomSource rng(5);
  const int reps = 500;
  int covered = 0;
  const std::vector<double> masses{0.68};
  for (int r = 0; r < reps; ++r) {
    const ScatterModel model{scatter_generate(1000.0, 10.0, 50, rng)};
    const auto grid = grid_posterior_2d(model, Box{970.0, 1030.0, 0.0, 60.0}, 121, 121);
    const double level = contour_levels(grid, masses)[0];
    covered += density_near(grid, 1000.0, 10.0) >= level;
  }
  EXPECT_NEAR(static_cast<double>(covered) / reps, 0.68, 0.05);
}

// ---------------------------------------------------------------------------
// Resistance

TEST(Resistance, NoDataReproducesUniformPrior) {
  const auto grid = resistance_posterior({{}, 5.0, UniformTolerance{500.0, 0.05}}, 470.0, 535.0, 651);
  for (std::size_t i = 0; i < grid.coords.size(); ++i) {
    const double r = grid.coords[i];
    if (r > 475.0 + 1e-9 && r < 525.0 - 1e-9) {
      EXPECT_NEAR(grid.density[i], grid.density[325], 1e-12);
    } else if (r < 475.0 - 1e-9 || r > 525.0 + 1e-9) {
      EXPECT_EQ(grid.density[i], 0.0);
    }
  }
  EXPECT_NEAR(grid.density[325], 1.0 / 50.0, 1e-3);
}

TEST(Resistance, NoDataReproducesGaussianPrior) {
  const auto grid = resistance_posterior({{}, 5.0, GaussianPrior{490.0, 2.0}}, 470.0, 535.0, 651);
  for (std::size_t i = 0; i < grid.coords.size(); ++i)
    EXPECT_NEAR(grid.density[i], std::exp(log_pdf(Normal{490.0, 2.0}, grid.coords[i])), 1e-6);
}

TEST(Resistance, LargeSampleMapsAgreeUnderBothPriors) {
  RandomSource rng(6);
  const auto readings = resistance_generate(512.0, 5.0, 200, rng);
  const auto gu = resistance_posterior({readings, 5.0, UniformTolerance{}}, 470.0, 535.0, 200);
  const auto gg = resistance_posterior({readings, 5.0, GaussianPrior{}}, 470.0, 535.0, 200);
  EXPECT_NEAR(map_estimate(gu), 512.0, 1.0);
  EXPECT_NEAR(map_estimate(gg), 512.0, 1.0);
}

TEST(Resistance, Errors) {
  EXPECT_THROW(resistance_posterior({{}, 5.0, UniformTolerance{}}, 530.0, 540.0, 50), EmptySupportError);
  EXPECT_THROW(resistance_posterior({{}, 0.0, UniformTolerance{}}, 470.0, 535.0, 50), ParameterError);
  EXPECT_THROW(resistance_posterior({{}, 5.0, GaussianPrior{490.0, 0.0}}, 470.0, 535.0, 50), ParameterError);
}

// ---------------------------------------------------------------------------
// Failure onset

TEST(Failure, ClassicalEstimator) {
  const auto one = failure_classical({{11.0}});
  EXPECT_DOUBLE_EQ(one.theta_hat, 10.0);
  EXPECT_DOUBLE_EQ(one.ci.lo, 9.0);
  EXPECT_DOUBLE_EQ(one.ci.hi, 11.0);
  const auto three = failure_classical({{10.0, 12.0, 15.0}});
  EXPECT_NEAR(three.theta_hat, 37.0 / 3.0 - 1.0, 1e-12);
  EXPECT_NEAR(three.ci.lo, 10.756, 1e-3);
  EXPECT_NEAR(three.ci.hi, 11.911, 1e-3);
  EXPECT_GT(three.ci.lo, 10.0);
  EXPECT_DOUBLE_EQ(failure_classical({{7.0, 7.0, 7.0, 7.0}}).theta_hat, 6.0);
  EXPECT_THROW(failure_classical({{}}), InsufficientDataError);
  EXPECT_THROW(failure_classical({{3.0, -1.0}}), ParameterError);
}

TEST(Failure, LoglikeSupportEdge) {
  const FailureData d{{10.0, 12.0, 15.0}};
  EXPECT_TRUE(std::isfinite(failure_loglike(10.0 - 1e-9, d)));
  EXPECT_EQ(failure_loglike(10.0 + 1e-9, d), -kInf);
  EXPECT_DOUBLE_EQ(failure_loglike(9.0, d) - failure_loglike(8.0, d), 3.0);
}

TEST(Failure, CredibleIntervalReference) {
  const FailureData d{{10.0, 12.0, 15.0}};
  const auto ci = failure_credible(d, 0.65);
  EXPECT_NEAR(ci.lo, 9.650, 1e-3);
  EXPECT_DOUBLE_EQ(ci.hi, 10.0);
  EXPECT_NEAR(failure_credible(d, 1e-12).width(), 0.0, 1e-11);
  const FailureData doubled{{10.0, 12.0, 15.0, 10.5, 13.0, 20.0}};
  EXPECT_NEAR(failure_credible(doubled, 0.65).width(), 0.5 * ci.width(), 1e-12);
  EXPECT_THROW(failure_credible(d, 1.0), ParameterError);
}

TEST(Failure, AnalyticIntervalMatchesGridHdi) {
  const FailureModel model{{{10.0, 12.0, 15.0}}};
  const auto grid = grid_posterior_1d(model, 5.0, 11.0, 1201);
  for (double mass : {0.5, 0.65, 0.9}) {
    const auto exact = failure_credible(model.data, mass);
    const auto numeric = hdi(grid, mass);
    EXPECT_NEAR(numeric.lo, exact.lo, 2.0 * grid.step()) << mass;
    EXPECT_NEAR(numeric.hi, exact.hi, 2.0 * grid.step()) << mass;
  }
}

// ---------------------------------------------------------------------------
// Lighthouse

struct HalfSource {
  double uniform() { return 0.5; }
};

TEST(Lighthouse, StraightDownFlashLandsBelowLighthouse) {
  HalfSource rng;
  const auto d = lighthouse_generate(3.5, 2.0, 4, rng);
  for (double x : d.positions) EXPECT_DOUBLE_EQ(x, 3.5);
  RandomSource r(0);
  EXPECT_THROW(lighthouse_generate(0.0, 0.0, 4, r), ParameterError);
}

TEST(Lighthouse, SampleMedianConsistent) {
  RandomSource rng(7);
  const std::size_t n = 100'000;
  const auto d = lighthouse_generate(5.0, 4.0, n, rng);
  EXPECT_NEAR(median(d.positions), 5.0, 3.0 * (kPi * 4.0 / 2.0) / std::sqrt(static_cast<double>(n)));
}

TEST(Lighthouse, SingleFlashMaximizedAtItsPosition) {
  const std::vector<double> xs{2.7};
  const LighthouseAlphaModel model{{xs}, 1.0, -20.0, 20.0};
  const auto grid = grid_posterior_1d(model, -20.0, 20.0, 4001);
  EXPECT_NEAR(map_estimate(grid), 2.7, grid.step());
}

TEST(Lighthouse, LargeBetaFlattensAlpha) {
  const std::vector<double> xs{-3.0, 0.5, 4.0};
  const double near = std::fabs(lighthouse_loglike(0.0, 1.0, xs) - lighthouse_loglike(2.0, 1.0, xs));
  const double far = std::fabs(lighthouse_loglike(0.0, 1e4, xs) - lighthouse_loglike(2.0, 1e4, xs));
  EXPECT_GT(near, 0.1);
  EXPECT_LT(far, 1e-6);
  EXPECT_EQ(lighthouse_loglike(0.0, 0.0, xs), -kInf);
}

TEST(Lighthouse, TwoDimensionalMapNearTruth) {
  // Posterior std of alpha at N = 1000 is about beta sqrt(2 / N) = 0.18, so
  // 0.3 is a 1.7 sigma band: most, not all, realizations land inside.
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomSource rng(seed);
    const LighthouseModel model{lighthouse_generate(5.0, 4.0, 1000, rng)};
    const auto grid = grid_posterior_2d(model, Box{2.0, 8.0, 1.0, 7.0}, 101, 101);
    const auto [alpha, beta] = map_estimate(grid);
    inside += std::fabs(alpha - 5.0) <= 0.3 && std::fabs(beta - 4.0) <= 0.3;
  }
  EXPECT_GE(inside, 8);
}

TEST(Lighthouse, OneDimensionalMapImprovesWithData) {
  int wins = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    RandomSource rng(seed);
    const auto data = lighthouse_generate(5.0, 4.0, 1000, rng);
    const LighthouseData small{{data.positions.begin(), data.positions.begin() + 10}};
    const auto g_small = grid_posterior_1d(LighthouseAlphaModel{small, 4.0, -20.0, 30.0}, -20.0, 30.0, 2001);
    const auto g_large = grid_posterior_1d(LighthouseAlphaModel{data, 4.0, -20.0, 30.0}, -20.0, 30.0, 2001);
    wins += std::fabs(map_estimate(g_large) - 5.0) < std::fabs(map_estimate(g_small) - 5.0);
  }
  EXPECT_GE(wins, 18);
}

// ---------------------------------------------------------------------------
// Outlier mixture

Dataset small_line() {
  return Dataset{{0.0, 1.0, 2.0, 3.0}, {-5.0, -3.0, -1.0, 1.0}, std::vector<double>{1.0, 2.0, 1.0, 2.0}};
}

std::vector<double> theta_with(double b, double a, std::size_t n, double g) {
  std::vector<double> t(n + 2, g);
  t[0] = b;
  t[1] = a;
  return t;
}

TEST(Mixture, PriorBoundaries) {
  const MixtureRegressionModel model(small_line(), 100.0);
  EXPECT_EQ(model.dimension(), 6u);
  EXPECT_DOUBLE_EQ(mixture_logprior(theta_with(-5.0, 2.0, 4, 0.5), model), 0.0);
  auto t = theta_with(-5.0, 2.0, 4, 0.5);
  t[3] = 1.2;
  EXPECT_EQ(mixture_logprior(t, model), -kInf);
  t[3] = 0.0;
  EXPECT_EQ(mixture_logprior(t, model), -kInf);
  t[3] = 1.0;
  EXPECT_EQ(mixture_logprior(t, model), -kInf);
  EXPECT_THROW(mixture_logprior(theta_with(0.0, 0.0, 3, 0.5), model), ParameterError);
  EXPECT_THROW(mixture_loglike(theta_with(0.0, 0.0, 5, 0.5), model), ParameterError);
}

TEST(Mixture, ConstructorValidation) {
  Dataset no_sigma{{0.0, 1.0}, {0.0, 1.0}, std::nullopt};
  EXPECT_THROW(MixtureRegressionModel(no_sigma, 100.0), ParameterError);
  EXPECT_THROW(MixtureRegressionModel(small_line(), 0.0), ParameterError);
  EXPECT_THROW(MixtureRegressionModel(small_line(), 100.0, 1.0), ParameterError);
}

TEST(Mixture, AllInliersEqualsWeightedGaussianLoglike) {
  const auto ds = small_line();
  const MixtureRegressionModel model(ds, 100.0);
  for (double a : {1.5, 2.0, 2.3}) {
    double expected = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double s = (*ds.sigmas)[i];
      const double r = (ds.ys[i] - a * ds.xs[i] + 5.0) / s;
      expected += -0.5 * std::log(2.0 * kPi * s * s) - 0.5 * r * r;
    }
    EXPECT_NEAR(mixture_loglike(theta_with(-5.0, a, 4, 0.9), model), expected, 1e-12);
  }
}

TEST(Mixture, AllOutliersIgnoreTheLine) {
  const MixtureRegressionModel model(small_line(), 100.0);
  const double v = mixture_loglike(theta_with(-5.0, 2.0, 4, 0.1), model);
  EXPECT_DOUBLE_EQ(mixture_loglike(theta_with(40.0, -7.0, 4, 0.1), model), v);
  EXPECT_DOUBLE_EQ(mixture_loglike(theta_with(-5.0, 2.0 + 1e-6, 4, 0.2), model), v);
}

TEST(Mixture, OutlierDatasetConstruction) {
  RandomSource rng(10);
  const auto od = outlier_dataset(rng);
  const auto& ds = od.data;
  ASSERT_EQ(ds.size(), 20u);
  ASSERT_EQ(od.outlier_indices.size(), 3u);
  EXPECT_TRUE(std::is_sorted(ds.xs.begin(), ds.xs.end()));
  for (double x : ds.xs) {
    EXPECT_GE(x, 0.5);
    EXPECT_LT(x, 99.5);
  }
  for (double s : *ds.sigmas) {
    EXPECT_GE(s, 2.0);
    EXPECT_LT(s, 22.0);
  }
  std::vector<double> injected;
  for (std::size_t i : od.outlier_indices) {
    EXPECT_LT(i, 19u);
    injected.push_back(ds.ys[i]);
  }
  std::sort(injected.begin(), injected.end());
  EXPECT_EQ(injected, (std::vector<double>{95.9, 115.9, 174.5}));
  EXPECT_TRUE(std::adjacent_find(od.outlier_indices.begin(), od.outlier_indices.end()) == od.outlier_indices.end());
}

TEST(Mixture, CorrectAssignmentBeatsAllInliers) {
  RandomSource rng(10);
  const auto od = outlier_dataset(rng);
  const MixtureRegressionModel model(od.data, 100.0);
  auto all_in = theta_with(-5.0, 2.0, 20, 0.9);
  auto correct = all_in;
  for (std::size_t i : od.outlier_indices) correct[i + 2] = 0.1;
  EXPECT_GT(mixture_loglike(correct, model), mixture_loglike(all_in, model));
}

TEST(Mixture, SamplerAgreesWithExactMarginal) {
  RandomSource rng(10);
  const auto od = outlier_dataset(rng);
  OutlierFitConfig cfg;
  cfg.nsteps = 30000;
  cfg.nburn = 10000;
  cfg.seed = 2;
  const auto fit = fit_outliers(od.data, cfg);
  const auto exact = oracle::mixture_exact(MixtureRegressionModel(od.data, 100.0), 1.0, 3.0, -60.0, 50.0);
  ASSERT_EQ(fit.g_mean.size(), exact.g_mean.size());
  for (std::size_t i = 0; i < fit.g_mean.size(); ++i) EXPECT_NEAR(fit.g_mean[i], exact.g_mean[i], 0.06) << i;
  const auto means = column_means(fit.samples);
  EXPECT_NEAR(means[1], exact.mean_a, 0.03);
  EXPECT_NEAR(means[0], exact.mean_b, 2.0);
  EXPECT_EQ(fit.outliers, exact.outliers);
}

Dataset clean_line(RandomSource& rng, double noise_scale) {
  auto od = outlier_dataset(rng, 2.0, -5.0, 20, {});
  auto& ds = od.data;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double truth = 2.0 * ds.xs[i] - 5.0;
    ds.ys[i] = truth + noise_scale * (ds.ys[i] - truth);
  }
  return ds;
}

TEST(Mixture, CleanDataRarelyFlagged) {
  int clean_runs = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    RandomSource rng(1000 + r);
    OutlierFitConfig cfg;
    cfg.nsteps = 15000;
    cfg.nburn = 5000;
    cfg.seed = static_cast<std::uint64_t>(r);
    clean_runs += fit_outliers(clean_line(rng, 0.1), cfg).outliers.empty();
  }
  EXPECT_GE(clean_runs, 19);
}

TEST(Mixture, FarOffDuplicateIsFlagged) {
  RandomSource rng(11);
  auto ds = clean_line(rng, 0.1);
  ds.xs.push_back(ds.xs[7]);
  ds.ys.push_back(ds.ys[7] + 300.0);
  ds.sigmas->push_back((*ds.sigmas)[7]);
  OutlierFitConfig cfg;
  cfg.nsteps = 15000;
  cfg.nburn = 5000;
  cfg.seed = 4;
  const auto fit = fit_outliers(ds, cfg);
  EXPECT_EQ(fit.outliers, (std::vector<std::size_t>{20}));
}

TEST(Mixture, SamplerRejectsTooFewWalkers) {
  RandomSource rng(12);
  OutlierFitConfig cfg;
  cfg.nwalkers = 20;
  EXPECT_THROW(fit_outliers(clean_line(rng, 1.0), cfg), ParameterError);
}

TEST(CredibleBand, MeanAndWidthFromSamples) {
  FlatSamples fs{2, {0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0}};
  const std::vector<double> xs{0.0, 1.0};
  const auto band = credible_band(fs, xs, 2.0);
  ASSERT_EQ(band.size(), 2u);
  EXPECT_DOUBLE_EQ(band[0].mean, 1.0);
  EXPECT_NEAR(band[0].hi - band[0].mean, 2.0 * std::sqrt(4.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(band[1].mean, 3.0);
  EXPECT_NEAR(band[1].mean - band[1].lo, 2.0 * std::sqrt(8.0 / 3.0), 1e-12);
}

}  // namespace
