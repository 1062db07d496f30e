#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "inferlab/bayes.hpp"
#include "inferlab/distributions.hpp"
#include "inferlab/estimators.hpp"

namespace {

using namespace inferlab;

double variance(const std::vector<double>& xs) {
  const double s = sample_std(xs);
  return s * s;
}

// Source whose uniform() always returns the same value.
struct ConstantSource {
  double value;
  double uniform() { return value; }
};

TEST(Sample, UniformStdMatchesTwelfthRule) {
  RandomSource rng(1);
  const auto xs = sample(Uniform{0.0, 10.0}, rng, 1'000'000);
  EXPECT_NEAR(sample_std(xs), 10.0 / std::sqrt(12.0), 0.01);
  EXPECT_NEAR(sample_mean(xs), 5.0, 0.02);
}

TEST(Sample, NormalOneSigmaFraction) {
  RandomSource rng(2);
  const auto xs = sample(Normal{0.0, 1.0}, rng, 1'000'000);
  std::size_t inside = 0;
  for (double x : xs) inside += std::fabs(x) <= 1.0;
  EXPECT_NEAR(static_cast<double>(inside) / xs.size(), 0.683, 0.002);
}

TEST(Sample, PoissonLargeMeanMoments) {
  RandomSource rng(3);
  const auto xs = sample(Poisson{1000.0}, rng, 100'000);
  EXPECT_NEAR(sample_mean(xs), 1000.0, 1.0);
  EXPECT_NEAR(variance(xs), 1000.0, 30.0);
  for (double x : xs) ASSERT_EQ(x, std::floor(x));
}

TEST(Sample, PoissonSmallMeanMatchesPmf) {
  RandomSource rng(4);
  const double lambda = 3.0;
  const int n = 200'000;
  const auto xs = sample(Poisson{lambda}, rng, n);
  std::vector<double> counts(12, 0.0);
  for (double x : xs) counts[std::min<std::size_t>(static_cast<std::size_t>(x), 11)] += 1.0;
  double chi2 = 0.0;
  double tail = 1.0;
  for (int k = 0; k < 11; ++k) {
    const double p = std::exp(log_pdf(Poisson{lambda}, k));
    tail -= p;
    chi2 += (counts[k] - n * p) * (counts[k] - n * p) / (n * p);
  }
  chi2 += (counts[11] - n * tail) * (counts[11] - n * tail) / (n * tail);
  const boost::math::chi_squared law(11.0);
  EXPECT_LT(chi2, boost::math::quantile(law, 0.999));
}

TEST(Sample, PoissonAcrossInversionThreshold) {
  for (double lambda : {29.5, 30.0, 45.0}) {
    RandomSource rng(static_cast<std::uint64_t>(lambda * 10));
    const auto xs = sample(Poisson{lambda}, rng, 200'000);
    const double se = std::sqrt(lambda / 200'000.0);
    EXPECT_NEAR(sample_mean(xs), lambda, 5.0 * se) << lambda;
    EXPECT_NEAR(variance(xs) / lambda, 1.0, 0.02) << lambda;
  }
}

TEST(Sample, CauchyMedianAndQuartiles) {
  RandomSource rng(5);
  const auto xs = sample(Cauchy{2.0, 3.0}, rng, 400'000);
  EXPECT_NEAR(median(xs), 2.0, 0.03);
  EXPECT_NEAR(quantile(xs, 0.75) - quantile(xs, 0.25), 6.0, 0.06);
}

TEST(Sample, TruncatedExponentialMeanAndSupport) {
  RandomSource rng(6);
  const auto xs = sample(TruncatedExponential{10.0}, rng, 200'000);
  for (double x : xs) ASSERT_GE(x, 10.0);
  EXPECT_NEAR(sample_mean(xs), 11.0, 0.01);
  EXPECT_NEAR(sample_std(xs), 1.0, 0.01);
}

TEST(Sample, IsDeterministicGivenSeed) {
  RandomSource a(9), b(9);
  EXPECT_EQ(sample(Normal{1.0, 2.0}, a, 1000), sample(Normal{1.0, 2.0}, b, 1000));
}

TEST(Sample, InvalidParametersThrow) {
  RandomSource rng(0);
  EXPECT_THROW(sample(Uniform{1.0, 1.0}, rng, 10), ParameterError);
  EXPECT_THROW(sample(Normal{0.0, 0.0}, rng, 10), ParameterError);
  EXPECT_THROW(sample(Poisson{-1.0}, rng, 10), ParameterError);
  EXPECT_THROW(sample(Cauchy{0.0, -2.0}, rng, 10), ParameterError);
  EXPECT_THROW(sample(TruncatedExponential{kInf}, rng, 10), ParameterError);
  EXPECT_THROW(sample(Normal{0.0, 1.0}, rng, 0), ParameterError);
}

TEST(Sample, CauchyMidpointDrawIsCenter) {
  ConstantSource half{0.5};
  EXPECT_DOUBLE_EQ(sample_one(Cauchy{4.0, 2.0}, half), 4.0);
}

TEST(LogPdf, ReferenceValues) {
  EXPECT_NEAR(log_pdf(Normal{0.0, 1.0}, 0.0), -0.91894, 1e-5);
  EXPECT_NEAR(log_pdf(Cauchy{0.0, 1.0}, 0.0), -1.14473, 1e-5);
  EXPECT_EQ(log_pdf(TruncatedExponential{10.0}, 9.0), -kInf);
  EXPECT_DOUBLE_EQ(log_pdf(TruncatedExponential{10.0}, 12.0), -2.0);
  EXPECT_EQ(log_pdf(Uniform{0.0, 1.0}, 1.5), -kInf);
  EXPECT_EQ(log_pdf(Poisson{2.0}, 1.5), -kInf);
  EXPECT_EQ(log_pdf(Poisson{2.0}, -1.0), -kInf);
}

TEST(LogPdf, ContinuousDensitiesIntegrateToOne) {
  const std::vector<Distribution> dists{Uniform{-1.0, 3.0}, Normal{2.0, 0.5}, TruncatedExponential{1.0}};
  for (const auto& d : dists) {
    const auto xs = linspace(-10.0, 40.0, 500'001);
    std::vector<double> ps(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = std::exp(log_pdf(d, xs[i]));
    EXPECT_NEAR(trapezoid(xs, ps), 1.0, 1e-3);
  }
}

TEST(LogPdf, CauchyDensityIntegratesToCdfDifference) {
  const Distribution d = Cauchy{1.0, 2.0};
  const auto xs = linspace(-50.0, 50.0, 200'001);
  std::vector<double> ps(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = std::exp(log_pdf(d, xs[i]));
  EXPECT_NEAR(trapezoid(xs, ps), cdf(d, 50.0) - cdf(d, -50.0), 1e-8);
}

TEST(LogPdf, PoissonMassSumsToOne) {
  double total = 0.0;
  for (int k = 0; k < 200; ++k) total += std::exp(log_pdf(Poisson{40.0}, k));
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(cdf(Poisson{40.0}, 199.0), 1.0, 1e-12);
}

TEST(Cdf, ClosedForms) {
  EXPECT_DOUBLE_EQ(cdf(Uniform{0.0, 4.0}, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(cdf(Cauchy{0.0, 1.0}, 0.0), 0.5);
  EXPECT_NEAR(cdf(Cauchy{0.0, 1.0}, 1.0), 0.75, 1e-15);
  EXPECT_NEAR(cdf(TruncatedExponential{2.0}, 3.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(cdf(Normal{1.0, 2.0}, 3.0), normal_cdf(1.0), 1e-15);
}

TEST(Moments, CauchyHasNone) {
  EXPECT_FALSE(mean(Cauchy{0.0, 1.0}).has_value());
  EXPECT_FALSE(stddev(Cauchy{0.0, 1.0}).has_value());
  EXPECT_DOUBLE_EQ(*mean(TruncatedExponential{10.0}), 11.0);
  EXPECT_DOUBLE_EQ(*stddev(Uniform{0.0, 12.0}), 12.0 / std::sqrt(12.0));
}

TEST(BatesPdf, ReferenceValues) {
  EXPECT_NEAR(bates_pdf(5.0, 1, 0.0, 10.0), 0.1, 1e-12);
  EXPECT_NEAR(bates_pdf(5.0, 2, 0.0, 10.0), 0.2, 1e-12);
  EXPECT_EQ(bates_pdf(-0.1, 3), 0.0);
  EXPECT_EQ(bates_pdf(1.1, 3), 0.0);
  EXPECT_THROW(bates_pdf(0.5, 0), ParameterError);
}

TEST(BatesPdf, IntegratesToOne) {
  for (int n : {1, 2, 3, 5, 10, 20}) {
    const auto xs = linspace(0.0, 1.0, 20'001);
    std::vector<double> ps(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = bates_pdf(xs[i], n);
    EXPECT_NEAR(trapezoid(xs, ps), 1.0, 1e-4) << n;
  }
}

TEST(BatesPdf, MatchesSimulatedPairMeans) {
  RandomSource rng(12);
  const int n = 1'000'000;
  const int bins = 20;
  std::vector<double> counts(bins, 0.0);
  for (int i = 0; i < n; ++i) {
    const double m = 0.5 * (rng.uniform() + rng.uniform());
    counts[std::min(bins - 1, static_cast<int>(m * bins))] += 1.0;
  }
  for (int b = 0; b < bins; ++b) {
    const auto xs = linspace(static_cast<double>(b) / bins, static_cast<double>(b + 1) / bins, 101);
    std::vector<double> ps(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = bates_pdf(xs[i], 2);
    const double expected = n * trapezoid(xs, ps);
    EXPECT_NEAR(counts[b], expected, 5.0 * std::sqrt(expected)) << b;
  }
}

TEST(ParseDistribution, AcceptsEveryFamily) {
  EXPECT_TRUE(std::holds_alternative<Uniform>(parse_distribution("uniform:0,10")));
  const auto n = std::get<Normal>(parse_distribution("normal:1.5,2e-1"));
  EXPECT_DOUBLE_EQ(n.mu, 1.5);
  EXPECT_DOUBLE_EQ(n.sigma, 0.2);
  EXPECT_DOUBLE_EQ(std::get<Poisson>(parse_distribution("poisson:1000")).lambda, 1000.0);
  EXPECT_TRUE(std::holds_alternative<Cauchy>(parse_distribution("cauchy:0,1")));
  EXPECT_DOUBLE_EQ(std::get<TruncatedExponential>(parse_distribution("truncexp:10")).theta, 10.0);
}

TEST(ParseDistribution, RejectsMalformedText) {
  for (const char* text : {"uniform", "uniform:0", "uniform:0,x", "gamma:1,2", "normal:0,-1", "poisson:",
                           "uniform:0,,1", "cauchy:0,1,2"}) {
    EXPECT_THROW(parse_distribution(text), ParameterError) << text;
  }
}

}  // namespace
