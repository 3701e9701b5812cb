#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rzlab/random_zeta.hpp"
#include "rzlab/zeta_reference.hpp"

using namespace rzlab;

namespace {

const QuasiPrimeSequence kTwoThree{{2, 3}};

}  // namespace

TEST(RandomZeta, BernoulliSeriesGoldenValue) {
  const IndicatorStream ind = sample_indicators(10000, {42, "cramer", 0});
  const Complex v = s1_partial(ind, {2.0, 0.0}, 10000);
  EXPECT_NEAR(v.real(), 0.24335242912060221967, 1e-14);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(RandomZeta, BernoulliSeriesMatchesDirectSum) {
  const IndicatorStream ind = sample_indicators(5000, {7, "cramer", 2});
  const ComplexPoint s{0.7, 3.0};
  Complex direct = std::pow(Complex(3.0), -s.value());
  for (std::uint64_t n = 4; n <= 5000; ++n) {
    if (ind.bit(n)) direct += std::pow(Complex(static_cast<double>(n)), -s.value());
  }
  EXPECT_LT(std::abs(s1_partial(ind, s, 5000) - direct), 1e-11);
  EXPECT_THROW(s1_partial(ind, s, 6000), ParameterError);
}

TEST(RandomZeta, SeriesMomentsSmallCutoff) {
  const SeriesMoments m = s1_moments({2.0, 0.0}, 3);
  EXPECT_NEAR(m.mean_partial.real(), 0.10113769184742637707, 1e-16);
  EXPECT_NEAR(m.var_partial, 0.0010086886041557327067, 1e-17);
  EXPECT_NEAR(m.model_mean_partial.real(), 1.0 / 9.0, 1e-16);
  EXPECT_EQ(m.model_var_partial, 0.0);
}

TEST(RandomZeta, SeriesMomentsPathMatchesSingleCutoffs) {
  const std::vector<std::uint64_t> cutoffs = {10, 1000, 54321};
  const ComplexPoint s{0.6, 1.0};
  const auto path = s1_moments_path(s, cutoffs);
  ASSERT_EQ(path.size(), 3u);
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    const SeriesMoments single = s1_moments(s, cutoffs[i]);
    EXPECT_LT(std::abs(path[i].mean_partial - single.mean_partial), 1e-12);
    EXPECT_NEAR(path[i].var_partial, single.var_partial, 1e-12);
  }
}

TEST(RandomZeta, ModelMeanMatchesEmpiricalMean) {
  const ComplexPoint s{1.5, 0.0};
  const std::uint64_t n = 2000;
  const SeriesMoments m = s1_moments(s, n);
  const int replicas = 400;
  double sum = 0;
  for (int r = 0; r < replicas; ++r) {
    sum += s1_partial(sample_indicators(n, {3, "cramer", static_cast<std::uint64_t>(r)}), s, n).real();
  }
  EXPECT_NEAR(sum / replicas, m.model_mean_partial.real(), 4.0 * std::sqrt(m.model_var_partial / replicas));
}

TEST(RandomZeta, EulerProductClosedForms) {
  EXPECT_NEAR(euler_product_partial(kTwoThree, {2.0, 0.0}, 3).real(), 1.5, 1e-15);
  EXPECT_NEAR(euler_product_partial(kTwoThree, {1.0, 0.0}, 3).real(), 3.0, 1e-15);
  EXPECT_NEAR(euler_product_partial(kTwoThree, {2.0, 0.0}, 2).real(), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(euler_product_partial(QuasiPrimeSequence{}, {2.0, 0.0}, 100), Complex(1.0));
}

TEST(RandomZeta, LogExpansionClosedForm) {
  const ComplexEvaluation e = log_zeta_partial(kTwoThree, {2.0, 0.0}, 2);
  EXPECT_NEAR(e.log_value.real(), std::log(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(e.value.real(), 4.0 / 3.0, 1e-12);
  EXPECT_LE(e.tail_bound, 1e-12);
  EXPECT_FALSE(e.warning);
}

TEST(RandomZeta, ProductAndLogExpansionAgree) {
  const QuasiPrimeSequence seq = sample_indicators(100000, {42, "cramer", 0}).sequence();
  for (const ComplexPoint s : {ComplexPoint{1.5, 0.0}, ComplexPoint{2.0, 10.0}, ComplexPoint{3.0, -4.0},
                               ComplexPoint{1.1, 0.5}}) {
    const Complex prod = euler_product_partial(seq, s, 100000);
    const ComplexEvaluation e = log_zeta_partial(seq, s, 100000);
    EXPECT_LT(std::abs(e.value - prod) / std::abs(prod), 1e-11) << to_string(s);
    EXPECT_LT(std::abs(std::exp(e.log_value) - e.value), 1e-12 * std::abs(e.value));
  }
}

TEST(RandomZeta, LowOrderExpansionBoundedByTail) {
  const QuasiPrimeSequence seq = sample_indicators(20000, {1, "cramer", 0}).sequence();
  const ComplexPoint s{0.8, 2.0};
  const Complex exact = std::log(euler_product_partial(seq, s, 20000));
  for (int order = 2; order <= 6; ++order) {
    const ComplexEvaluation e = log_zeta_partial(seq, s, 20000, order);
    const Complex d = e.log_value - exact;
    const double wrapped = std::abs(std::remainder(d.imag(), 2 * std::numbers::pi));
    EXPECT_LE(std::hypot(d.real(), wrapped), e.tail_bound) << "order " << order;
  }
}

TEST(RandomZeta, HalfPlaneWarning) {
  const QuasiPrimeSequence seq = sample_indicators(1000, {1, "cramer", 0}).sequence();
  EXPECT_TRUE(log_zeta_partial(seq, {0.5, 0.0}, 1000, 3).warning);
  EXPECT_FALSE(log_zeta_partial(seq, {0.5, 0.0}, 1000, 1).warning);
  EXPECT_TRUE(std::isinf(log_tail_bound(0.5, 1)));
}

TEST(RandomZeta, TailBoundDecreasesWithOrder) {
  for (double sigma : {0.6, 1.0, 2.0}) {
    double prev = log_tail_bound(sigma, 2);
    for (int m = 3; m < 20; ++m) {
      const double b = log_tail_bound(sigma, m);
      EXPECT_LT(b, prev);
      prev = b;
    }
  }
  EXPECT_LE(log_tail_bound(2.0, default_log_order(2.0)), 1e-12);
}

TEST(RandomZeta, DomainChecks) {
  EXPECT_THROW(log_zeta_partial(kTwoThree, {0.0, 1.0}, 3), DomainError);
  EXPECT_THROW(log_zeta_partial(kTwoThree, {1.0, 0.0}, 3, 65), ParameterError);
  EXPECT_THROW(euler_product_partial(QuasiPrimeSequence{{1}}, {2.0, 0.0}, 3), ParameterError);
}

TEST(RandomZeta, PoleExponentOfReferenceZeta) {
  std::vector<double> sigmas, mags;
  for (double d : {0.02, 0.01, 0.005}) {
    sigmas.push_back(1.0 + d);
    mags.push_back(std::abs(zeta_via_eta({1.0 + d, 0.0})));
  }
  EXPECT_NEAR(fit_pole_exponent(sigmas, mags), 1.0, 0.01);
}

TEST(RandomZeta, Quantiles) {
  EXPECT_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_EQ(quantile({5}, 0.9), 5.0);
}

TEST(RandomZeta, CriticalLineScanShape) {
  CriticalLineConfig cfg;
  cfg.key = {42, "cramer", 0};
  cfg.sigmas = {0.8, 0.5};
  cfg.cutoffs = {1000, 10000};
  cfg.replicas = 3;
  const CriticalLineTable t = critical_line_scan(cfg);
  EXPECT_EQ(t.rows.size(), 2u * 2u * 3u);
  EXPECT_EQ(t.summary.size(), 4u);
  for (const auto& row : t.rows) {
    if (row.sigma <= 0.5) {
      EXPECT_TRUE(std::isnan(row.abs_zeta));
    } else {
      EXPECT_TRUE(std::isfinite(row.abs_zeta));
    }
    EXPECT_GE(row.abs_centered_s1, 0.0);
  }
  cfg.sigmas = {0.5, 0.8};
  EXPECT_THROW(critical_line_scan(cfg), ParameterError);
}

TEST(RandomZeta, CriticalLineScanIndependentOfThreads) {
  CriticalLineConfig cfg;
  cfg.key = {9, "cramer", 0};
  cfg.sigmas = {0.7, 0.6};
  cfg.cutoffs = {500, 5000};
  cfg.replicas = 6;
  const CriticalLineTable a = critical_line_scan(cfg);
  cfg.threads = 4;
  const CriticalLineTable b = critical_line_scan(cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].zeta, b.rows[i].zeta);
    EXPECT_EQ(a.rows[i].abs_centered_s1, b.rows[i].abs_centered_s1);
  }
}
