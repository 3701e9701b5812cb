#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rzlab/zeta_reference.hpp"

using namespace rzlab;

namespace {

// mpmath values at 30 digits.
constexpr double kStieltjes[] = {0.57721566490153286061,   -0.072815845483676724861,  -0.0096903631928723184845,
                                 0.0020538344203033458662, 0.0023253700654673000575,  0.00079332381730106270175,
                                 -0.00023876934543019960987, -0.00052728956705775104607, -0.0003521233538030395096};

}  // namespace

TEST(ZetaReference, EtaAtThirty) {
  const EtaValue e = eta({30.0, 0.0});
  EXPECT_NEAR(e.value.real(), 0.99999999906868228145, 1e-13);
  EXPECT_LE(e.error_bound, 1e-13);
}

TEST(ZetaReference, EtaAtOneIsLogTwo) {
  EXPECT_NEAR(eta({1.0, 0.0}).value.real(), std::numbers::ln2, 1e-14);
}

TEST(ZetaReference, EtaOnCriticalLine) {
  const EtaValue e = eta({0.5, 14.0});
  EXPECT_NEAR(e.value.real(), 0.012220891770754763066, 1e-12);
  EXPECT_NEAR(e.value.imag(), -0.25229976665289983320, 1e-12);
}

TEST(ZetaReference, EtaAgreesWithAveragedPartialSums) {
  // Averaging consecutive partial sums of an alternating series cancels the
  // leading oscillation, leaving an O(N^{-1-sigma}) error.
  const ComplexPoint s{0.5, 14.0};
  const std::uint64_t n = 10000000;
  CompensatedComplexSum sum;
  Complex last;
  for (std::uint64_t k = 1; k <= n; ++k) {
    last = dirichlet_power(std::log(static_cast<double>(k)), s) * (k % 2 == 1 ? 1.0 : -1.0);
    sum += last;
  }
  const Complex averaged = sum.value() - 0.5 * last;
  EXPECT_LT(std::abs(averaged - eta(s).value), 1e-7);
}

TEST(ZetaReference, ZetaValues) {
  EXPECT_NEAR(zeta_via_eta({0.5, 0.0}).real(), -1.4603545088095868129, 1e-13);
  EXPECT_NEAR(zeta_via_eta({3.0, 0.0}).real(), 1.2020569031595942854, 1e-14);
  EXPECT_NEAR(zeta_via_eta({2.0, 0.0}).real(), std::numbers::pi * std::numbers::pi / 6.0, 1e-14);
  EXPECT_NEAR(zeta_via_eta({1.1, 0.0}).real(), 10.584448464950800951, 1e-11);
  EXPECT_NEAR(zeta_via_eta({0.9, 0.0}).real(), -9.4301140194022545911, 1e-11);
}

TEST(ZetaReference, ExtendedPrecisionAgrees) {
  for (const ComplexPoint s : {ComplexPoint{0.5, 0.0}, ComplexPoint{0.5, 14.0}, ComplexPoint{2.5, -3.0}}) {
    const auto ext = zeta_via_eta_extended(s);
    const Complex d = zeta_via_eta(s) - Complex(static_cast<double>(ext.real()), static_cast<double>(ext.imag()));
    EXPECT_LT(std::abs(d), 1e-13) << to_string(s);
  }
}

TEST(ZetaReference, DirichletWithCorrectionsAgrees) {
  for (const ComplexPoint s : {ComplexPoint{1.5, 0.0}, ComplexPoint{2.0, 10.0}, ComplexPoint{3.0, 0.0}}) {
    const DirichletValue d = zeta_dirichlet(s, 1000);
    EXPECT_LT(std::abs(d.value - zeta_via_eta(s)), 1e-12) << to_string(s);
  }
}

TEST(ZetaReference, SingularitiesAndDomain) {
  EXPECT_THROW(zeta_via_eta({1.0, 0.0}), SingularityError);
  EXPECT_THROW(zeta_via_eta({1.0, 2.0 * std::numbers::pi / std::numbers::ln2}), SingularityError);
  EXPECT_THROW(eta({0.0, 1.0}), DomainError);
  EXPECT_THROW(eta({-1.0, 0.0}), DomainError);
  EXPECT_THROW(zeta_dirichlet({1.0, 5.0}, 100), DomainError);
}

TEST(ZetaReference, StieltjesConstants) {
  const StieltjesTable table = stieltjes_table(9, 1000000);
  ASSERT_EQ(table.size(), 9u);
  for (int n = 0; n < 9; ++n) {
    EXPECT_NEAR(table.gamma[n], kStieltjes[n], 1e-12 * (1.0 + std::pow(std::log(1e6), n))) << "n = " << n;
  }
}

TEST(ZetaReference, RawStieltjesConvergesSlowly) {
  const double raw = stieltjes_gamma(0, 1000000, false);
  const double err = raw - kStieltjes[0];
  EXPECT_NEAR(err, 0.5e-6, 1e-8);
  EXPECT_NEAR(stieltjes_gamma(0, 1000, true), kStieltjes[0], 1e-14);
}

TEST(ZetaReference, LaurentMatchesEtaNearPole) {
  const StieltjesTable table = stieltjes_table(6, 1000000);
  EXPECT_NEAR(zeta_laurent({1.1, 0.0}, table, 6).real(), 10.584448464950800951, 1e-10);
  EXPECT_NEAR(zeta_laurent({0.9, 0.0}, table, 6).real(), -9.4301140194022545911, 1e-10);
  const ComplexPoint s{1.2, 0.3};
  EXPECT_LT(std::abs(zeta_laurent(s, table, 6) - zeta_via_eta(s)), 1e-8);
  EXPECT_THROW(zeta_laurent({1.0, 0.0}, table, 6), SingularityError);
  EXPECT_THROW(zeta_laurent({1.6, 0.0}, table, 6), ParameterError);
}

TEST(ZetaReference, PrimeLogSeriesDerivative) {
  for (double sigma : {1.5, 2.0, 3.0}) {
    const double h = 1e-3;
    const Complex d = (phi_with_tail({sigma + h, 0.0}, 100000) - phi_with_tail({sigma - h, 0.0}, 100000)) / (2 * h);
    const double expect = 1.0 - zeta_via_eta({sigma, 0.0}).real();
    EXPECT_NEAR(d.real(), expect, 1e-5 * (1 + std::fabs(expect))) << "sigma = " << sigma;
  }
}

TEST(ZetaReference, ExponentialIntegral) {
  EXPECT_NEAR(exponential_integral_e1({1.0, 0.0}).real(), 0.21938393439552027368, 1e-14);
  EXPECT_NEAR(exponential_integral_e1({0.01, 0.0}).real(), 4.0379295765381134, 1e-13);
  EXPECT_THROW(exponential_integral_e1({-1.0, 0.0}), DomainError);
}

TEST(ZetaReference, LogGamma) {
  EXPECT_NEAR(log_gamma({5.0, 0.0}).real(), std::log(24.0), 1e-12);
  EXPECT_NEAR(log_gamma({0.5, 0.0}).real(), 0.5 * std::log(std::numbers::pi), 1e-12);
}
