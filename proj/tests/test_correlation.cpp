#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "homodyne/correlation.hpp"

using namespace homodyne;
using namespace homodyne::correlation;

namespace {

constexpr double kPi = std::numbers::pi;

ExcitationSpec along_x(double d, double q, double dr) {
  ExcitationSpec e;
  e.d = {d, 0.0, 0.0};
  e.q = {q, 0.0, 0.0};
  e.delta_r = dr;
  e.pulse_t = 1.0;
  e.omega_tilde = 100.0;
  e.omega_alpha = 0.01;
  return e;
}

// Closed form of the one-axis pair integral for Gaussian coherence:
// int int g(x - cj) g(x' - ck) e^{iq(x - x')} e^{-pi (x - x')^2 / lambda^2}.
std::complex<double> thermal_axis(double D, double q, double a, double lambda) {
  const double al = 1.0 / (4.0 * a * a), be = kPi / (lambda * lambda);
  const std::complex<double> b(2.0 * al * D, q);
  return std::sqrt(kPi / (al + be)) * std::exp(b * b / (4.0 * (al + be)) - al * D * D);
}

Tabulated thermal_table(double lambda, double lo, double hi, std::size_t n) {
  Tabulated t;
  for (std::size_t i = 0; i < n; ++i) t.grid.push_back(lo + (hi - lo) * i / (n - 1));
  for (double x : t.grid)
    for (double xp : t.grid) t.values.emplace_back(std::exp(-kPi * (x - xp) * (x - xp) / (lambda * lambda)), 0.0);
  return t;
}

}  // namespace

TEST(RegimeCheck, Thresholds) {
  auto e = along_x(2.0, 1.0, 0.1);
  EXPECT_TRUE(pulse_regime_check(e).ok);
  e.omega_tilde = 9.0;
  EXPECT_FALSE(pulse_regime_check(e).ok);
  e.omega_tilde = 100.0;
  e.omega_alpha = 0.2;
  const auto r = pulse_regime_check(e);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.reason.find("omega_alpha"), std::string::npos);
}

TEST(DeltaLimit, UniformAndThermal) {
  const auto e = along_x(2.0, 1.3, 0.1);
  EXPECT_NEAR(visibility_delta_limit(e, PureCondensate{}), std::cos(2.6), 1e-15);
  const ThermalGaussian th{3.0, 1.5};
  EXPECT_NEAR(visibility_delta_limit(e, th), std::cos(2.6) * std::exp(-kPi * 4.0 / 2.25), 1e-15);
}

TEST(DeltaLimit, ZeroDensityThrows) {
  condensate::TFProfile p;
  p.mu = 1.0;
  p.r_x = p.r_y = p.r_z = 1.0;
  p.n_condensed = 1.0;
  p.g = 1.0;
  p.kappa0 = 1.0;
  PureCondensate m;
  m.profile = p;
  EXPECT_THROW(visibility_delta_limit(along_x(4.0, 1.0, 0.1), m), DomainError);
}

TEST(FiniteSpot, UniformGivesPureCosine) {
  for (double q : {0.0, 0.7, 2.1, 5.0}) {
    const auto f = flux_correlation_exact(along_x(3.0, q, 0.2), PureCondensate{2.0, {}});
    EXPECT_NEAR(f.visibility(), std::cos(3.0 * q), 1e-12) << q;
  }
}

TEST(FiniteSpot, UniformBackgroundIsAnalytic) {
  // |A|^2 = n (2 a sqrt(pi))^3 exp(-q^2 a^2) per spot
  const double a = 0.3, q = 1.1;
  const auto f = flux_correlation_exact(along_x(3.0, q, a), PureCondensate{2.0, {}});
  EXPECT_NEAR(f.background, 2.0 * 2.0 * std::pow(2.0 * a * std::sqrt(kPi), 3) * std::exp(-q * q * a * a), 1e-12);
}

TEST(FiniteSpot, ThermalMatchesClosedForm) {
  const double a = 0.25, lambda = 1.2, d = 1.0, q = 2.0, n = 1.7;
  const auto f = flux_correlation_exact(along_x(d, q, a), ThermalGaussian{n, lambda});
  ASSERT_TRUE(f.converged);
  const auto trans = thermal_axis(0.0, 0.0, a, lambda);
  const double same = n * (thermal_axis(0.0, q, a, lambda) * trans * trans).real();
  const double cross = n * ((thermal_axis(d, q, a, lambda) + thermal_axis(-d, q, a, lambda)) * trans * trans).real();
  EXPECT_NEAR(f.background, 2.0 * same, 1e-8 * same);
  EXPECT_NEAR(f.cross(), cross, 1e-8 * same);
}

TEST(FiniteSpot, ThermalApproachesDeltaLimit) {
  const ThermalGaussian th{1.0, 1.5};
  const double target = visibility_delta_limit(along_x(1.0, 1.0, 0.1), th);
  double prev = 1e9;
  for (double a : {0.2, 0.1, 0.05}) {
    const double err = std::abs(flux_correlation_exact(along_x(1.0, 1.0, a), th).visibility() - target);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(FiniteSpot, ProfileSmallSpotsNearCosine) {
  condensate::TFProfile p;
  p.mu = 100.0;
  p.r_x = p.r_y = p.r_z = 1.0;
  p.n_condensed = 1e4;
  p.g = 1.0;
  p.kappa0 = 1.0;
  PureCondensate m;
  m.profile = p;
  const auto f = flux_correlation_exact(along_x(0.6, 3.0, 0.05), m, {.abs_tol = 1e-10, .rel_tol = 1e-7});
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.visibility(), std::cos(1.8), 2e-2);
}

TEST(Tabulated, MatchesAnalyticThermal) {
  const double lambda = 1.2, a = 0.15;
  const auto e = along_x(1.0, 2.0, a);
  const auto exact = flux_correlation_exact(e, ThermalGaussian{1.0, lambda});
  const auto tab = flux_correlation_exact(e, thermal_table(lambda, -2.0, 2.0, 321), {.abs_tol = 1e-10, .rel_tol = 1e-7});
  EXPECT_NEAR(tab.visibility(), exact.visibility(), 2e-3);
}

TEST(Tabulated, InterpolatesBilinearly) {
  Tabulated t;
  t.grid = {0.0, 1.0};
  t.values = {{1.0, 0.0}, {0.0, 2.0}, {0.0, -2.0}, {3.0, 0.0}};
  t.validate();
  EXPECT_NEAR(std::abs(t.at(0.5, 0.5) - std::complex<double>(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t.at(1.0, 0.0) - std::complex<double>(0.0, -2.0)), 0.0, 1e-15);
  EXPECT_THROW(t.at(1.5, 0.0), DomainError);
}

TEST(Tabulated, CsvRoundTripAndRejections) {
  std::stringstream ok("x,x_prime,re,im\n0,0,1,0\n0,1,0,2\n1,0,0,-2\n1,1,3,0\n");
  const auto t = load_tabulated(ok, {2.0, 0.0, 0.0});
  EXPECT_EQ(t.n(), 2u);
  EXPECT_DOUBLE_EQ(t.axis[0], 1.0);
  EXPECT_DOUBLE_EQ(t.at(0.0, 1.0).imag(), 2.0);

  std::stringstream not_hermitian("x,x_prime,re,im\n0,0,1,0\n0,1,0,2\n1,0,0,2\n1,1,3,0\n");
  EXPECT_THROW(load_tabulated(not_hermitian, {1.0, 0.0, 0.0}), DomainError);
  std::stringstream ragged("x,x_prime,re,im\n0,0,1,0\n0,1,0,2\n1,1,3,0\n");
  EXPECT_THROW(load_tabulated(ragged, {1.0, 0.0, 0.0}), DomainError);
  std::stringstream short_row("x,x_prime,re,im\n0,0,1\n");
  EXPECT_THROW(load_tabulated(short_row, {1.0, 0.0, 0.0}), DomainError);
}

TEST(Excitation, ValidatesAndFlagsWideSpots) {
  auto e = along_x(1.0, 1.0, 0.1);
  EXPECT_TRUE(e.localized());
  e.delta_r = 0.3;
  EXPECT_FALSE(e.localized());
  e.delta_r = 0.0;
  EXPECT_THROW(e.validate(), DomainError);
  e.delta_r = 0.1;
  e.d = {0.0, 0.0, 0.0};
  EXPECT_THROW(e.validate(), DomainError);
}
