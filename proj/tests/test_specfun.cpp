#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homodyne/specfun.hpp"

using namespace homodyne;

namespace {

// Long-double power series, used as an independent reference for |x| <= 20.
long double series_ref(int n, long double x) {
  long double half = x / 2;
  long double term = 1;
  for (int i = 1; i <= n; ++i) term *= half / i;
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -half * half / (static_cast<long double>(k) * (k + n));
    sum += term;
  }
  return sum;
}

}  // namespace

TEST(Bessel, FrozenValues) {
  struct Row {
    double x, j2;
  };
  const Row rows[] = {{0.5, 0.030604023458682638},  {3.0, 0.4860912605858912},   {7.9, -0.1388733891648853},
                      {8.1, -0.08637973380200914},  {12.0, -0.08493049487860475}, {20.0, -0.16034135192299823},
                      {24.9, -0.09407775144790778}, {25.1, -0.11740991724771221}, {50.0, -0.05971280079425882},
                      {150.0, -9.451180670874019e-05}, {200.0, 0.014894394548741308}};
  for (const auto& r : rows) EXPECT_NEAR(specfun::bessel_j2(r.x), r.j2, 1e-12) << "x=" << r.x;
}

TEST(Bessel, MatchesStdOnDenseGrid) {
  double worst = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = 0.01 * i;
    worst = std::max(worst, std::abs(specfun::bessel_j2(x) - std::cyl_bessel_j(2.0, x)));
    worst = std::max(worst, std::abs(specfun::bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
    worst = std::max(worst, std::abs(specfun::bessel_j1(x) - std::cyl_bessel_j(1.0, x)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Bessel, MatchesLongDoubleSeries) {
  for (double x = 0.0; x <= 20.0; x += 0.37) {
    EXPECT_NEAR(specfun::bessel_j2(x), static_cast<double>(series_ref(2, x)), 1e-12) << x;
    EXPECT_NEAR(specfun::bessel_j0(x), static_cast<double>(series_ref(0, x)), 1e-12) << x;
  }
}

TEST(Bessel, ParityAndOrigin) {
  EXPECT_EQ(specfun::bessel_j2(0.0), 0.0);
  EXPECT_EQ(specfun::bessel_j0(0.0), 1.0);
  for (double x : {0.3, 9.0, 30.0}) {
    EXPECT_EQ(specfun::bessel_j2(-x), specfun::bessel_j2(x));
    EXPECT_EQ(specfun::bessel_j1(-x), -specfun::bessel_j1(x));
  }
  // J2(x) ~ x^2 / 8 near the origin
  EXPECT_NEAR(specfun::bessel_j2(1e-4) / 1e-8, 0.125, 1e-9);
}

TEST(Bessel, RecurrenceAcrossBranchCuts) {
  // J1(x) = x (J0 + J2) / 2 holds across the algorithm switch points.
  for (double x : {7.999, 8.0, 8.001, 24.999, 25.0, 25.001, 60.0}) {
    const double lhs = specfun::bessel_j1(x);
    const double rhs = 0.5 * x * (specfun::bessel_j0(x) + specfun::bessel_j2(x));
    EXPECT_NEAR(lhs, rhs, 1e-11) << x;
  }
}

TEST(Bessel, RejectsNonFinite) {
  EXPECT_THROW(specfun::bessel_j2(std::nan("")), DomainError);
  EXPECT_THROW(specfun::bessel_j0(INFINITY), DomainError);
}

TEST(Diffraction, SmallArgumentLimit) {
  const double t = 3.0;
  EXPECT_NEAR(specfun::diffraction(0.0, t), t / (2.0 * std::numbers::pi), 1e-15);
  const double w = 1e-6;
  EXPECT_NEAR(specfun::diffraction(w, t), std::sin(0.5 * w * t) / (std::numbers::pi * w), 1e-15);
  EXPECT_NEAR(specfun::diffraction(2.0, t), std::sin(3.0) / (2.0 * std::numbers::pi), 1e-15);
}

TEST(Diffraction, IntegratesToOne) {
  // integral over omega of sin(omega t/2)/(pi omega) equals 1 for every t > 0
  const double t = 5.0;
  double sum = 0.0;
  const double h = 1e-3;
  const double W = 4000.0;
  for (double w = -W; w < W; w += h) sum += specfun::diffraction(w + 0.5 * h, t) * h;
  EXPECT_NEAR(sum, 1.0, 2e-3);
}

TEST(Diffraction, PhasedAndDomain) {
  const auto z = specfun::diffraction_phased(1.3, 2.0);
  EXPECT_NEAR(std::abs(z), std::abs(specfun::diffraction(1.3, 2.0)), 1e-15);
  EXPECT_NEAR(std::arg(z), -1.3, 1e-14);
  EXPECT_THROW(specfun::diffraction(1.0, 0.0), DomainError);
  EXPECT_THROW(specfun::diffraction(1.0, -1.0), DomainError);
}

TEST(GaussianKernel, NormalisationAndWidth) {
  const double t0 = 0.7;
  double norm = 0.0;
  double second = 0.0;
  const double h = 1e-3;
  for (double x = -40.0; x < 40.0; x += h) {
    const double k = specfun::gaussian_kernel(x + 0.5 * h, t0);
    norm += k * h;
    second += k * (x + 0.5 * h) * (x + 0.5 * h) * h;
  }
  EXPECT_NEAR(norm, 1.0, 1e-9);
  EXPECT_NEAR(second, 2.5 / (t0 * t0), 1e-7);
  EXPECT_THROW(specfun::gaussian_kernel(0.0, 0.0), DomainError);
}
