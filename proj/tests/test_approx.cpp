#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "homodyne/approx.hpp"

using namespace homodyne;
using namespace homodyne::approx;

namespace {

constexpr double kPi = std::numbers::pi;

// G(z) straight from its double-integral definition, no closed-form radial step.
double g_bruteforce(double z) {
  if (z >= 2.0) return 0.0;
  auto r = quad::integrate_nd(
      [z](const std::array<double, 2>& v) {
        const double x = v[0];
        const double rmax = std::sqrt(std::max(0.0, 1.0 - x * x));
        const double rho = v[1] * rmax;
        const double a = 1.0 - x * x - rho * rho;
        const double b = 1.0 - (x - z) * (x - z) - rho * rho;
        if (a <= 0.0 || b <= 0.0) return 0.0;
        return rmax * rho * std::sqrt(a * b);
      },
      quad::Box<2>{{{0.5 * z, 1.0}, {0.0, 1.0}}}, {.abs_tol = 1e-11, .rel_tol = 1e-9}, {4, 4});
  return 2.0 * r.value;
}

}  // namespace

TEST(GOfZ, ValueAtZeroAndEdge) {
  EXPECT_NEAR(g_of_z(0.0), 4.0 / 15.0, 1e-10);
  EXPECT_EQ(g_of_z(2.0), 0.0);
  EXPECT_EQ(g_of_z(3.5), 0.0);
  EXPECT_DOUBLE_EQ(g_of_z(-0.7), g_of_z(0.7));
  EXPECT_THROW(g_of_z(NAN), DomainError);
}

TEST(GOfZ, MatchesDirectDoubleIntegral) {
  for (double z = 0.0; z <= 2.0; z += 0.25) EXPECT_NEAR(g_of_z(z), g_bruteforce(z), 1e-6) << z;
}

TEST(GOfZ, MonotoneAndCloseToGaussianFit) {
  double prev = g_of_z(0.0), gap = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double z = 2.0 * i / 400.0;
    const double g = g_of_z(z);
    EXPECT_LE(g, prev + 1e-15) << z;
    prev = g;
    gap = std::max(gap, std::abs(g - gaussian_fit_g(z)));
  }
  EXPECT_LE(gap, 0.05 * 4.0 / 15.0);
}

TEST(GaussianFit, Examples) {
  EXPECT_DOUBLE_EQ(gaussian_fit_g(0.0), 4.0 / 15.0);
  EXPECT_NEAR(gaussian_fit_g(std::sqrt(0.8)), 4.0 / 15.0 * std::exp(-1.0), 1e-16);
  EXPECT_DOUBLE_EQ(gaussian_fit_g(0.4), gaussian_fit_g(-0.4));
}

TEST(Overlap, SelfOverlapIsAtomNumber) {
  const auto p = fixtures::unit_sphere(1e6, 2283.0);
  EXPECT_NEAR(overlap_h(p, p, {0.0, 0.0, 0.0}), 1e6, 1e-6 * 1e6);
}

TEST(Overlap, DisjointCloudsGiveZero) {
  const auto p = fixtures::unit_sphere();
  EXPECT_EQ(overlap_h(p, p, {5.0, 0.0, 0.0}), 0.0);
  auto q = p;
  q.r_x = 1.3;
  EXPECT_EQ(overlap_h(p, q, {0.0, 4.0, 0.0}), 0.0);
}

TEST(Overlap, GeneralPathMatchesSameShapeForm) {
  const auto p = fixtures::unit_sphere();
  auto q = p;
  q.r_x *= 1.0 + 1e-9;  // forces the quadrature path
  for (double dx : {0.0, 0.5, 1.2, 1.8}) {
    const double ref = overlap_h(p, p, {dx, 0.0, 0.0});
    EXPECT_NEAR(overlap_h(p, q, {dx, 0.0, 0.0}, {.abs_tol = 1e-8, .rel_tol = 1e-7}), ref, 1e-5 * 1e6) << dx;
  }
}

TEST(Overlap, DifferentRadiiAgainstRadialOracle) {
  auto j = fixtures::unit_sphere();
  auto l = j;
  l.r_x = l.r_y = l.r_z = 1.5;
  // concentric: h = amp * int 4 pi r^2 sqrt((1 - r^2)(1 - r^2/2.25)) dr over r < 1
  const double amp = std::sqrt(j.mu / j.g * l.mu / l.g);
  auto r = quad::integrate_1d([](double x) { return 4.0 * kPi * x * x * std::sqrt((1.0 - x * x) * (1.0 - x * x / 2.25)); },
                              0.0, 1.0, {.abs_tol = 1e-14, .rel_tol = 1e-12});
  EXPECT_NEAR(overlap_h(j, l, {0.0, 0.0, 0.0}, {.abs_tol = 1e-8, .rel_tol = 1e-8}), amp * r.value, 1e-6 * amp * r.value);
  EXPECT_GT(overlap_h(j, l, {2.0, 0.0, 0.0}), 0.0);
}

TEST(Saddle, ZeroBeforeOverlap) {
  const auto s = fixtures::reference_pair();
  const double tc = flux::onset_time(s).t_c;
  EXPECT_EQ(flux_lr_saddle(s, 0.5 * tc).value, 0.0);
}

TEST(Saddle, ZeroForOrthogonalRecoil) {
  const auto s = fixtures::reference_pair(kPi / 2.0);
  for (double t : {0.01, 0.05, 0.1}) EXPECT_EQ(flux_lr_saddle(s, t).value, 0.0);
}

TEST(Saddle, NonNegativeGrowthWithoutPhases) {
  auto s = fixtures::small();
  s.delta_mu = 0.0;
  s.phi_lr = 0.0;
  const double t0 = 1.0 / s.q;
  double prev = 0.0;
  for (int i = 1; i <= 12; ++i) {
    const double v = flux_lr_saddle(s, i * t0).value;
    EXPECT_GE(v, prev - 1e-9 * std::abs(prev)) << i;
    prev = v;
  }
  EXPECT_GT(prev, 0.0);
}

TEST(Saddle, ValidityGate) {
  auto s = fixtures::reference_pair();
  EXPECT_TRUE(flux_lr_saddle(s, 0.02).valid);
  s.q = 10.0;
  s.Omega = s.omega_q();
  EXPECT_FALSE(flux_lr_saddle(s, 0.5).valid);
}

TEST(Saddle, MatchesExactLeftToRight) {
  const auto s = fixtures::reference_pair();
  const double t = 2.0 * fixtures::period(s) + flux::onset_time(s).t_c;
  const double exact = flux::flux_components(s, t).left_to_right;
  const double saddle = flux_lr_saddle(s, t).value;
  EXPECT_NEAR(saddle, exact, 0.1 * std::abs(exact));
}

TEST(ClosedForm, RejectsTiltedRecoil) {
  EXPECT_THROW(closed_form_params(fixtures::reference_pair(0.1)), UnsupportedGeometry);
}

TEST(ClosedForm, NoOscillationBeforeOnset) {
  const auto s = fixtures::reference_pair();
  const auto p = closed_form_params(s);
  const auto f = flux_closed_form(p, 0.5 * p.t_c());
  EXPECT_EQ(f.interference(), 0.0);
  EXPECT_DOUBLE_EQ(f.total(), f.background());
}

TEST(ClosedForm, ResonantLimit) {
  auto s = fixtures::reference_pair();
  s.delta_mu = 0.0;
  const auto p = closed_form_params(s);
  const auto f = flux_closed_form(p, 2.0 * p.t_c());
  const double k0 = specfun::gaussian_kernel(0.0, p.t0);
  EXPECT_NEAR(f.total(), 4.0 * kPi * s.left.n_condensed * k0, 1e-12 * f.total());
}

TEST(ClosedForm, LeftTermAndPeriodicity) {
  auto s = fixtures::reference_pair();
  s.Omega += 30.0;
  const auto p = closed_form_params(s);
  const double T = fixtures::period(s);
  for (double t : {1.5 * p.t_c(), 3.0 * p.t_c(), 7.1 * p.t_c()}) {
    const auto a = flux_closed_form(p, t);
    EXPECT_NEAR(a.left, kPi * s.left.n_condensed * specfun::gaussian_kernel(-30.0, p.t0), 1e-10 * a.left);
    const auto b = flux_closed_form(p, t + 3.0 * T);
    EXPECT_NEAR(a.total(), b.total(), 1e-9 * a.background());
  }
}

TEST(ClosedForm, ValidityGate) {
  auto s = fixtures::reference_pair();
  EXPECT_TRUE(flux_closed_form(s, 0.1).valid);
  s.Omega = s.omega_q() + 10.0 * s.q;  // |(omega_q - Omega) t0| = 10
  EXPECT_FALSE(flux_closed_form(s, 0.1).valid);
}

TEST(Visibility, Examples) {
  auto s = fixtures::reference_pair();
  s.delta_mu = 0.0;
  EXPECT_NEAR(visibility_v0(s), 1.0, 1e-15);
  s.delta_mu = 1e6;
  EXPECT_NEAR(visibility_v0(s), 2.0, 1e-12);
  s.delta_mu = 207.92;
  s.Omega = s.omega_q() + 0.5 * s.delta_mu;
  EXPECT_NEAR(visibility_v0(s), 1.0, 1e-12);
}

TEST(PhaseOffset, Examples) {
  auto s = fixtures::reference_pair();
  s.delta_mu = 0.0;
  auto o = phase_offset(s);
  EXPECT_EQ(o.theta_main, 0.0);
  EXPECT_EQ(o.theta_b11, 0.0);
  s.delta_mu = 207.92;
  EXPECT_NEAR(phase_offset(s).theta_main, s.d / s.v_q() * s.delta_mu, 1e-14);
  const double h = 1e-3;
  const double a = phase_offset(s).theta_b11;
  s.Omega += h;
  EXPECT_NEAR((phase_offset(s).theta_b11 - a) / h, 2.0 * s.d / s.v_q(), 1e-8);
}

TEST(Series, ClosedFormAndSaddleShapes) {
  const auto s = fixtures::reference_pair();
  const auto times = flux::time_grid(4.0 * flux::onset_time(s).t_c, 24);
  const auto cf = closed_form_series(s, times);
  ASSERT_EQ(cf.f_total.size(), times.size());
  EXPECT_EQ(cf.method, flux::Method::closed_form);
  EXPECT_TRUE(cf.approximation_valid);
  const auto sd = saddle_series(s, times, 2);
  EXPECT_EQ(sd.method, flux::Method::saddle);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_DOUBLE_EQ(sd.f_total[i], sd.f_background[i] + sd.f_interference[i]);
    EXPECT_NEAR(sd.f_background[i], cf.f_background[i], 1e-9 * cf.f_background[i]);
  }
  EXPECT_EQ(sd.f_interference, saddle_series(s, times, 1).f_interference);
}
