#pragma once

// Built-in self-checks against independent oracles. Each check reports the
// measured value, the expected value and the tolerance it was held to.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "homodyne/approx.hpp"
#include "homodyne/bosehubbard.hpp"
#include "homodyne/condensate.hpp"
#include "homodyne/quadrature.hpp"
#include "homodyne/specfun.hpp"
#include "homodyne/units.hpp"

namespace homodyne::validate {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline CheckResult make_check(std::string name, double measured, double expected, double tol) {
  return {std::move(name), measured, expected, tol, std::abs(measured - expected) <= tol};
}

/// Si(x) for large x from its asymptotic expansion (good to ~1e-12 at x >= 100).
inline double sine_integral_asymptotic(double x) {
  const double x2 = x * x;
  const double f = (1.0 - 2.0 / x2 + 24.0 / (x2 * x2) - 720.0 / (x2 * x2 * x2)) / x;
  const double g = (1.0 - 6.0 / x2 + 120.0 / (x2 * x2) - 5040.0 / (x2 * x2 * x2)) / x2;
  return 0.5 * std::numbers::pi - f * std::cos(x) - g * std::sin(x);
}

/// Integral of the diffraction function over |omega| <= half_width.
inline double diffraction_window_integral(double t, double half_width) {
  quad::QuadSpec spec{.abs_tol = 1e-14, .rel_tol = 1e-12};
  const double span = half_width * t;  // phase span of sin(omega t / 2) over [0, W] is W t / 2
  auto r = quad::integrate_1d([t](double w) { return specfun::diffraction(w, t); }, 0.0, half_width, spec,
                              {.initial_panels = quad::oscillation_panels(span, spec)});
  return 2.0 * r.value;
}

inline condensate::TrapSpec sodium_trap(double wx, double wy, double wz, double n = 1e6) {
  condensate::TrapSpec t;
  t.omega_x = wx;
  t.omega_y = wy;
  t.omega_z = wz;
  t.mass = 22.98976928 * units::kAtomicMassUnit;
  t.n_atoms = n;
  t.a_s = 55.0 * units::kBohrRadius;
  return t;
}

inline condensate::TFProfile internal_profile(const condensate::TrapSpec& trap) {
  const auto p = condensate::tf_profile(trap, trap.n_atoms);
  return condensate::to_internal(p, units::UnitScale{p.r_x, trap.mass});
}

inline std::vector<condensate::TrapSpec> parseval_shapes() {
  constexpr double w = 2.0 * std::numbers::pi;
  return {sodium_trap(w * 325, w * 325, w * 325), sodium_trap(w * 100, w * 300, w * 300),
          sodium_trap(w * 60, w * 240, w * 700)};
}

/// Fourier transform of the amplitude by direct 3D quadrature in scaled spherical
/// coordinates, without the Bessel closed form.
inline double fourier_bruteforce(const condensate::TFProfile& p, const condensate::Vec3& k) {
  const condensate::Vec3 ks{k[0] * p.r_x, k[1] * p.r_y, k[2] * p.r_z};
  quad::QuadSpec spec{.abs_tol = 1e-9, .rel_tol = 1e-7};
  quad::Box<3> box{{{0.0, 1.0}, {-1.0, 1.0}, {0.0, 2.0 * std::numbers::pi}}};
  auto r = quad::integrate_nd(
      [&](const std::array<double, 3>& x) {
        const double rho = x[0], c = x[1], s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double dot = rho * (ks[0] * s * std::cos(x[2]) + ks[1] * s * std::sin(x[2]) + ks[2] * c);
        return rho * rho * std::sqrt(1.0 - rho * rho) * std::cos(dot);
      },
      box, spec, {8, 8, 8});
  return std::sqrt(p.mu / p.g) * p.volume_radius_cubed() * r.value;
}

/// Smallest r with psi > 1e-6 at fixed mu/U, by bisection on the phase.
inline double scan_lobe_boundary(double mu_over_u, int n_max = 8) {
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (bosehubbard::meanfield_solve({mid, mu_over_u, n_max, 1e-10}).psi > 1e-6 ? hi : lo) = mid;
  }
  return hi;
}

// ---- individual groups ----------------------------------------------------------

inline std::vector<CheckResult> diffraction_checks() {
  std::vector<CheckResult> out;
  for (double t : {0.5, 3.0, 40.0}) {
    out.push_back(make_check("diffraction peak t/(2 pi), t=" + std::to_string(t).substr(0, 4),
                             specfun::diffraction(0.0, t), t / (2.0 * std::numbers::pi), 0.0));
  }
  // Over |omega| <= 400/t the integral is (2/pi) Si(200) independently of t.
  const double oracle = 2.0 / std::numbers::pi * sine_integral_asymptotic(200.0);
  for (double t : {1.0, 7.0}) {
    out.push_back(make_check("diffraction window integral vs (2/pi)Si(200), t=" + std::to_string(t).substr(0, 3),
                             diffraction_window_integral(t, 400.0 / t), oracle, 1e-9));
  }
  return out;
}

inline std::vector<CheckResult> g_function_checks() {
  std::vector<CheckResult> out;
  out.push_back(make_check("G(0) = 4/15", approx::g_of_z(0.0), 4.0 / 15.0, 1e-10));
  out.push_back(make_check("G(2) = 0", approx::g_of_z(2.0), 0.0, 0.0));
  double gap = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double z = 2.0 * i / 400.0;
    gap = std::max(gap, std::abs(approx::g_of_z(z) - approx::gaussian_fit_g(z)));
  }
  // one-sided bound, reported as |gap| against 0 with the allowed ceiling
  out.push_back(make_check("sup |G - Gaussian fit| <= 5% G(0)", gap, 0.0, 0.05 * 4.0 / 15.0));
  return out;
}

inline std::vector<CheckResult> parseval_checks() {
  std::vector<CheckResult> out;
  const char* names[] = {"spherical", "prolate", "triaxial"};
  const auto shapes = parseval_shapes();
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto p = internal_profile(shapes[i]);
    const double ratio = condensate::momentum_norm(p, quad::QuadSpec{}) / p.n_condensed;
    out.push_back(make_check(std::string("Parseval N_k/N_C, ") + names[i], ratio, 1.0, 1e-3));
  }
  return out;
}

inline std::vector<CheckResult> fourier_checks() {
  std::vector<CheckResult> out;
  constexpr double w = 2.0 * std::numbers::pi;
  const auto p = internal_profile(sodium_trap(w * 100, w * 250, w * 400));
  const condensate::Vec3 ks[] = {{0.3, 0.0, 0.0}, {1.1, 0.4, -0.2}, {0.2, 1.7, 0.9}, {2.5, -1.0, 3.0}, {0.0, 0.0, 4.2}};
  int i = 0;
  for (const auto& k : ks) {
    const double oracle = fourier_bruteforce(p, k);
    const double value = condensate::tf_fourier(k, p, true);
    out.push_back(make_check("Fourier vs direct quadrature, sample " + std::to_string(++i), value / p.kappa0,
                             oracle / p.kappa0, 1e-3 * std::abs(oracle / p.kappa0) + 1e-6));
  }
  return out;
}

inline std::vector<CheckResult> lobe_checks() {
  std::vector<CheckResult> out;
  const double tip = std::numbers::sqrt2 - 1.0;
  out.push_back(make_check("mean-field onset at mu/U = sqrt2-1 vs 3-2sqrt2", scan_lobe_boundary(tip),
                           3.0 - 2.0 * std::numbers::sqrt2, 1e-3));
  for (double mu : {0.2, tip, 0.7}) {
    out.push_back(make_check("lobe boundary scan vs perturbative, mu/U=" + std::to_string(mu).substr(0, 5),
                             scan_lobe_boundary(mu), bosehubbard::lobe_boundary(mu, 1), 1e-4));
  }
  return out;
}

/// Every check, in a fixed order.
inline std::vector<CheckResult> run_all() {
  std::vector<CheckResult> all;
  for (auto group : {diffraction_checks, g_function_checks, parseval_checks, fourier_checks, lobe_checks}) {
    auto part = group();
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace homodyne::validate
