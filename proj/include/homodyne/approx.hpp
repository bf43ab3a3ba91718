#pragma once

// Approximate fluxes: the overlap picture (outcoupled atoms move ballistically at
// the recoil velocity and interfere where the displaced clouds overlap), the
// universal overlap shape G(z) of two Thomas-Fermi spheres, its Gaussian fit and
// the resulting Gaussian-kernel closed forms.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "homodyne/condensate.hpp"
#include "homodyne/errors.hpp"
#include "homodyne/flux_twobec.hpp"
#include "homodyne/quadrature.hpp"
#include "homodyne/specfun.hpp"

namespace homodyne::approx {

using condensate::TFProfile;
using condensate::Vec3;
using flux::TwoBecScenario;

namespace detail {

// (1/2) integral_0^a sqrt(s) sqrt(s + c) ds for a, c >= 0.
inline double half_root_product(double a, double c) {
  if (a <= 0.0) return 0.0;
  if (c <= 0.0) return 0.25 * a * a;
  const double root = std::sqrt(a * (a + c));
  const double head = 0.25 * (2.0 * a + c) * root;
  const double log_term = 0.125 * c * c * std::log1p((2.0 * root + 2.0 * a) / c);
  return 0.5 * (head - log_term);
}

}  // namespace detail

/// G(z) = 2 int_{z/2}^1 dx int_0^{sqrt(1-x^2)} r dr sqrt(1-x^2-r^2) sqrt(1-(x-z)^2-r^2).
/// The radial integral is done in closed form, the x integral by quadrature.
/// Even in z; zero for |z| >= 2.
inline double g_of_z(double z) {
  if (!std::isfinite(z)) throw DomainError("g_of_z: non-finite argument");
  z = std::abs(z);
  if (z >= 2.0) return 0.0;
  quad::QuadSpec spec{.abs_tol = 1e-15, .rel_tol = 1e-13};
  auto r = quad::integrate_1d(
      [z](double x) {
        const double a = 1.0 - x * x;
        const double c = (1.0 - (x - z) * (x - z)) - a;
        return detail::half_root_product(a, std::max(0.0, c));
      },
      0.5 * z, 1.0, spec);
  return 2.0 * r.value;
}

/// Gaussian fit (4/15) exp(-1.25 z^2).
inline double gaussian_fit_g(double z) { return 4.0 / 15.0 * std::exp(-1.25 * z * z); }

namespace detail {

inline bool same_shape(const TFProfile& a, const TFProfile& b) {
  auto eq = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); };
  return eq(a.r_x, b.r_x) && eq(a.r_y, b.r_y) && eq(a.r_z, b.r_z);
}

// Distances along the ray rho n (in the scaled frame of cloud l) at which it
// crosses the surface of cloud j displaced by -D.
inline std::vector<double> ray_crossings(const TFProfile& j, const TFProfile& l, const Vec3& n, const Vec3& D) {
  const double rl[3] = {l.r_x, l.r_y, l.r_z};
  const double rj[3] = {j.r_x, j.r_y, j.r_z};
  double A = 0.0, B = 0.0, C = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double u = n[i] * rl[i] / rj[i];
    const double v = D[i] / rj[i];
    A += u * u;
    B += 2.0 * u * v;
    C += v * v;
  }
  std::vector<double> out;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return out;
  const double sq = std::sqrt(disc);
  for (double rho : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)}) {
    if (rho > 0.0 && rho < 1.0) out.push_back(rho);
  }
  return out;
}

}  // namespace detail

/// h = integral f_j(r + D) f_l(r) d^3r.
/// Identically shaped clouds use the closed relation h = sqrt(mu_j mu_l / (g_j g_l)) R^3 2 pi G(|D~|)
/// with D~ the displacement in units of the radii; otherwise a 3D quadrature in
/// the scaled spherical coordinates of cloud l.
inline double overlap_h(const TFProfile& j, const TFProfile& l, const Vec3& D, const quad::QuadSpec& spec = {}) {
  const double amp = std::sqrt(j.mu / j.g * l.mu / l.g);
  if (detail::same_shape(j, l)) {
    const double z = std::sqrt(D[0] * D[0] / (l.r_x * l.r_x) + D[1] * D[1] / (l.r_y * l.r_y) + D[2] * D[2] / (l.r_z * l.r_z));
    return amp * l.volume_radius_cubed() * 2.0 * std::numbers::pi * g_of_z(z);
  }
  const double rl[3] = {l.r_x, l.r_y, l.r_z};
  const double rj[3] = {j.r_x, j.r_y, j.r_z};
  // Quick reject with bounding spheres.
  const double dist = std::sqrt(D[0] * D[0] + D[1] * D[1] + D[2] * D[2]);
  if (dist >= j.r_max() + l.r_max()) return 0.0;

  quad::QuadSpec inner = spec;
  inner.abs_tol = spec.abs_tol / 100.0;
  inner.rel_tol = spec.rel_tol / 10.0;
  auto direction = [&](double c, double phi) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const Vec3 n{s * std::cos(phi), s * std::sin(phi), c};
    const auto cuts = detail::ray_crossings(j, l, n, D);
    auto r = quad::integrate_1d(
        [&](double rho) {
          double sj = 1.0;
          for (int i = 0; i < 3; ++i) {
            const double x = (rho * n[i] * rl[i] + D[i]) / rj[i];
            sj -= x * x;
          }
          if (sj <= 0.0) return 0.0;
          return rho * rho * std::sqrt(std::max(0.0, 1.0 - rho * rho) * sj);
        },
        0.0, 1.0, inner, {.initial_panels = 2, .breakpoints = cuts});
    return r.value;
  };
  auto r = quad::integrate_nd(
      [&](const std::array<double, 2>& a) { return direction(a[0], a[1]); },
      quad::Box<2>{{{-1.0, 1.0}, {0.0, 2.0 * std::numbers::pi}}}, spec, {8, 8});
  return amp * l.volume_radius_cubed() * r.value;
}

struct SaddleResult {
  double value = 0.0;
  /// q r_min >= 20: the recoil momentum dominates the momentum width of the clouds.
  bool valid = true;
};

inline constexpr double kSaddleValidity = 20.0;

/// L -> R interference flux in the overlap picture,
///   gamma Re[e^{i(delta_mu t - phi)} int_0^t e^{i(omega_q - Omega) tau} h(d - v tau) dtau].
inline SaddleResult flux_lr_saddle(const TwoBecScenario& s, double t) {
  s.validate();
  if (!(t > 0.0)) throw DomainError("flux_lr_saddle: t must be positive");
  const Vec3 dvec{s.d * std::cos(s.alpha), s.d * std::sin(s.alpha), 0.0};
  const double v = s.v_q();
  const double detuning = s.omega_q() - s.Omega;
  const double reach = s.left.r_max() + s.right.r_max();
  // the overlap is supported where |d - v tau| < reach
  const double along = dvec[0];
  const double perp = std::abs(dvec[1]);
  SaddleResult out;
  out.valid = s.q * std::min(s.left.r_min(), s.right.r_min()) >= kSaddleValidity;
  if (perp >= reach) return out;
  const double half = std::sqrt(reach * reach - perp * perp);
  const double t_lo = std::max(0.0, (along - half) / v);
  const double t_hi = std::min(t, (along + half) / v);
  if (!(t_hi > t_lo)) return out;

  quad::QuadSpec spec = s.spec;
  spec.abs_tol = std::max(spec.abs_tol, 1e-9 * s.left.n_condensed * s.left.r_x / v);
  auto r = quad::integrate_1d<std::complex<double>>(
      [&](double tau) {
        const Vec3 D{dvec[0] - v * tau, dvec[1], dvec[2]};
        const double h = overlap_h(s.left, s.right, D, spec);
        return std::polar(h, detuning * tau);
      },
      t_lo, t_hi, spec, {.initial_panels = quad::oscillation_panels(std::abs(detuning) * (t_hi - t_lo), spec)});
  const auto phase = std::polar(1.0, s.delta_mu * t - s.phi_lr);
  out.value = s.gamma * (phase * r.value).real();
  return out;
}

// ---- Gaussian-kernel closed forms -------------------------------------------

struct ClosedFormParams {
  double t0 = 0.0;  // r_x / v_q
  double d_over_rx = 0.0;
  double Omega_minus_wq = 0.0;
  double delta_mu = 0.0;
  double phi_lr = 0.0;
  double n_condensed = 0.0;
  double n_condensed_right = 0.0;
  double gamma = 1.0;

  void validate() const {
    if (!(t0 > 0.0)) throw DomainError("ClosedFormParams: t0 must be positive");
    if (!(n_condensed >= 0.0 && n_condensed_right >= 0.0)) throw DomainError("ClosedFormParams: negative atom number");
  }
  double t_c() const { return d_over_rx > 2.0 ? t0 * (d_over_rx - 2.0) : 0.0; }
};

/// Closed-form parameters for q parallel to d; any other geometry is rejected.
inline ClosedFormParams closed_form_params(const TwoBecScenario& s) {
  s.validate();
  if (s.alpha != 0.0) throw UnsupportedGeometry("closed form needs q parallel to d (alpha = 0)");
  ClosedFormParams p;
  p.t0 = s.left.r_x / s.v_q();
  p.d_over_rx = s.d / s.left.r_x;
  p.Omega_minus_wq = s.Omega - s.omega_q();
  p.delta_mu = s.delta_mu;
  p.phi_lr = s.phi_lr;
  p.n_condensed = s.left.n_condensed;
  p.n_condensed_right = s.right.n_condensed;
  p.gamma = s.gamma;
  return p;
}

struct ClosedFormFlux {
  double left = 0.0;
  double right = 0.0;
  double left_to_right = 0.0;
  double right_to_left = 0.0;
  /// |(omega_q - Omega) t0| <= 5, where dropping the error-function imaginary parts is accurate.
  bool valid = true;

  double background() const { return left + right; }
  double interference() const { return left_to_right + right_to_left; }
  double total() const { return background() + interference(); }
};

inline constexpr double kClosedFormValidity = 5.0;

/// Gaussian-kernel fluxes for recoil along +d. The right-to-left term carries a
/// step in -q and so vanishes; the left-to-right term switches on at t_c.
inline ClosedFormFlux flux_closed_form(const ClosedFormParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("flux_closed_form: t must be positive");
  const double x = -p.Omega_minus_wq;  // omega_q - Omega
  const double k1 = specfun::gaussian_kernel(x, p.t0);
  const double k2 = specfun::gaussian_kernel(x + p.delta_mu, p.t0);
  ClosedFormFlux f;
  f.valid = std::abs(x * p.t0) <= kClosedFormValidity;
  f.left = std::numbers::pi * p.gamma * p.n_condensed * k1;
  f.right = std::numbers::pi * p.gamma * p.n_condensed_right * k2;
  const double step = t > p.t_c() ? 1.0 : 0.0;
  const double travel = p.d_over_rx * p.t0;  // d / v_q
  f.left_to_right = 2.0 * std::numbers::pi * p.gamma * std::sqrt(p.n_condensed * p.n_condensed_right) * k1 * step *
                    std::cos(p.delta_mu * t - p.phi_lr + x * travel);
  f.right_to_left = 0.0;
  return f;
}

inline ClosedFormFlux flux_closed_form(const TwoBecScenario& s, double t) {
  return flux_closed_form(closed_form_params(s), t);
}

/// V0 = 2 K(omega_q - Omega) / (K(omega_q - Omega) + K(omega_q - Omega + delta_mu)).
inline double visibility_v0(const TwoBecScenario& s) {
  const double t0 = s.left.r_x / s.v_q();
  const double x = s.omega_q() - s.Omega;
  const double k1 = specfun::gaussian_kernel(x, t0);
  const double k2 = specfun::gaussian_kernel(x + s.delta_mu, t0);
  return 2.0 * k1 / (k1 + k2);
}

struct PhaseOffsets {
  /// (d / v_q)(omega_q - Omega + delta_mu): phase of the left-to-right travellers.
  double theta_main = 0.0;
  /// (d / v_q)(2 Omega - 2 omega_q - delta_mu): difference between the two directions.
  double theta_b11 = 0.0;
};

inline PhaseOffsets phase_offset(const TwoBecScenario& s) {
  const double travel = s.d / s.v_q();
  return {travel * (s.omega_q() - s.Omega + s.delta_mu), travel * (2.0 * s.Omega - 2.0 * s.omega_q() - s.delta_mu)};
}

/// Closed-form series on `times`.
inline flux::FluxSeries closed_form_series(const TwoBecScenario& s, const std::vector<double>& times) {
  flux::require_increasing(times);
  const auto p = closed_form_params(s);
  flux::FluxSeries out;
  out.times = times;
  out.method = flux::Method::closed_form;
  for (double t : times) {
    const auto f = flux_closed_form(p, t);
    out.f_background.push_back(f.background());
    out.f_interference.push_back(f.interference());
    out.f_total.push_back(f.background() + f.interference());
    out.approximation_valid = out.approximation_valid && f.valid;
  }
  return out;
}

/// Saddle-point series: exact-form background is not available in this picture, so
/// the background is the closed-form Gaussian-kernel value.
inline flux::FluxSeries saddle_series(const TwoBecScenario& s, const std::vector<double>& times, unsigned threads = 1) {
  flux::require_increasing(times);
  flux::FluxSeries out;
  out.times = times;
  out.method = flux::Method::saddle;
  out.f_interference.resize(times.size());
  std::vector<char> valid(times.size(), 1);
  parallel_for(times.size(), threads, [&](std::size_t i) {
    const auto r = flux_lr_saddle(s, times[i]);
    out.f_interference[i] = r.value;
    valid[i] = r.valid;
  });
  const double t0 = s.left.r_x / s.v_q();
  const double x = s.omega_q() - s.Omega;
  const double bg = std::numbers::pi * s.gamma *
                    (s.left.n_condensed * specfun::gaussian_kernel(x, t0) +
                     s.right.n_condensed * specfun::gaussian_kernel(x + s.delta_mu, t0));
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.f_background.push_back(bg);
    out.f_total.push_back(bg + out.f_interference[i]);
    out.approximation_valid = out.approximation_valid && valid[i];
  }
  return out;
}

}  // namespace homodyne::approx
