#pragma once

// Thomas-Fermi condensates in a harmonic trap: chemical potential, radii,
// real-space amplitude, Bessel-form Fourier transform and the finite-temperature
// rescaling of the condensed cloud.
//
// TrapSpec is always SI. TFProfile is unit-agnostic: tf_profile() fills it in
// SI, to_internal() rescales it into an hbar = m = 1 system.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "homodyne/errors.hpp"
#include "homodyne/quadrature.hpp"
#include "homodyne/specfun.hpp"
#include "homodyne/units.hpp"

namespace homodyne::condensate {

using Vec3 = std::array<double, 3>;

struct TrapSpec {
  double omega_x = 0.0;  // rad/s
  double omega_y = 0.0;
  double omega_z = 0.0;
  double mass = 0.0;      // kg
  double n_atoms = 0.0;   // total atom number
  double a_s = 0.0;       // m

  void validate() const {
    if (!(omega_x > 0.0 && omega_y > 0.0 && omega_z > 0.0)) {
      throw DomainError("TrapSpec: trap frequencies must be positive");
    }
    if (!(mass > 0.0)) throw DomainError("TrapSpec: mass must be positive");
    if (!(n_atoms >= 1.0)) throw DomainError("TrapSpec: n_atoms must be >= 1");
    if (!(a_s > 0.0)) throw DomainError("TrapSpec: scattering length must be positive");
  }

  double omega_bar() const { return std::cbrt(omega_x * omega_y * omega_z); }
  /// Harmonic-oscillator length sqrt(hbar / (m omega_bar)).
  double a_bar() const { return std::sqrt(units::kHbar / (mass * omega_bar())); }
  /// Interaction strength 4 pi hbar^2 a_s / m.
  double coupling() const { return 4.0 * std::numbers::pi * units::kHbar * units::kHbar * a_s / mass; }
};

struct TFProfile {
  double mu = 0.0;
  double r_x = 0.0;
  double r_y = 0.0;
  double r_z = 0.0;
  double kappa0 = 0.0;
  double n_condensed = 0.0;
  double g = 0.0;

  double volume_radius_cubed() const { return r_x * r_y * r_z; }
  double r_min() const { return std::min({r_x, r_y, r_z}); }
  double r_max() const { return std::max({r_x, r_y, r_z}); }
  bool isotropic(double rel = 1e-12) const {
    return std::abs(r_x - r_y) <= rel * r_x && std::abs(r_x - r_z) <= rel * r_x;
  }
};

/// kappa0 = sqrt(15 pi^3 N_C r_x r_y r_z / 2).
inline double fourier_amplitude_scale(double n_condensed, double rx, double ry, double rz) {
  return std::sqrt(15.0 * std::pow(std::numbers::pi, 3) * n_condensed * rx * ry * rz / 2.0);
}

/// mu(0) = (15 N a_s / a_bar)^(2/5) hbar omega_bar / 2 for N_C = N atoms, in joules.
inline double chemical_potential_for(const TrapSpec& trap, double n_condensed) {
  trap.validate();
  return std::pow(15.0 * n_condensed * trap.a_s / trap.a_bar(), 0.4) * units::kHbar * trap.omega_bar() / 2.0;
}

inline double chemical_potential_t0(const TrapSpec& trap) { return chemical_potential_for(trap, trap.n_atoms); }

inline TFProfile tf_profile(const TrapSpec& trap, double n_condensed) {
  if (!(n_condensed > 0.0)) throw DomainError("tf_profile: n_condensed must be positive");
  TFProfile p;
  p.mu = chemical_potential_for(trap, n_condensed);
  p.r_x = std::sqrt(2.0 * p.mu / (trap.mass * trap.omega_x * trap.omega_x));
  p.r_y = std::sqrt(2.0 * p.mu / (trap.mass * trap.omega_y * trap.omega_y));
  p.r_z = std::sqrt(2.0 * p.mu / (trap.mass * trap.omega_z * trap.omega_z));
  p.n_condensed = n_condensed;
  p.g = trap.coupling();
  p.kappa0 = fourier_amplitude_scale(n_condensed, p.r_x, p.r_y, p.r_z);
  return p;
}

/// Rescale an SI profile into the hbar = m = 1 system of `scale`.
inline TFProfile to_internal(const TFProfile& p, const units::UnitScale& scale) {
  TFProfile q = p;
  const double L = scale.length;
  q.mu = scale.energy_to_internal(p.mu);
  q.r_x = p.r_x / L;
  q.r_y = p.r_y / L;
  q.r_z = p.r_z / L;
  q.kappa0 = p.kappa0 / std::pow(L, 1.5);
  q.g = p.g / (scale.energy() * L * L * L);
  return q;
}

/// Condensate amplitude f(r) = sqrt((mu - V(r)) / g) inside the Thomas-Fermi ellipsoid.
inline double amplitude(const TFProfile& p, const Vec3& r) {
  const double rho2 = r[0] * r[0] / (p.r_x * p.r_x) + r[1] * r[1] / (p.r_y * p.r_y) + r[2] * r[2] / (p.r_z * p.r_z);
  if (rho2 >= 1.0) return 0.0;
  return std::sqrt(p.mu * (1.0 - rho2) / p.g);
}

/// Value of J2(p)/p^2, continuous at p = 0.
inline double j2_over_p2(double p, bool signed_transform) {
  const double ap = std::abs(p);
  double v;
  if (ap < 1e-3) {
    const double p2 = ap * ap;
    v = 0.125 - p2 / 96.0 + p2 * p2 / 3072.0;
    if (specfun::fault::j2_offset != 0.0) v += specfun::fault::j2_offset / std::max(p2, 1e-300);
  } else {
    v = specfun::bessel_j2(ap) / (ap * ap);
  }
  return signed_transform ? v : std::abs(v);
}

/// Fourier transform of the centred Thomas-Fermi amplitude,
/// kappa0 |J2(p)| / p^2 with p^2 = sum k_l^2 r_l^2. `signed_transform` keeps the
/// sign of J2, which the true transform has beyond the first Bessel zero.
inline double tf_fourier(const Vec3& k, const TFProfile& p, bool signed_transform = false) {
  for (double c : k) {
    if (!std::isfinite(c)) throw DomainError("tf_fourier: non-finite wavevector");
  }
  const double p0 = std::sqrt(k[0] * k[0] * p.r_x * p.r_x + k[1] * k[1] * p.r_y * p.r_y + k[2] * k[2] * p.r_z * p.r_z);
  return p.kappa0 * j2_over_p2(p0, signed_transform);
}

struct ThermalState {
  double T = 0.0;
  double T_c = 0.0;
  double n_c = 1.0;
  /// Chemical-potential difference at temperature T, same unit system as the scenario.
  double delta_mu_T = 0.0;
};

struct FractionResult {
  double value = 0.0;
  bool above_critical = false;
};

/// n_C(T) = 1 - (T/T_c)^3; returns 0 with `above_critical` set when T > T_c.
inline FractionResult condensate_fraction(double T, double T_c) {
  if (!(T_c > 0.0)) throw DomainError("condensate_fraction: T_c must be positive");
  if (!(T >= 0.0)) throw DomainError("condensate_fraction: negative temperature");
  if (T > T_c) return {0.0, true};
  const double x = T / T_c;
  return {1.0 - x * x * x, false};
}

/// Build the thermal state of a cloud whose zero-temperature chemical potential is
/// `mu0`. delta_mu(T) = delta_mu(0) - (mu(T) - mu(0)) / hbar; pass hbar = 1 for
/// internal units.
inline ThermalState make_thermal_state(double T, double T_c, double mu0, double delta_mu0, double hbar) {
  const auto frac = condensate_fraction(T, T_c);
  ThermalState s;
  s.T = T;
  s.T_c = T_c;
  s.n_c = frac.value;
  const double mu_T = mu0 * std::pow(frac.value, 0.4);
  s.delta_mu_T = delta_mu0 - (mu_T - mu0) / hbar;
  return s;
}

/// Profile of the condensed part at temperature T: mu scales with n_C^(2/5),
/// the radii with n_C^(1/5), N_C with n_C.
inline TFProfile thermal_rescale(const TFProfile& p0, const ThermalState& thermal) {
  if (!(thermal.T >= 0.0)) throw DomainError("thermal_rescale: negative temperature");
  if (!(thermal.T < thermal.T_c)) {
    throw DomainError("thermal_rescale: T >= T_c leaves no condensate (degenerate profile)");
  }
  const double nc = condensate_fraction(thermal.T, thermal.T_c).value;
  const double radius_scale = std::pow(nc, 0.2);
  TFProfile p = p0;
  p.mu = p0.mu * std::pow(nc, 0.4);
  p.r_x = p0.r_x * radius_scale;
  p.r_y = p0.r_y * radius_scale;
  p.r_z = p0.r_z * radius_scale;
  p.n_condensed = p0.n_condensed * nc;
  p.kappa0 = fourier_amplitude_scale(p.n_condensed, p.r_x, p.r_y, p.r_z);
  return p;
}

/// Ideal-gas critical temperature in a harmonic trap, k_B T_c = hbar omega_bar (N / zeta(3))^(1/3).
inline double critical_temperature(const TrapSpec& trap) {
  trap.validate();
  return units::kHbar * trap.omega_bar() * std::cbrt(trap.n_atoms / units::kZeta3) / units::kBoltzmann;
}

/// Upper momentum cutoff p_max such that the Bessel envelope |J2(p)|^2 / p^4 has
/// fallen below eps times its peak value 1/64 (using |J2|^2 <= 2/(pi p)).
inline double envelope_cutoff(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("envelope_cutoff: eps must lie in (0, 1)");
  return std::pow(128.0 / (std::numbers::pi * eps), 0.2);
}

/// Momentum-space norm  integral |f~(k)|^2 d^3k / (2 pi)^3 . The anisotropic
/// integral is mapped onto the isotropic one by k_l -> u_l / r_l, truncated at the
/// envelope cutoff and tail-corrected with the asymptotic average of J2^2.
inline double momentum_norm(const TFProfile& p, const quad::QuadSpec& spec) {
  const double cut = envelope_cutoff(spec.envelope_eps);
  auto r = quad::integrate_1d(
      [](double u) {
        const double v = j2_over_p2(u, true);
        return v * v * u * u;
      },
      0.0, cut, spec, {.initial_panels = quad::oscillation_panels(2.0 * cut, spec)});
  const double tail = 1.0 / (2.0 * std::numbers::pi * cut * cut) +
                      std::sin(2.0 * cut - 2.5 * std::numbers::pi) / (2.0 * std::numbers::pi * cut * cut * cut);
  const double radial = r.value + tail;
  return p.kappa0 * p.kappa0 / p.volume_radius_cubed() * radial / (2.0 * std::numbers::pi * std::numbers::pi);
}

/// Real-space norm  integral f(r)^2 d^3r  in scaled spherical coordinates.
inline double real_space_norm(const TFProfile& p, const quad::QuadSpec& spec) {
  auto r = quad::integrate_1d([](double rho) { return 4.0 * std::numbers::pi * rho * rho * (1.0 - rho * rho); },
                              0.0, 1.0, spec);
  return p.mu / p.g * p.volume_radius_cubed() * r.value;
}

}  // namespace homodyne::condensate
