#pragma once

#include <cmath>

namespace homodyne::units {

// CODATA 2018 values.
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kBoltzmann = 1.380649e-23;      // J / K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kBohrRadius = 5.29177210903e-11;  // m
inline constexpr double kZeta3 = 1.2020569031595942;

/// Internal unit system with hbar = m = 1 and a chosen length unit.
/// Time unit is m L^2 / hbar, energy unit hbar^2 / (m L^2).
struct UnitScale {
  double length = 1.0;  // m
  double mass = 1.0;    // kg

  double time() const { return mass * length * length / kHbar; }
  double energy() const { return kHbar * kHbar / (mass * length * length); }
  double angular_frequency() const { return 1.0 / time(); }
  double wavevector() const { return 1.0 / length; }
  double velocity() const { return length / time(); }

  double length_to_internal(double x_m) const { return x_m / length; }
  double length_to_si(double x) const { return x * length; }
  double time_to_internal(double t_s) const { return t_s / time(); }
  double time_to_si(double t) const { return t * time(); }
  double rate_to_internal(double w_rad_s) const { return w_rad_s * time(); }
  double rate_to_si(double w) const { return w / time(); }
  double energy_to_internal(double e_j) const { return e_j / energy(); }
  double energy_to_si(double e) const { return e * energy(); }
  double wavevector_to_internal(double k_per_m) const { return k_per_m * length; }
  double wavevector_to_si(double k) const { return k / length; }
  double velocity_to_internal(double v_m_s) const { return v_m_s / velocity(); }
  double velocity_to_si(double v) const { return v * velocity(); }
};

}  // namespace homodyne::units
