#pragma once

#include <numbers>

#include "homodyne/condensate.hpp"
#include "homodyne/flux_twobec.hpp"

namespace fixtures {

// Reference two-condensate scenario in internal units (length = r_x).
inline homodyne::condensate::TFProfile unit_sphere(double n = 1e6, double mu = 2283.0) {
  homodyne::condensate::TFProfile p;
  p.mu = mu;
  p.r_x = p.r_y = p.r_z = 1.0;
  p.n_condensed = n;
  p.g = mu * 8.0 * std::numbers::pi / 15.0 / n;
  p.kappa0 = homodyne::condensate::fourier_amplitude_scale(n, 1.0, 1.0, 1.0);
  return p;
}

inline homodyne::flux::TwoBecScenario reference_pair(double alpha = 0.0) {
  homodyne::flux::TwoBecScenario s;
  s.left = s.right = unit_sphere();
  s.d = 5.0;
  s.q = 207.66;
  s.Omega = s.omega_q();
  s.delta_mu = 207.92;
  s.alpha = alpha;
  return s;
}

// Smaller, faster variant: slower recoil, lower delta_mu.
inline homodyne::flux::TwoBecScenario small(double alpha = 0.0) {
  homodyne::flux::TwoBecScenario s;
  s.left = s.right = unit_sphere(1e4, 100.0);
  s.d = 4.0;
  s.q = 40.0;
  s.Omega = s.omega_q();
  s.delta_mu = 30.0;
  s.alpha = alpha;
  return s;
}

inline double period(const homodyne::flux::TwoBecScenario& s) { return 2.0 * std::numbers::pi / s.delta_mu; }

}  // namespace fixtures
