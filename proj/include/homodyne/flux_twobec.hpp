#pragma once

// Photon flux of two outcoupled condensates by direct k-space quadrature.
//
// Everything here works in internal units with hbar = m = 1, so the recoil
// velocity equals q and the recoil frequency is q^2/2. The recoil wavevector
// points along the first lab axis and the separation lies in the x-y plane at
// angle alpha to it.
//
// Each flux component is an integral over k of a Fourier-amplitude product
// times the phased diffraction kernel evaluated at the detuning
//   w(k) = Omega - omega_q - q k_par - k^2 / 2.
// For isotropic clouds the azimuth around q integrates to a J0 factor, leaving
// a 2D (k_perp, k_par) integral; anisotropic clouds use full 3D coordinates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "homodyne/condensate.hpp"
#include "homodyne/errors.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/quadrature.hpp"
#include "homodyne/specfun.hpp"

namespace homodyne::flux {

using condensate::TFProfile;

struct TwoBecScenario {
  TFProfile left;
  TFProfile right;
  double d = 0.0;
  double alpha = 0.0;
  double q = 0.0;
  double Omega = 0.0;
  double delta_mu = 0.0;
  double phi_lr = 0.0;
  double gamma = 1.0;
  /// Keep the sign of J2 in the Fourier amplitudes instead of |J2|.
  bool signed_transform = false;
  quad::QuadSpec spec{.abs_tol = 1e-10, .rel_tol = 1e-6};

  void validate() const {
    if (!(d > 0.0)) throw DomainError("TwoBecScenario: d must be positive");
    if (!(q > 0.0)) throw DomainError("TwoBecScenario: q must be positive");
    for (const auto* p : {&left, &right}) {
      if (!(p->r_x > 0.0 && p->r_y > 0.0 && p->r_z > 0.0 && p->n_condensed >= 0.0 && p->kappa0 >= 0.0)) {
        throw DomainError("TwoBecScenario: invalid condensate profile");
      }
    }
    if (!std::isfinite(alpha) || !std::isfinite(Omega) || !std::isfinite(delta_mu) || !std::isfinite(phi_lr)) {
      throw DomainError("TwoBecScenario: non-finite parameter");
    }
    spec.validate();
  }

  double v_q() const { return q; }
  double omega_q() const { return 0.5 * q * q; }
  double k_max() const {
    return condensate::envelope_cutoff(spec.envelope_eps) / std::min(left.r_min(), right.r_min());
  }
};

/// The four flux components at one time, in units of gamma.
struct FluxComponents {
  double left = 0.0;
  double right = 0.0;
  double left_to_right = 0.0;
  double right_to_left = 0.0;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  double background() const { return left + right; }
  double interference() const { return left_to_right + right_to_left; }
  double total() const { return background() + interference(); }
};

namespace detail {

using V4 = quad::FixedVector<4>;

// Rough size of the steady background flux, used to make the absolute tolerance
// scale-aware.
inline double flux_scale(const TwoBecScenario& s) {
  const double n = std::max(s.left.n_condensed, s.right.n_condensed);
  return std::max(1e-300, n * std::min(s.left.r_x, s.right.r_x) / s.q);
}

// Resonances of the detuning `delta - q k_par - k^2/2` on a line of fixed
// k_perp, plus the first few zeros of the diffraction kernel on either side.
inline void resonance_breakpoints(double delta, double q, double kperp, double t, std::vector<double>& out) {
  const double disc = q * q + 2.0 * delta - kperp * kperp;
  if (disc < 0.0) return;
  const double root = -q + std::sqrt(disc);
  const double slope = std::max(q + root, 1e-12);
  const double step = 2.0 * std::numbers::pi / (slope * t);
  out.push_back(root);
  for (int m = 1; m <= 4; ++m) {
    out.push_back(root + m * step);
    out.push_back(root - m * step);
  }
}

// Re[e^{i theta} delta~(w)] = delta(w) cos(theta - w t / 2).
inline double phased_real(double theta, double w, double t) {
  return specfun::diffraction(w, t) * std::cos(theta - 0.5 * w * t);
}

struct Kernel {
  const TwoBecScenario& s;
  const TFProfile& left;
  const TFProfile& right;
  double delta_mu;
  double t;

  // Integrand at one k (lab components), excluding measure and prefactor.
  // `transverse_phase` is the part of k.d not along q; for the isotropic path it is
  // replaced by the J0 azimuthal average.
  V4 operator()(double kx, double ky, double kz, double parallel_phase, double transverse_factor) const {
    const double fl = condensate::tf_fourier({kx, ky, kz}, left, s.signed_transform);
    const double fr = condensate::tf_fourier({kx, ky, kz}, right, s.signed_transform);
    const double k2 = kx * kx + ky * ky + kz * kz;
    const double w1 = s.Omega - s.omega_q() - s.q * kx - 0.5 * k2;
    const double w2 = w1 - delta_mu;
    const double theta = delta_mu * t - s.phi_lr - parallel_phase;
    const double cross = fl * fr * transverse_factor;
    V4 v;
    v[0] = fl * fl * phased_real(0.0, w1, t);
    v[1] = fr * fr * phased_real(0.0, w2, t);
    v[2] = cross * phased_real(theta, w1, t);
    v[3] = cross * phased_real(-theta, w2, t);
    return v;
  }
};

inline FluxComponents assemble(const quad::QuadResult<V4>& r, double prefactor) {
  FluxComponents c;
  c.left = prefactor * r.value[0];
  c.right = prefactor * r.value[1];
  c.left_to_right = prefactor * r.value[2];
  c.right_to_left = prefactor * r.value[3];
  c.err_estimate = prefactor * r.err_estimate;
  c.evaluations = r.evaluations;
  c.converged = r.converged;
  return c;
}

inline FluxComponents components_with(const TwoBecScenario& s, const TFProfile& right, double delta_mu, double t) {
  s.validate();
  if (!(t > 0.0)) throw DomainError("flux: t must be positive");
  const Kernel kernel{s, s.left, right, delta_mu, t};
  const double K = s.k_max();
  const double scale = flux_scale(s);
  const double Delta = s.Omega - s.omega_q();
  const double dpar = s.d * std::cos(s.alpha);
  const double dperp = s.d * std::sin(s.alpha);
  const double rmax = std::max(s.left.r_max(), right.r_max());

  quad::QuadSpec outer = s.spec;
  outer.abs_tol = std::max(s.spec.abs_tol, 1e-3 * s.spec.rel_tol * scale) * (2.0 * std::numbers::pi);
  quad::QuadSpec inner = outer;
  inner.abs_tol = outer.abs_tol / (10.0 * K);
  inner.rel_tol = outer.rel_tol / 10.0;

  const std::size_t inner_panels =
      quad::oscillation_panels(2.0 * K * (std::abs(dpar) + s.q * t + 2.0 * rmax), s.spec);
  const std::size_t outer_panels =
      quad::oscillation_panels(0.5 * K * K * t + K * (std::abs(dperp) + 2.0 * rmax), s.spec);

  std::size_t evaluations = 0;
  bool converged = true;
  double inner_err = 0.0;
  std::vector<double> bps;

  auto line = [&](double kperp, auto&& point) {
    bps.clear();
    resonance_breakpoints(Delta, s.q, kperp, t, bps);
    resonance_breakpoints(Delta - delta_mu, s.q, kperp, t, bps);
    std::sort(bps.begin(), bps.end());
    auto r = quad::integrate_1d<V4>(point, -K, K, inner, {.initial_panels = inner_panels, .breakpoints = bps});
    evaluations += r.evaluations;
    converged = converged && r.converged;
    return r;
  };

  if (s.left.isotropic() && right.isotropic()) {
    auto f = [&](double kperp) {
      const double j0 = specfun::bessel_j0(kperp * dperp);
      auto r = line(kperp, [&](double kpar) { return kernel(kpar, kperp, 0.0, kpar * dpar, j0); });
      inner_err = std::max(inner_err, r.err_estimate);
      return kperp * r.value;
    };
    auto r = quad::integrate_1d<V4>(f, 0.0, K, outer, {.initial_panels = outer_panels});
    r.err_estimate += inner_err * K * K;
    r.evaluations = evaluations;
    r.converged = r.converged && converged;
    return assemble(r, s.gamma / (2.0 * std::numbers::pi));
  }

  // Anisotropic clouds: k_perp outer, azimuth middle, k_par inner.
  quad::QuadSpec middle = outer;
  middle.abs_tol = outer.abs_tol / (10.0 * K);
  middle.rel_tol = outer.rel_tol / 10.0;
  inner.abs_tol = middle.abs_tol / (10.0 * 2.0 * std::numbers::pi);
  inner.rel_tol = middle.rel_tol / 10.0;
  auto f = [&](double kperp) {
    auto m = quad::integrate_1d<V4>(
        [&](double phi) {
          const double ky = kperp * std::cos(phi);
          const double kz = kperp * std::sin(phi);
          const double yphase = ky * dperp;
          // the transverse phase is folded into theta through the parallel phase slot
          auto r = line(kperp, [&](double kpar) { return kernel(kpar, ky, kz, kpar * dpar + yphase, 1.0); });
          inner_err = std::max(inner_err, r.err_estimate);
          return r.value;
        },
        0.0, 2.0 * std::numbers::pi, middle,
        {.initial_panels = quad::oscillation_panels(kperp * (std::abs(dperp) + 2.0 * rmax), s.spec)});
    converged = converged && m.converged;
    return kperp * m.value;
  };
  auto r = quad::integrate_1d<V4>(f, 0.0, K, outer, {.initial_panels = outer_panels});
  r.err_estimate += inner_err * 2.0 * std::numbers::pi * K * K;
  r.evaluations = evaluations;
  r.converged = r.converged && converged;
  return assemble(r, s.gamma / (4.0 * std::numbers::pi * std::numbers::pi));
}

}  // namespace detail

/// All four components at zero temperature.
inline FluxComponents flux_components(const TwoBecScenario& s, double t) {
  return detail::components_with(s, s.right, s.delta_mu, t);
}

/// Background flux F_L + F_R.
inline double background_flux(const TwoBecScenario& s, double t) { return flux_components(s, t).background(); }

/// Interference flux F_LR + F_RL from the full k-space quadrature.
inline double interference_flux_exact(const TwoBecScenario& s, double t) {
  return flux_components(s, t).interference();
}

/// Thermal state of the right cloud in internal units: `T_over_Tc` in [0, 1).
inline condensate::ThermalState thermal_state(const TwoBecScenario& s, double T_over_Tc) {
  return condensate::make_thermal_state(T_over_Tc, 1.0, s.right.mu, s.delta_mu, 1.0);
}

/// Components with the right cloud at finite temperature. The right Fourier
/// amplitude is built from the rescaled profile and delta_mu shifts with it;
/// no condensate at or above T_c gives all-zero right-cloud terms.
inline FluxComponents flux_components_thermal(const TwoBecScenario& s, const condensate::ThermalState& thermal,
                                              double t) {
  if (!(thermal.T < thermal.T_c)) {
    TwoBecScenario empty = s;
    empty.right.kappa0 = 0.0;
    empty.right.n_condensed = 0.0;
    return detail::components_with(empty, empty.right, thermal.delta_mu_T, t);
  }
  const TFProfile right = condensate::thermal_rescale(s.right, thermal);
  return detail::components_with(s, right, thermal.delta_mu_T, t);
}

inline double interference_flux_thermal(const TwoBecScenario& s, const condensate::ThermalState& thermal, double t) {
  if (!(thermal.T < thermal.T_c)) return 0.0;
  return flux_components_thermal(s, thermal, t).interference();
}

enum class Method { exact, closed_form, saddle };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::exact:
      return "exact";
    case Method::closed_form:
      return "closed-form";
    case Method::saddle:
      return "saddle";
  }
  return "unknown";
}

struct FluxSeries {
  std::vector<double> times;
  std::vector<double> f_background;
  std::vector<double> f_interference;
  std::vector<double> f_total;
  Method method = Method::exact;
  double k_max = 0.0;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  bool converged = true;
  /// Validity gate of an approximate method; always true for exact series.
  bool approximation_valid = true;
  std::size_t evaluations = 0;

  std::size_t size() const { return times.size(); }
};

/// Uniform grid t_i = (i + 1) t_end / n, i = 0 .. n-1 (t = 0 excluded).
inline std::vector<double> time_grid(double t_end, std::size_t n) {
  if (!(t_end > 0.0) || n == 0) throw DomainError("time_grid: need t_end > 0 and n >= 1");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t_end * static_cast<double>(i + 1) / static_cast<double>(n);
  return t;
}

inline void require_increasing(const std::vector<double>& times) {
  if (times.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw DomainError("time grid must be positive and strictly increasing");
    }
  }
}

/// Exact series over `times`, optionally with the right cloud at finite temperature.
inline FluxSeries flux_series(const TwoBecScenario& s, const std::vector<double>& times,
                              const std::optional<condensate::ThermalState>& thermal = std::nullopt,
                              unsigned threads = 1) {
  s.validate();
  require_increasing(times);
  std::vector<FluxComponents> parts(times.size());
  parallel_for(times.size(), threads, [&](std::size_t i) {
    parts[i] = thermal ? flux_components_thermal(s, *thermal, times[i]) : flux_components(s, times[i]);
  });
  FluxSeries out;
  out.times = times;
  out.method = Method::exact;
  out.k_max = s.k_max();
  out.abs_tol = s.spec.abs_tol;
  out.rel_tol = s.spec.rel_tol;
  for (const auto& c : parts) {
    out.f_background.push_back(c.background());
    out.f_interference.push_back(c.interference());
    out.f_total.push_back(c.background() + c.interference());
    out.converged = out.converged && c.converged;
    out.evaluations += c.evaluations;
  }
  return out;
}

struct OnsetResult {
  double t_c = 0.0;
  bool overlapping = false;
};

/// t_c = (d - 2 r_x) / v_q; zero with `overlapping` set when the clouds touch.
inline OnsetResult onset_time(const TwoBecScenario& s) {
  const double gap = s.d - 2.0 * s.left.r_x;
  if (gap <= 0.0) return {0.0, true};
  return {gap / s.v_q(), false};
}

// ---- analysis of sampled series ------------------------------------------

/// max(F_I) - min(F_I) over t >= t_min. Needs at least three periods of coverage.
inline double amplitude_C(const std::vector<double>& times, const std::vector<double>& values, double t_min,
                          double period) {
  if (times.size() != values.size()) throw DomainError("amplitude_C: size mismatch");
  if (times.empty() || !(period > 0.0) || times.back() - t_min < 3.0 * period * (1.0 - 1e-9)) {
    throw DomainError("amplitude_C: series must cover at least three periods beyond t_min");
  }
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  return hi - lo;
}

inline double amplitude_C(const FluxSeries& s, double t_min, double period) {
  return amplitude_C(s.times, s.f_interference, t_min, period);
}

/// Mean period from upward zero crossings (linear interpolation) of the
/// mean-removed signal on t >= t_min. Returns NaN with fewer than two crossings.
inline double zero_crossing_period(const std::vector<double>& times, const std::vector<double>& values, double t_min) {
  std::vector<double> t, v;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_min) {
      t.push_back(times[i]);
      v.push_back(values[i]);
    }
  }
  if (t.size() < 3) return NAN;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  std::vector<double> ups;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = v[i - 1] - mean, b = v[i] - mean;
    if (a < 0.0 && b >= 0.0) ups.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
  }
  if (ups.size() < 2) return NAN;
  return (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
}

/// Angular frequency of the largest non-DC DFT bin of a uniformly sampled,
/// mean-removed signal on t >= t_min, and the bin spacing.
struct SpectralPeak {
  double omega = 0.0;
  double bin_width = 0.0;
};

inline SpectralPeak dominant_frequency(const std::vector<double>& times, const std::vector<double>& values,
                                       double t_min) {
  std::vector<double> v;
  double t0 = NAN, t1 = NAN;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_min) {
      if (v.empty()) t0 = times[i];
      t1 = times[i];
      v.push_back(values[i]);
    }
  }
  const std::size_t n = v.size();
  if (n < 4) throw DomainError("dominant_frequency: too few samples");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  const double span = dt * static_cast<double>(n);
  std::size_t best = 1;
  double best_power = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ph = 2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
      re += (v[j] - mean) * std::cos(ph);
      im -= (v[j] - mean) * std::sin(ph);
    }
    const double power = re * re + im * im;
    if (power > best_power) {
      best_power = power;
      best = k;
    }
  }
  const double width = 2.0 * std::numbers::pi / span;
  return {width * static_cast<double>(best), width};
}

/// First sample time at which |F_I| reaches `fraction` of its maximum.
inline double onset_estimate(const std::vector<double>& times, const std::vector<double>& values,
                             double fraction = 1e-4) {
  double peak = 0.0;
  for (double x : values) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return NAN;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(values[i]) >= fraction * peak) return times[i];
  }
  return NAN;
}

}  // namespace homodyne::flux
