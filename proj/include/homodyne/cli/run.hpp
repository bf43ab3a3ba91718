#pragma once

// Scenario execution: SI config -> internal units -> module calls -> RunOutput.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>

#include "homodyne/approx.hpp"
#include "homodyne/bosehubbard.hpp"
#include "homodyne/cli/config.hpp"
#include "homodyne/cli/csv.hpp"
#include "homodyne/condensate.hpp"
#include "homodyne/correlation.hpp"
#include "homodyne/flux_twobec.hpp"
#include "homodyne/units.hpp"

namespace homodyne::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  flux::Method method = flux::Method::exact;
  unsigned threads = 1;
};

/// Two-condensate scenario in the hbar = m = 1 system whose length unit is the
/// left cloud's x radius.
struct TwoBecSetup {
  flux::TwoBecScenario scenario;
  units::UnitScale scale;
  double t_end = 0.0;
};

inline TwoBecSetup make_two_bec(const TwoBecConfig& c) {
  const auto left_si = condensate::tf_profile(c.left, c.left.n_atoms);
  const auto right_si = condensate::tf_profile(c.right, c.right.n_atoms);
  TwoBecSetup out;
  out.scale = {left_si.r_x, c.left.mass};
  auto& s = out.scenario;
  s.left = condensate::to_internal(left_si, out.scale);
  s.right = condensate::to_internal(right_si, out.scale);
  s.q = c.q_per_m ? out.scale.wavevector_to_internal(*c.q_per_m)
                  : out.scale.velocity_to_internal(*c.v_q_m_per_s);  // v_q = q when hbar = m = 1
  s.d = c.d_m ? out.scale.length_to_internal(*c.d_m) : *c.d_over_rx;
  s.alpha = c.alpha_rad;
  s.Omega = s.omega_q() + out.scale.rate_to_internal(c.Omega_minus_wq_rad_per_s);
  s.delta_mu = out.scale.rate_to_internal(c.delta_mu_rad_per_s);
  s.phi_lr = c.phi_lr_rad;
  s.signed_transform = c.numerics.signed_transform;
  s.spec.abs_tol = c.numerics.abs_tol;
  s.spec.rel_tol = c.numerics.rel_tol;
  s.spec.envelope_eps = c.numerics.envelope_eps;
  s.validate();
  out.t_end = c.t_end_s ? out.scale.time_to_internal(*c.t_end_s) : *c.t_end_periods * 2.0 * std::numbers::pi / std::abs(s.delta_mu);
  return out;
}

inline void common_metadata(RunOutput& o, const ScenarioConfig& cfg, const std::string& method) {
  o.meta("homodyne_version", kVersion);
  o.meta("kind", cfg.kind);
  o.meta("method", method);
  o.meta("config", cfg.raw.dump());
}

inline void scale_metadata(RunOutput& o, const units::UnitScale& u) {
  o.meta("unit_length_m", u.length);
  o.meta("unit_mass_kg", u.mass);
  o.meta("unit_time_s", u.time());
}

inline void scenario_metadata(RunOutput& o, const flux::TwoBecScenario& s) {
  o.meta("internal_q", s.q);
  o.meta("internal_d", s.d);
  o.meta("internal_alpha", s.alpha);
  o.meta("internal_Omega", s.Omega);
  o.meta("internal_delta_mu", s.delta_mu);
  o.meta("internal_mu_left", s.left.mu);
  o.meta("internal_mu_right", s.right.mu);
  o.meta("internal_rx_right", s.right.r_x);
  o.meta("n_condensed_left", s.left.n_condensed);
  o.meta("n_condensed_right", s.right.n_condensed);
  o.meta("k_max", s.k_max());
  o.meta("abs_tol", s.spec.abs_tol);
  o.meta("rel_tol", s.spec.rel_tol);
  o.meta("envelope_eps", s.spec.envelope_eps);
}

inline RunOutput run_two_bec(const ScenarioConfig& cfg, const TwoBecConfig& c, const RunOptions& opt) {
  const auto setup = make_two_bec(c);
  const auto& s = setup.scenario;
  const auto times = flux::time_grid(setup.t_end, c.points);
  flux::FluxSeries series;
  switch (opt.method) {
    case flux::Method::exact:
      series = flux::flux_series(s, times, std::nullopt, opt.threads);
      break;
    case flux::Method::closed_form:
      series = approx::closed_form_series(s, times);
      break;
    case flux::Method::saddle:
      series = approx::saddle_series(s, times, opt.threads);
      break;
  }
  RunOutput o;
  common_metadata(o, cfg, flux::to_string(opt.method));
  scale_metadata(o, setup.scale);
  scenario_metadata(o, s);
  o.meta("flux_unit", "gamma (internal units)");
  const auto onset = flux::onset_time(s);
  o.meta("t_c_s", setup.scale.time_to_si(onset.t_c));
  if (s.delta_mu != 0.0) o.meta("period_s", setup.scale.time_to_si(2.0 * std::numbers::pi / std::abs(s.delta_mu)));
  o.meta("converged", series.converged);
  o.meta("approximation_valid", series.approximation_valid);
  if (!series.converged) o.warnings.push_back("quadrature did not reach tolerance at one or more time points");
  if (!series.approximation_valid) o.warnings.push_back("approximation outside its validity range");
  if (onset.overlapping) o.warnings.push_back("clouds overlap at t = 0; onset time is zero");
  o.header = {"t_s", "F_B", "F_I", "F", "F_over_FB"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double fb = series.f_background[i];
    const double ratio = fb != 0.0 ? series.f_total[i] / fb : 0.0;
    o.add_row({setup.scale.time_to_si(times[i]), fb, series.f_interference[i], series.f_total[i], ratio});
  }
  return o;
}

/// Amplitude C(T) of the interference flux for one temperature (in units of T_c).
inline double thermometry_amplitude(const flux::TwoBecScenario& s, double T_over_Tc, const ThermometryConfig& c,
                                    unsigned threads, bool* converged = nullptr) {
  if (T_over_Tc >= 1.0) return 0.0;
  const auto thermal = flux::thermal_state(s, T_over_Tc);
  const double period = 2.0 * std::numbers::pi / std::abs(thermal.delta_mu_T);
  const double tc = flux::onset_time(s).t_c;
  const double t_min = tc > 0.0 ? c.t_min_over_tc * tc : period;
  const auto times = flux::time_grid(t_min + c.periods * period, c.points);
  const auto series = flux::flux_series(s, times, thermal, threads);
  if (converged) *converged = *converged && series.converged;
  return flux::amplitude_C(series, t_min, period);
}

inline RunOutput run_thermometry(const ScenarioConfig& cfg, const ThermometryConfig& c, const RunOptions& opt) {
  if (opt.method != flux::Method::exact) throw DomainError("thermometry supports only --method exact");
  const auto setup = make_two_bec(c.base);
  const auto& s = setup.scenario;
  RunOutput o;
  common_metadata(o, cfg, "exact");
  scale_metadata(o, setup.scale);
  scenario_metadata(o, s);
  o.meta("T_c_K", condensate::critical_temperature(c.base.right));
  o.meta("window_t_min_over_tc", c.t_min_over_tc);
  o.meta("window_periods", c.periods);
  o.meta("window_points", static_cast<double>(c.points));
  bool ok = true;
  const double c0 = thermometry_amplitude(s, 0.0, c, opt.threads, &ok);
  o.meta("C0", c0);
  o.header = {"T_over_Tc", "C", "C_over_C0", "sqrt_nc"};
  for (double T : c.temperatures_over_tc) {
    const double C = T == 0.0 ? c0 : thermometry_amplitude(s, T, c, opt.threads, &ok);
    const double nc = condensate::condensate_fraction(T, 1.0).value;
    o.add_row({T, C, c0 > 0.0 ? C / c0 : 0.0, std::sqrt(nc)});
  }
  o.meta("converged", ok);
  if (!ok) o.warnings.push_back("quadrature did not reach tolerance at one or more time points");
  return o;
}

inline bosehubbard::LatticeScenario make_lattice(const LatticeConfig& c) {
  bosehubbard::LatticeScenario s;
  s.m_sites = c.m_sites;
  s.d0 = 1.0;
  s.v0_over_er = c.v0_over_er;
  s.x0 = c.x0_over_d0;
  s.d = c.d_over_d0;
  s.q = c.q_d0;
  s.Omega_minus_wq = c.Omega_minus_wq_over_wr * s.omega_r();
  s.delta_mu = c.delta_mu_over_wr * s.omega_r();
  s.phi_lr = c.phi_lr_rad;
  s.spec.abs_tol = c.abs_tol;
  s.spec.rel_tol = c.rel_tol;
  if (c.n_left_d0sq) {
    s.n_left = *c.n_left_d0sq;
  } else {
    const double psi = bosehubbard::meanfield_solve({0.2, c.mu_over_u, c.n_max, 1e-10}).psi;
    s.n_left = psi * psi;
  }
  s.validate();
  return s;
}

inline RunOutput run_lattice(const ScenarioConfig& cfg, const LatticeConfig& c, const RunOptions& opt) {
  if (opt.method != flux::Method::exact) throw DomainError("lattice supports only --method exact");
  const auto s = make_lattice(c);
  const units::UnitScale scale{c.d0_m, c.mass_kg};
  const double T = 2.0 * std::numbers::pi / std::abs(s.delta_mu);
  const auto times = flux::time_grid(c.t_end_periods * T, c.points);
  const auto unit = bosehubbard::lattice_unit_series(s, times, opt.threads);
  const double c_unit = flux::amplitude_C(unit.times, unit.unit_interference, c.t_min_periods * T, T);
  RunOutput o;
  common_metadata(o, cfg, "exact");
  scale_metadata(o, scale);
  o.meta("internal_omega_r", s.omega_r());
  o.meta("internal_delta_mu", s.delta_mu);
  o.meta("internal_Omega_minus_wq", s.Omega_minus_wq);
  o.meta("internal_q", s.q);
  o.meta("internal_d", s.d);
  o.meta("internal_x0", s.x0);
  o.meta("wannier_width_d0", s.wannier());
  o.meta("n_left_d0sq", s.n_left);
  o.meta("mu_over_u", c.mu_over_u);
  o.meta("n_max", static_cast<double>(c.n_max));
  if (c.mu_over_u > 0.0 && c.mu_over_u < 1.0) o.meta("r_c_perturbative", bosehubbard::lobe_boundary(c.mu_over_u, 1));
  o.meta("C_per_unit_psi", c_unit);
  o.meta("flux_unit", "gamma M^2 (internal units)");
  o.meta("abs_tol", s.spec.abs_tol);
  o.meta("rel_tol", s.spec.rel_tol);
  o.meta("converged", unit.converged);
  if (!unit.converged) o.warnings.push_back("lattice quadrature did not reach tolerance");
  o.header = {"r", "psi", "C", "C_over_C0"};
  std::vector<bosehubbard::MeanFieldSolution> sols(c.r_grid.size());
  parallel_for(c.r_grid.size(), opt.threads, [&](std::size_t i) {
    sols[i] = bosehubbard::meanfield_solve({c.r_grid[i], c.mu_over_u, c.n_max, 1e-10});
  });
  for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
    if (!sols[i].converged) o.warnings.push_back("mean-field solve flagged at r = " + format_number(c.r_grid[i]));
    const double C = sols[i].psi * c_unit;
    o.add_row({c.r_grid[i], sols[i].psi, C, c_unit > 0.0 ? C / c_unit : 0.0});
  }
  return o;
}

inline correlation::G1Model make_g1_model(const CorrelationConfig& c, const std::filesystem::path& dir, double L) {
  if (c.model == "uniform") return correlation::PureCondensate{c.density_per_m3 * L * L * L, std::nullopt};
  if (c.model == "thermal_gaussian") return correlation::ThermalGaussian{c.density_per_m3 * L * L * L, c.lambda_m / L};
  if (c.model == "tf") {
    const auto si = condensate::tf_profile(c.trap, c.trap.n_atoms);
    correlation::PureCondensate m;
    m.profile = condensate::to_internal(si, {L, c.trap.mass});
    return m;
  }
  std::filesystem::path path = c.table_path;
  if (path.is_relative() && !dir.empty()) path = dir / path;
  auto t = correlation::load_tabulated(path.string(), c.table_axis);
  for (auto& x : t.grid) x *= c.table_x_unit_m / L;
  return t;
}

inline RunOutput run_correlation(const ScenarioConfig& cfg, const CorrelationConfig& c, const RunOptions& opt) {
  if (opt.method != flux::Method::exact) throw DomainError("correlation supports only --method exact");
  constexpr double L = 1e-6;  // internal length unit (m); the readout only involves ratios
  const auto model = make_g1_model(c, cfg.source_dir, L);
  correlation::ExcitationSpec base;
  for (int i = 0; i < 3; ++i) {
    base.d[i] = c.d_m[i] / L;
    base.q[i] = c.q_per_m[i] * L;
  }
  base.delta_r = c.delta_r_m / L;
  base.pulse_t = c.pulse_t_s;
  base.omega_tilde = c.omega_tilde_rad_per_s;
  base.omega_alpha = c.omega_alpha_rad_per_s;
  base.validate();
  const quad::QuadSpec spec{.abs_tol = c.abs_tol, .rel_tol = c.rel_tol};

  RunOutput o;
  common_metadata(o, cfg, "exact");
  o.meta("unit_length_m", L);
  o.meta("sweep_param", c.sweep_param);
  o.meta("visibility_delta_limit", correlation::visibility_delta_limit(base, model));
  const auto regime = correlation::pulse_regime_check(base);
  o.meta("pulse_regime_ok", regime.ok);
  if (!regime.ok) o.warnings.push_back("pulse regime: " + regime.reason);
  o.meta("abs_tol", spec.abs_tol);
  o.meta("rel_tol", spec.rel_tol);
  o.header = {"param", "visibility"};

  const double dn = correlation::norm(base.d), qn = correlation::norm(base.q);
  std::vector<correlation::CorrelationFlux> res(c.sweep_values.size());
  std::vector<correlation::ExcitationSpec> specs(c.sweep_values.size(), base);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double v = c.sweep_values[i];
    auto& e = specs[i];
    if (c.sweep_param == "delta_r_m") {
      e.delta_r = v / L;
    } else if (c.sweep_param == "d_m") {
      for (int k = 0; k < 3; ++k) e.d[k] = base.d[k] / dn * v / L;
    } else {
      const auto& dir = qn > 0.0 ? base.q : base.d;
      const double n = qn > 0.0 ? qn : dn;
      for (int k = 0; k < 3; ++k) e.q[k] = dir[k] / n * v * L;
    }
    e.validate();
  }
  parallel_for(specs.size(), opt.threads,
               [&](std::size_t i) { res[i] = correlation::flux_correlation_exact(specs[i], model, spec); });
  bool ok = true, wide = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    ok = ok && res[i].converged;
    wide = wide || !specs[i].localized();
    o.add_row({c.sweep_values[i], res[i].visibility()});
  }
  o.meta("converged", ok);
  if (!ok) o.warnings.push_back("quadrature did not reach tolerance for one or more sweep points");
  if (wide) o.warnings.push_back("delta_r exceeds |d|/5: spots are not well separated");
  return o;
}

inline RunOutput run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  return std::visit(
      [&](const auto& body) -> RunOutput {
        using B = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<B, TwoBecConfig>) return run_two_bec(cfg, body, opt);
        if constexpr (std::is_same_v<B, ThermometryConfig>) return run_thermometry(cfg, body, opt);
        if constexpr (std::is_same_v<B, LatticeConfig>) return run_lattice(cfg, body, opt);
        if constexpr (std::is_same_v<B, CorrelationConfig>) return run_correlation(cfg, body, opt);
      },
      cfg.body);
}

}  // namespace homodyne::cli
