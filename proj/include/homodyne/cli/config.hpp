#pragma once

// JSON scenario configs. Physical quantities are given in SI with the unit in
// the key name; where a quantity has a natural dimensionless form the
// alternative key (e.g. "d_over_rx") is accepted instead, never both.
// Parsing collects every violation before failing.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "homodyne/condensate.hpp"
#include "homodyne/units.hpp"

namespace homodyne::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid config:";
    for (const auto& x : v) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> issues_;
};

inline const std::vector<std::string>& allowed_kinds() {
  static const std::vector<std::string> k{"two_bec", "thermometry", "lattice", "correlation"};
  return k;
}

// ---- field reader -----------------------------------------------------------

class Reader {
 public:
  void fail(const std::string& path, const std::string& msg) { issues_.push_back(path + ": " + msg); }
  bool ok() const { return issues_.empty(); }
  const std::vector<std::string>& issues() const { return issues_; }
  void raise() const {
    if (!issues_.empty()) throw ConfigError(issues_);
  }

  static std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
  }

  std::optional<double> number(const json& obj, const std::string& base, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(base, key), "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(join(base, key), "must be finite");
      return std::nullopt;
    }
    return x;
  }

  double number_or(const json& obj, const std::string& base, const std::string& key, double fallback) {
    return number(obj, base, key).value_or(fallback);
  }

  std::optional<double> required(const json& obj, const std::string& base, const std::string& key) {
    if (!obj.contains(key)) {
      fail(join(base, key), "is required");
      return std::nullopt;
    }
    return number(obj, base, key);
  }

  double required_positive(const json& obj, const std::string& base, const std::string& key) {
    auto v = required(obj, base, key);
    positive(v, join(base, key));
    return v.value_or(0.0);
  }

  bool positive(const std::optional<double>& v, const std::string& path) {
    if (v && !(*v > 0.0)) {
      fail(path, "must be positive");
      return false;
    }
    return v.has_value();
  }

  /// Exactly one of several alternative keys, each with a factor turning it into
  /// a common unit. Returns nullopt (without an issue) when none is present.
  std::optional<double> one_of(const json& obj, const std::string& base,
                               const std::vector<std::pair<std::string, double>>& keys) {
    std::optional<double> out;
    std::string seen;
    for (const auto& [k, factor] : keys) {
      if (!obj.contains(k)) continue;
      if (!seen.empty()) {
        fail(join(base, k), "conflicts with " + join(base, seen) + " (give only one)");
        continue;
      }
      seen = k;
      if (auto v = number(obj, base, k)) out = *v * factor;
    }
    return out;
  }

  std::optional<std::array<double, 3>> triple(const json& obj, const std::string& base, const std::string& key,
                                              bool scalar_ok) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (scalar_ok && v.is_number()) {
      const double x = v.get<double>();
      return std::array<double, 3>{x, x, x};
    }
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      fail(join(base, key), scalar_ok ? "expected a number or an array of 3 numbers" : "expected an array of 3 numbers");
      return std::nullopt;
    }
    return std::array<double, 3>{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  const json* object(const json& obj, const std::string& base, const std::string& key, bool needed) {
    if (!obj.contains(key)) {
      if (needed) fail(join(base, key), "is required");
      return nullptr;
    }
    if (!obj.at(key).is_object()) {
      fail(join(base, key), "expected an object");
      return nullptr;
    }
    return &obj.at(key);
  }

  void unknown_keys(const json& obj, const std::string& base, const std::vector<std::string>& known) {
    for (const auto& [k, v] : obj.items()) {
      (void)v;
      if (std::find(known.begin(), known.end(), k) == known.end()) fail(join(base, k), "unknown key");
    }
  }

 private:
  std::vector<std::string> issues_;
};

// ---- shared pieces ------------------------------------------------------------

struct NumericsConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-6;
  double envelope_eps = 1e-6;
  bool signed_transform = false;
};

inline NumericsConfig read_numerics(Reader& r, const json& root, const std::string& base, NumericsConfig d) {
  const json* n = r.object(root, base, "numerics", false);
  if (!n) return d;
  const std::string b = Reader::join(base, "numerics");
  r.unknown_keys(*n, b, {"abs_tol", "rel_tol", "envelope_eps", "signed_transform"});
  d.abs_tol = r.number_or(*n, b, "abs_tol", d.abs_tol);
  d.rel_tol = r.number_or(*n, b, "rel_tol", d.rel_tol);
  d.envelope_eps = r.number_or(*n, b, "envelope_eps", d.envelope_eps);
  if (n->contains("signed_transform")) {
    if (n->at("signed_transform").is_boolean()) {
      d.signed_transform = n->at("signed_transform").get<bool>();
    } else {
      r.fail(Reader::join(b, "signed_transform"), "expected a boolean");
    }
  }
  if (!(d.abs_tol > 0.0)) r.fail(Reader::join(b, "abs_tol"), "must be positive");
  if (!(d.rel_tol > 0.0)) r.fail(Reader::join(b, "rel_tol"), "must be positive");
  if (!(d.envelope_eps > 0.0 && d.envelope_eps < 1.0)) r.fail(Reader::join(b, "envelope_eps"), "must lie in (0, 1)");
  return d;
}

inline std::optional<double> read_mass(Reader& r, const json& obj, const std::string& base, bool needed) {
  auto m = r.one_of(obj, base, {{"mass_kg", 1.0}, {"mass_amu", units::kAtomicMassUnit}});
  if (!m && needed) r.fail(Reader::join(base, "mass_kg"), "is required (or mass_amu)");
  if (m && !(*m > 0.0)) r.fail(Reader::join(base, "mass_kg"), "must be positive");
  return m;
}

/// Trap frequencies come either as angular frequencies ("omega_rad_per_s") or as
/// ordinary frequencies ("frequency_hz", multiplied by 2 pi); one must be chosen.
inline condensate::TrapSpec read_trap(Reader& r, const json& obj, const std::string& base) {
  r.unknown_keys(obj, base, {"omega_rad_per_s", "frequency_hz", "mass_kg", "mass_amu", "n_atoms", "a_s_m", "a_s_bohr"});
  condensate::TrapSpec t;
  const bool has_w = obj.contains("omega_rad_per_s"), has_f = obj.contains("frequency_hz");
  if (has_w && has_f) {
    r.fail(Reader::join(base, "frequency_hz"), "conflicts with omega_rad_per_s (give only one)");
  } else if (!has_w && !has_f) {
    r.fail(Reader::join(base, "omega_rad_per_s"), "is required (or frequency_hz)");
  } else {
    const std::string key = has_w ? "omega_rad_per_s" : "frequency_hz";
    if (auto w = r.triple(obj, base, key, true)) {
      const double f = has_w ? 1.0 : 2.0 * std::numbers::pi;
      t.omega_x = (*w)[0] * f;
      t.omega_y = (*w)[1] * f;
      t.omega_z = (*w)[2] * f;
      if (!(t.omega_x > 0.0 && t.omega_y > 0.0 && t.omega_z > 0.0)) r.fail(Reader::join(base, key), "must be positive");
    }
  }
  t.mass = read_mass(r, obj, base, true).value_or(0.0);
  auto n = r.required(obj, base, "n_atoms");
  if (n && !(*n >= 1.0)) r.fail(Reader::join(base, "n_atoms"), "must be >= 1");
  t.n_atoms = n.value_or(0.0);
  auto a = r.one_of(obj, base, {{"a_s_m", 1.0}, {"a_s_bohr", units::kBohrRadius}});
  if (!a) r.fail(Reader::join(base, "a_s_m"), "is required (or a_s_bohr)");
  if (a && !(*a > 0.0)) r.fail(Reader::join(base, "a_s_m"), "must be positive");
  t.a_s = a.value_or(0.0);
  return t;
}

// ---- per-kind configs -----------------------------------------------------------

struct TwoBecConfig {
  condensate::TrapSpec left;
  condensate::TrapSpec right;
  std::optional<double> q_per_m, v_q_m_per_s;
  std::optional<double> d_m, d_over_rx;
  double alpha_rad = 0.0;
  double Omega_minus_wq_rad_per_s = 0.0;
  double delta_mu_rad_per_s = 0.0;
  double phi_lr_rad = 0.0;
  std::optional<double> t_end_s, t_end_periods;
  std::size_t points = 600;
  NumericsConfig numerics;
};

struct ThermometryConfig {
  TwoBecConfig base;
  std::vector<double> temperatures_over_tc;
  double t_min_over_tc = 2.5;
  double periods = 3.2;
  std::size_t points = 110;
};

struct LatticeConfig {
  double mass_kg = 0.0;
  double d0_m = 0.0;
  int m_sites = 50;
  double v0_over_er = 10.0;
  double x0_over_d0 = 0.13;
  double d_over_d0 = 20.0;
  double q_d0 = 2.0 * std::numbers::pi;
  double Omega_minus_wq_over_wr = 1.0;
  double delta_mu_over_wr = 0.2;
  double phi_lr_rad = 0.0;
  double mu_over_u = std::numbers::sqrt2 - 1.0;
  std::optional<double> n_left_d0sq;  // defaults to psi^2 at r = 0.2
  std::vector<double> r_grid;
  int n_max = 8;
  double t_end_periods = 8.0;
  double t_min_periods = 1.0;
  std::size_t points = 240;
  double abs_tol = 1e-12;
  double rel_tol = 1e-8;
};

struct CorrelationConfig {
  std::string model;  // uniform | tf | thermal_gaussian | tabulated
  double density_per_m3 = 1.0;
  double lambda_m = 0.0;
  condensate::TrapSpec trap;
  std::string table_path;
  double table_x_unit_m = 1.0;
  std::array<double, 3> table_axis{1.0, 0.0, 0.0};
  std::array<double, 3> d_m{};
  std::array<double, 3> q_per_m{};
  double delta_r_m = 0.0;
  double pulse_t_s = 0.0;
  double omega_tilde_rad_per_s = 0.0;
  double omega_alpha_rad_per_s = 0.0;
  std::string sweep_param = "delta_r_m";  // delta_r_m | d_m | q_per_m
  std::vector<double> sweep_values;
  double abs_tol = 1e-12;
  double rel_tol = 1e-8;
};

struct ScenarioConfig {
  std::string kind;
  std::variant<TwoBecConfig, ThermometryConfig, LatticeConfig, CorrelationConfig> body;
  json raw;
  std::filesystem::path source_dir;
};

inline std::size_t read_count(Reader& r, const json& obj, const std::string& base, const std::string& key,
                              std::size_t fallback, std::size_t min) {
  auto v = r.number(obj, base, key);
  if (!v) return fallback;
  if (!(*v >= static_cast<double>(min)) || std::floor(*v) != *v) {
    r.fail(Reader::join(base, key), "must be an integer >= " + std::to_string(min));
    return fallback;
  }
  return static_cast<std::size_t>(*v);
}

inline std::vector<double> read_list(Reader& r, const json& obj, const std::string& base, const std::string& key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.empty()) {
    r.fail(Reader::join(base, key), "expected a non-empty array of numbers");
    return out;
  }
  for (const auto& x : v) {
    if (!x.is_number()) {
      r.fail(Reader::join(base, key), "expected a non-empty array of numbers");
      return {};
    }
    out.push_back(x.get<double>());
  }
  return out;
}

/// Either an explicit array or {"start", "stop", "points"} (endpoints included).
inline std::vector<double> read_grid(Reader& r, const json& obj, const std::string& base, const std::string& key) {
  if (!obj.contains(key)) return {};
  if (obj.at(key).is_array()) return read_list(r, obj, base, key);
  const json* g = r.object(obj, base, key, true);
  if (!g) return {};
  const std::string b = Reader::join(base, key);
  r.unknown_keys(*g, b, {"start", "stop", "points"});
  auto a = r.required(*g, b, "start");
  auto z = r.required(*g, b, "stop");
  const std::size_t n = read_count(r, *g, b, "points", 0, 2);
  if (!g->contains("points")) r.fail(Reader::join(b, "points"), "is required");
  if (!a || !z || n < 2) return {};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = *a + (*z - *a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

inline const std::vector<std::string>& two_bec_keys() {
  static const std::vector<std::string> k{"kind",       "trap",           "right_trap",
                                          "q_per_m",    "v_q_m_per_s",    "d_m",
                                          "d_over_rx",  "alpha_rad",      "Omega_minus_wq_rad_per_s",
                                          "delta_mu_rad_per_s", "phi_lr_rad", "time",
                                          "numerics"};
  return k;
}

inline TwoBecConfig read_two_bec(Reader& r, const json& root) {
  TwoBecConfig c;
  if (const json* t = r.object(root, "", "trap", true)) c.left = read_trap(r, *t, "trap");
  c.right = c.left;
  if (const json* t = r.object(root, "", "right_trap", false)) {
    c.right = read_trap(r, *t, "right_trap");
    if (c.right.mass != c.left.mass) r.fail("right_trap.mass_kg", "must equal trap.mass_kg (one atomic species)");
  }
  const bool has_q = root.contains("q_per_m"), has_v = root.contains("v_q_m_per_s");
  if (has_q && has_v) r.fail("v_q_m_per_s", "conflicts with q_per_m (give only one)");
  if (!has_q && !has_v) r.fail("v_q_m_per_s", "is required (or q_per_m)");
  if (has_q) r.positive(c.q_per_m = r.number(root, "", "q_per_m"), "q_per_m");
  if (has_v && !has_q) r.positive(c.v_q_m_per_s = r.number(root, "", "v_q_m_per_s"), "v_q_m_per_s");
  const bool has_d = root.contains("d_m"), has_dr = root.contains("d_over_rx");
  if (has_d && has_dr) r.fail("d_over_rx", "conflicts with d_m (give only one)");
  if (!has_d && !has_dr) r.fail("d", "is required (d_m or d_over_rx)");
  if (has_d) {
    c.d_m = r.number(root, "", "d_m");
    if (c.d_m && !(*c.d_m > 0.0)) r.fail("d_m", "d must be positive");
  }
  if (has_dr && !has_d) {
    c.d_over_rx = r.number(root, "", "d_over_rx");
    if (c.d_over_rx && !(*c.d_over_rx > 0.0)) r.fail("d_over_rx", "d must be positive");
  }
  c.alpha_rad = r.number_or(root, "", "alpha_rad", 0.0);
  c.Omega_minus_wq_rad_per_s = r.number_or(root, "", "Omega_minus_wq_rad_per_s", 0.0);
  c.delta_mu_rad_per_s = r.required(root, "", "delta_mu_rad_per_s").value_or(0.0);
  c.phi_lr_rad = r.number_or(root, "", "phi_lr_rad", 0.0);
  if (const json* t = r.object(root, "", "time", false)) {
    r.unknown_keys(*t, "time", {"t_end_s", "t_end_periods", "points"});
    if (t->contains("t_end_s") && t->contains("t_end_periods")) r.fail("time.t_end_periods", "conflicts with t_end_s");
    c.t_end_s = r.number(*t, "time", "t_end_s");
    c.t_end_periods = r.number(*t, "time", "t_end_periods");
    if (c.t_end_s) r.positive(c.t_end_s, "time.t_end_s");
    if (c.t_end_periods) r.positive(c.t_end_periods, "time.t_end_periods");
    c.points = read_count(r, *t, "time", "points", c.points, 1);
  }
  if (!c.t_end_s && !c.t_end_periods) c.t_end_periods = 5.0;
  if (c.t_end_periods && c.delta_mu_rad_per_s == 0.0) r.fail("time.t_end_periods", "needs a nonzero delta_mu_rad_per_s");
  c.numerics = read_numerics(r, root, "", {});
  return c;
}

inline ThermometryConfig read_thermometry(Reader& r, const json& root) {
  ThermometryConfig c;
  json base = root;
  for (const char* k : {"temperatures_over_tc", "window"}) base.erase(k);
  c.base = read_two_bec(r, base);
  c.temperatures_over_tc = read_list(r, root, "", "temperatures_over_tc");
  if (!root.contains("temperatures_over_tc")) r.fail("temperatures_over_tc", "is required");
  for (double x : c.temperatures_over_tc) {
    if (!(x >= 0.0 && x <= 1.0)) {
      r.fail("temperatures_over_tc", "values must lie in [0, 1]");
      break;
    }
  }
  if (const json* w = r.object(root, "", "window", false)) {
    r.unknown_keys(*w, "window", {"t_min_over_tc", "periods", "points"});
    c.t_min_over_tc = r.number_or(*w, "window", "t_min_over_tc", c.t_min_over_tc);
    c.periods = r.number_or(*w, "window", "periods", c.periods);
    c.points = read_count(r, *w, "window", "points", c.points, 8);
    if (!(c.t_min_over_tc >= 1.0)) r.fail("window.t_min_over_tc", "must be >= 1");
    if (!(c.periods >= 3.0)) r.fail("window.periods", "must be >= 3 (amplitude needs three periods)");
  }
  if (c.base.delta_mu_rad_per_s == 0.0) r.fail("delta_mu_rad_per_s", "must be nonzero for an amplitude sweep");
  return c;
}

inline LatticeConfig read_lattice(Reader& r, const json& root) {
  r.unknown_keys(root, "", {"kind", "mass_kg", "mass_amu", "d0_m", "m_sites", "v0_over_er", "x0_m", "x0_over_d0", "d_m",
                            "d_over_d0", "q_per_m", "q_times_d0", "Omega_minus_wq_rad_per_s",
                            "Omega_minus_wq_over_omega_r", "delta_mu_rad_per_s", "delta_mu_over_omega_r", "phi_lr_rad",
                            "mu_over_u", "n_left_per_m2", "n_left_times_d0sq", "r_grid", "n_max", "window", "numerics"});
  LatticeConfig c;
  c.mass_kg = read_mass(r, root, "", true).value_or(0.0);
  auto d0 = r.required(root, "", "d0_m");
  if (d0 && !(*d0 > 0.0)) r.fail("d0_m", "must be positive");
  c.d0_m = d0.value_or(1.0);
  const double L = c.d0_m;
  const double wr = c.mass_kg > 0.0 ? units::kHbar * std::numbers::pi * std::numbers::pi / (2.0 * c.mass_kg * L * L) : 1.0;
  if (auto m = r.number(root, "", "m_sites")) {
    if (!(*m >= 2.0) || std::floor(*m) != *m) r.fail("m_sites", "must be an integer >= 2");
    c.m_sites = static_cast<int>(*m);
  }
  c.v0_over_er = r.number_or(root, "", "v0_over_er", c.v0_over_er);
  if (!(c.v0_over_er > 1.0)) r.fail("v0_over_er", "must exceed 1 (single-band lattice)");
  auto pick = [&](const char* a, double fa, const char* b, double& target) {
    if (auto v = r.one_of(root, "", {{a, fa}, {b, 1.0}})) target = *v;
  };
  pick("x0_m", 1.0 / L, "x0_over_d0", c.x0_over_d0);
  pick("d_m", 1.0 / L, "d_over_d0", c.d_over_d0);
  pick("q_per_m", L, "q_times_d0", c.q_d0);
  pick("Omega_minus_wq_rad_per_s", 1.0 / wr, "Omega_minus_wq_over_omega_r", c.Omega_minus_wq_over_wr);
  pick("delta_mu_rad_per_s", 1.0 / wr, "delta_mu_over_omega_r", c.delta_mu_over_wr);
  if (auto n = r.one_of(root, "", {{"n_left_per_m2", L * L}, {"n_left_times_d0sq", 1.0}})) {
    if (!(*n >= 0.0)) r.fail("n_left_per_m2", "must be >= 0");
    c.n_left_d0sq = *n;
  }
  for (auto [v, name] : {std::pair{c.x0_over_d0, "x0"}, {c.d_over_d0, "d"}, {c.q_d0, "q"}}) {
    if (!(v > 0.0)) r.fail(name, "must be positive");
  }
  if (c.delta_mu_over_wr == 0.0) r.fail("delta_mu", "must be nonzero for an amplitude sweep");
  c.phi_lr_rad = r.number_or(root, "", "phi_lr_rad", 0.0);
  c.mu_over_u = r.number_or(root, "", "mu_over_u", c.mu_over_u);
  c.r_grid = read_grid(r, root, "", "r_grid");
  if (!root.contains("r_grid")) r.fail("r_grid", "is required");
  for (double x : c.r_grid) {
    if (!(x >= 0.0)) {
      r.fail("r_grid", "values must be >= 0");
      break;
    }
  }
  if (auto n = r.number(root, "", "n_max")) {
    if (!(*n >= 4.0) || std::floor(*n) != *n) r.fail("n_max", "must be an integer >= 4");
    c.n_max = static_cast<int>(*n);
  }
  if (const json* w = r.object(root, "", "window", false)) {
    r.unknown_keys(*w, "window", {"t_end_periods", "t_min_periods", "points"});
    c.t_end_periods = r.number_or(*w, "window", "t_end_periods", c.t_end_periods);
    c.t_min_periods = r.number_or(*w, "window", "t_min_periods", c.t_min_periods);
    c.points = read_count(r, *w, "window", "points", c.points, 8);
    if (!(c.t_end_periods - c.t_min_periods >= 3.0)) r.fail("window", "needs t_end_periods - t_min_periods >= 3");
  }
  if (const json* n = r.object(root, "", "numerics", false)) {
    r.unknown_keys(*n, "numerics", {"abs_tol", "rel_tol"});
    c.abs_tol = r.number_or(*n, "numerics", "abs_tol", c.abs_tol);
    c.rel_tol = r.number_or(*n, "numerics", "rel_tol", c.rel_tol);
    if (!(c.abs_tol > 0.0 && c.rel_tol > 0.0)) r.fail("numerics", "tolerances must be positive");
  }
  return c;
}

inline CorrelationConfig read_correlation(Reader& r, const json& root) {
  r.unknown_keys(root, "", {"kind", "model", "d_m", "q_per_m", "delta_r_m", "pulse_t_s", "omega_tilde_rad_per_s",
                            "omega_alpha_rad_per_s", "sweep", "numerics"});
  CorrelationConfig c;
  if (const json* m = r.object(root, "", "model", true)) {
    if (!m->contains("type") || !m->at("type").is_string()) {
      r.fail("model.type", "is required (uniform, tf, thermal_gaussian or tabulated)");
    } else {
      c.model = m->at("type").get<std::string>();
      if (c.model == "uniform") {
        r.unknown_keys(*m, "model", {"type", "density_per_m3"});
        c.density_per_m3 = r.required_positive(*m, "model", "density_per_m3");
      } else if (c.model == "thermal_gaussian") {
        r.unknown_keys(*m, "model", {"type", "density_per_m3", "lambda_m"});
        c.density_per_m3 = r.required_positive(*m, "model", "density_per_m3");
        c.lambda_m = r.required_positive(*m, "model", "lambda_m");
      } else if (c.model == "tf") {
        r.unknown_keys(*m, "model", {"type", "trap"});
        if (const json* t = r.object(*m, "model", "trap", true)) c.trap = read_trap(r, *t, "model.trap");
      } else if (c.model == "tabulated") {
        r.unknown_keys(*m, "model", {"type", "path", "axis", "x_unit_m"});
        if (!m->contains("path") || !m->at("path").is_string()) {
          r.fail("model.path", "is required (CSV with columns x, x_prime, re, im)");
        } else {
          c.table_path = m->at("path").get<std::string>();
        }
        if (auto a = r.triple(*m, "model", "axis", false)) c.table_axis = *a;
        c.table_x_unit_m = r.number_or(*m, "model", "x_unit_m", 1.0);
        if (!(c.table_x_unit_m > 0.0)) r.fail("model.x_unit_m", "must be positive");
      } else {
        r.fail("model.type", "unknown model '" + c.model + "' (allowed: uniform, tf, thermal_gaussian, tabulated)");
      }
    }
  }
  if (auto d = r.triple(root, "", "d_m", false)) {
    c.d_m = *d;
  } else if (!root.contains("d_m")) {
    r.fail("d_m", "is required");
  }
  if (std::hypot(c.d_m[0], c.d_m[1], c.d_m[2]) == 0.0 && root.contains("d_m")) r.fail("d_m", "d must be nonzero");
  if (auto q = r.triple(root, "", "q_per_m", false)) {
    c.q_per_m = *q;
  } else if (!root.contains("q_per_m")) {
    r.fail("q_per_m", "is required");
  }
  c.delta_r_m = r.required_positive(root, "", "delta_r_m");
  c.pulse_t_s = r.required_positive(root, "", "pulse_t_s");
  c.omega_tilde_rad_per_s = r.required(root, "", "omega_tilde_rad_per_s").value_or(0.0);
  c.omega_alpha_rad_per_s = r.number_or(root, "", "omega_alpha_rad_per_s", 0.0);
  if (const json* s = r.object(root, "", "sweep", false)) {
    r.unknown_keys(*s, "sweep", {"param", "values"});
    if (s->contains("param") && s->at("param").is_string()) c.sweep_param = s->at("param").get<std::string>();
    if (c.sweep_param != "delta_r_m" && c.sweep_param != "d_m" && c.sweep_param != "q_per_m") {
      r.fail("sweep.param", "must be one of delta_r_m, d_m, q_per_m");
    }
    c.sweep_values = read_grid(r, *s, "sweep", "values");
    if (!s->contains("values")) r.fail("sweep.values", "is required");
    for (double v : c.sweep_values) {
      if (!(v > 0.0) && c.sweep_param != "q_per_m") {
        r.fail("sweep.values", "must be positive");
        break;
      }
    }
  }
  if (c.sweep_values.empty()) {
    c.sweep_param = "delta_r_m";
    c.sweep_values = {c.delta_r_m};
  }
  if (const json* n = r.object(root, "", "numerics", false)) {
    r.unknown_keys(*n, "numerics", {"abs_tol", "rel_tol"});
    c.abs_tol = r.number_or(*n, "numerics", "abs_tol", c.abs_tol);
    c.rel_tol = r.number_or(*n, "numerics", "rel_tol", c.rel_tol);
    if (!(c.abs_tol > 0.0 && c.rel_tol > 0.0)) r.fail("numerics", "tolerances must be positive");
  }
  return c;
}

/// Parse and validate a config document. Throws ConfigError listing every issue.
inline ScenarioConfig parse_config_json(const json& root, std::filesystem::path source_dir = {}) {
  Reader r;
  ScenarioConfig cfg;
  cfg.raw = root;
  cfg.source_dir = std::move(source_dir);
  if (!root.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  std::string allowed;
  for (const auto& k : allowed_kinds()) allowed += (allowed.empty() ? "" : ", ") + k;
  if (!root.contains("kind") || !root.at("kind").is_string()) {
    throw ConfigError({"kind: is required (allowed: " + allowed + ")"});
  }
  cfg.kind = root.at("kind").get<std::string>();
  if (cfg.kind == "two_bec") {
    r.unknown_keys(root, "", two_bec_keys());
    cfg.body = read_two_bec(r, root);
  } else if (cfg.kind == "thermometry") {
    auto keys = two_bec_keys();
    keys.push_back("temperatures_over_tc");
    keys.push_back("window");
    r.unknown_keys(root, "", keys);
    cfg.body = read_thermometry(r, root);
  } else if (cfg.kind == "lattice") {
    cfg.body = read_lattice(r, root);
  } else if (cfg.kind == "correlation") {
    cfg.body = read_correlation(r, root);
  } else {
    throw ConfigError({"kind: unknown kind '" + cfg.kind + "' (allowed: " + allowed + ")"});
  }
  r.raise();
  return cfg;
}

inline ScenarioConfig parse_config_text(const std::string& text, std::filesystem::path source_dir = {}) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: malformed JSON: ") + e.what()});
  }
  return parse_config_json(root, std::move(source_dir));
}

inline ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

}  // namespace homodyne::cli
