#pragma once

// Reading out G1(r, r') with two Gaussian illumination spots at +d/2 and -d/2.
//
// With a pulse that is long against the carrier period and short against the
// excitation dynamics, G1 is frozen at t = 0 and the outcoupling propagator is
// taken as uniform across the spot pair, so the flux becomes
//   F = t sum_{j,k} Re int int gamma_j(r) gamma_k(r') e^{i q.(r - r')} G1(r, r') d^3r d^3r'.
// The j = k part is the background K; (F - K) / K is the visibility.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "homodyne/condensate.hpp"
#include "homodyne/errors.hpp"
#include "homodyne/quadrature.hpp"

namespace homodyne::correlation {

using condensate::Vec3;
using cplx = std::complex<double>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct ExcitationSpec {
  Vec3 d{};
  double delta_r = 0.0;
  Vec3 q{};
  double pulse_t = 1.0;
  double omega_tilde = 0.0;
  double omega_alpha = 0.0;

  void validate() const {
    if (!(delta_r > 0.0)) throw DomainError("ExcitationSpec: delta_r must be positive");
    if (!(norm(d) > 0.0)) throw DomainError("ExcitationSpec: spot separation must be nonzero");
    if (!(pulse_t > 0.0)) throw DomainError("ExcitationSpec: pulse_t must be positive");
  }
  /// Spots much smaller than their separation.
  bool localized() const { return delta_r <= norm(d) / 5.0; }
};

struct RegimeCheck {
  bool ok = true;
  std::string reason;
};

/// ok iff omega_tilde t >= 10 and omega_alpha t <= 0.1.
inline RegimeCheck pulse_regime_check(const ExcitationSpec& e) {
  RegimeCheck r;
  if (e.omega_tilde * e.pulse_t < 10.0) {
    r.ok = false;
    r.reason = "carrier not resolved: omega_tilde t < 10";
  }
  if (e.omega_alpha * e.pulse_t > 0.1) {
    r.ok = false;
    if (!r.reason.empty()) r.reason += "; ";
    r.reason += "correlations not static: omega_alpha t > 0.1";
  }
  return r;
}

// ---- models -----------------------------------------------------------------

/// Pure condensate: G1 = f(r) f(r'). Without a profile the amplitude is uniform.
struct PureCondensate {
  double uniform_density = 1.0;
  std::optional<condensate::TFProfile> profile;

  double amplitude(const Vec3& r) const {
    return profile ? condensate::amplitude(*profile, r) : std::sqrt(uniform_density);
  }
};

/// Gaussian thermal coherence n exp(-pi |r - r'|^2 / lambda^2).
struct ThermalGaussian {
  double density = 1.0;
  double lambda = 1.0;
};

/// G1 tabulated on a square grid along one axis. Values are bilinearly interpolated.
struct Tabulated {
  Vec3 axis{1.0, 0.0, 0.0};
  std::vector<double> grid;  // strictly increasing
  std::vector<cplx> values;  // row-major: values[i * n + j] = G1(grid[i], grid[j])

  std::size_t n() const { return grid.size(); }

  void validate() const {
    if (grid.size() < 2) throw DomainError("Tabulated G1: need at least two grid points");
    if (values.size() != grid.size() * grid.size()) throw DomainError("Tabulated G1: grid is not square");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1])) throw DomainError("Tabulated G1: grid must be strictly increasing");
    }
    double scale = 0.0;
    for (const auto& v : values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n(); ++i) {
      if (values[i * n() + i].real() < -1e-12 * scale || std::abs(values[i * n() + i].imag()) > 1e-12 * scale) {
        throw DomainError("Tabulated G1: diagonal must be real and non-negative");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(values[i * n() + j] - std::conj(values[j * n() + i])) > 1e-12 * scale) {
          throw DomainError("Tabulated G1: table is not Hermitian");
        }
      }
    }
  }

  cplx at(double x, double xp) const {
    const double lo = grid.front(), hi = grid.back();
    if (x < lo || x > hi || xp < lo || xp > hi) throw DomainError("Tabulated G1: position outside the table");
    auto locate = [&](double v) {
      auto it = std::upper_bound(grid.begin(), grid.end(), v);
      std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - grid.begin())) - 1;
      i = std::min(i, grid.size() - 2);
      return std::pair{i, (v - grid[i]) / (grid[i + 1] - grid[i])};
    };
    const auto [i, fx] = locate(x);
    const auto [j, fy] = locate(xp);
    const auto v = [&](std::size_t a, std::size_t b) { return values[a * n() + b]; };
    return (1.0 - fx) * ((1.0 - fy) * v(i, j) + fy * v(i, j + 1)) + fx * ((1.0 - fy) * v(i + 1, j) + fy * v(i + 1, j + 1));
  }
};

using G1Model = std::variant<PureCondensate, ThermalGaussian, Tabulated>;

/// Read a tabulated model from CSV with header x,x_prime,re,im. Rows may come in
/// any order but must fill a square grid.
inline Tabulated load_tabulated(std::istream& in, const Vec3& axis) {
  std::string line;
  std::vector<std::array<double, 4>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.find("x_prime") != std::string::npos) continue;
    }
    std::array<double, 4> r{};
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(ss, cell, ',')) throw DomainError("Tabulated G1: expected 4 columns: " + line);
      r[c] = std::stod(cell);
    }
    rows.push_back(r);
  }
  Tabulated t;
  const double len = norm(axis);
  if (!(len > 0.0)) throw DomainError("Tabulated G1: axis must be nonzero");
  t.axis = {axis[0] / len, axis[1] / len, axis[2] / len};
  for (const auto& r : rows) t.grid.push_back(r[0]);
  std::sort(t.grid.begin(), t.grid.end());
  t.grid.erase(std::unique(t.grid.begin(), t.grid.end()), t.grid.end());
  const std::size_t n = t.grid.size();
  if (rows.size() != n * n) throw DomainError("Tabulated G1: rows do not form a square grid");
  t.values.assign(n * n, cplx{NAN, NAN});
  auto index = [&](double v) {
    auto it = std::lower_bound(t.grid.begin(), t.grid.end(), v);
    if (it == t.grid.end() || *it != v) throw DomainError("Tabulated G1: x_prime value not on the x grid");
    return static_cast<std::size_t>(it - t.grid.begin());
  };
  for (const auto& r : rows) t.values[index(r[0]) * n + index(r[1])] = {r[2], r[3]};
  for (const auto& v : t.values) {
    if (std::isnan(v.real())) throw DomainError("Tabulated G1: duplicate or missing grid entry");
  }
  t.validate();
  return t;
}

inline Tabulated load_tabulated(const std::string& path, const Vec3& axis) {
  std::ifstream in(path);
  if (!in) throw DomainError("Tabulated G1: cannot open " + path);
  return load_tabulated(in, axis);
}

inline cplx g1_eval(const G1Model& model, const Vec3& r, const Vec3& rp) {
  return std::visit(
      [&](const auto& m) -> cplx {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PureCondensate>) {
          return m.amplitude(r) * m.amplitude(rp);
        } else if constexpr (std::is_same_v<M, ThermalGaussian>) {
          const Vec3 s{r[0] - rp[0], r[1] - rp[1], r[2] - rp[2]};
          return m.density * std::exp(-std::numbers::pi * dot(s, s) / (m.lambda * m.lambda));
        } else {
          return m.at(dot(r, m.axis), dot(rp, m.axis));
        }
      },
      model);
}

/// Re{e^{i q.d} G1(d/2, -d/2)} / n(d/2).
inline double visibility_delta_limit(const ExcitationSpec& e, const G1Model& model) {
  e.validate();
  const Vec3 half{0.5 * e.d[0], 0.5 * e.d[1], 0.5 * e.d[2]};
  const Vec3 mhalf{-half[0], -half[1], -half[2]};
  const double n0 = g1_eval(model, half, half).real();
  if (!(n0 > 0.0)) throw DomainError("visibility_delta_limit: zero density at the spot");
  return (std::polar(1.0, dot(e.q, e.d)) * g1_eval(model, half, mhalf)).real() / n0;
}

// ---- finite-spot flux -----------------------------------------------------------

struct CorrelationFlux {
  double total = 0.0;
  double background = 0.0;  // K, the j = k terms
  bool converged = true;
  RegimeCheck regime;

  double cross() const { return total - background; }
  double visibility() const { return cross() / background; }
};

namespace detail {

// Unit-L2 Gaussian of width a along one axis, centred at c.
inline double gauss1(double x, double c, double a) {
  const double u = (x - c) / a;
  return std::exp(-0.5 * u * u) / std::sqrt(a * std::sqrt(std::numbers::pi));
}

inline constexpr double kReach = 7.0;

// int int g(x - cj) g(x' - ck) e^{i q (x - x')} c(x - x') dx dx' along one axis.
template <class Corr>
cplx axis_pair(double cj, double ck, double a, double q, Corr&& corr, const quad::QuadSpec& spec, bool& ok) {
  const double w = kReach * a;
  auto r = quad::integrate_nd<cplx>(
      [&](const std::array<double, 2>& x) {
        return gauss1(x[0], cj, a) * gauss1(x[1], ck, a) * std::polar(1.0, q * (x[0] - x[1])) * corr(x[0], x[1]);
      },
      quad::Box<2>{{{cj - w, cj + w}, {ck - w, ck + w}}}, spec,
      {quad::oscillation_panels(2.0 * w * std::abs(q), spec), quad::oscillation_panels(2.0 * w * std::abs(q), spec)});
  ok = ok && r.converged;
  return r.value;
}

// int gamma(r - c) e^{i q.r} f(r) d^3r for a pure condensate.
inline cplx spot_amplitude(const PureCondensate& m, const Vec3& c, double a, const Vec3& q, const quad::QuadSpec& spec,
                           bool& ok) {
  const double w = kReach * a;
  if (!m.profile) {
    // uniform amplitude: the Gaussian integral is analytic per axis
    double mag = std::sqrt(m.uniform_density);
    for (int i = 0; i < 3; ++i) mag *= std::sqrt(2.0 * a * std::sqrt(std::numbers::pi)) * std::exp(-0.5 * q[i] * q[i] * a * a);
    return std::polar(mag, dot(q, c));
  }
  std::array<std::size_t, 3> panels{};
  for (int i = 0; i < 3; ++i) panels[i] = quad::oscillation_panels(2.0 * w * std::abs(q[i]), spec);
  auto r = quad::integrate_nd<cplx>(
      [&](const std::array<double, 3>& x) {
        const Vec3 p{x[0], x[1], x[2]};
        const double g = gauss1(x[0], c[0], a) * gauss1(x[1], c[1], a) * gauss1(x[2], c[2], a);
        return g * m.amplitude(p) * std::polar(1.0, dot(q, p));
      },
      quad::Box<3>{{{c[0] - w, c[0] + w}, {c[1] - w, c[1] + w}, {c[2] - w, c[2] + w}}}, spec, panels);
  ok = ok && r.converged;
  return r.value;
}

}  // namespace detail

/// Two-spot flux with the static-G1, uniform-propagator kernel. The result is in
/// arbitrary units (proportional to the pulse time); only ratios are meaningful.
inline CorrelationFlux flux_correlation_exact(const ExcitationSpec& e, const G1Model& model,
                                              const quad::QuadSpec& spec = {.abs_tol = 1e-12, .rel_tol = 1e-8}) {
  e.validate();
  CorrelationFlux out;
  out.regime = pulse_regime_check(e);
  const Vec3 cL{0.5 * e.d[0], 0.5 * e.d[1], 0.5 * e.d[2]};
  const Vec3 cR{-cL[0], -cL[1], -cL[2]};
  const double a = e.delta_r;
  bool ok = true;
  cplx f[2][2];  // f[j][k]

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PureCondensate>) {
          const cplx A[2] = {detail::spot_amplitude(m, cL, a, e.q, spec, ok), detail::spot_amplitude(m, cR, a, e.q, spec, ok)};
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) f[j][k] = A[j] * std::conj(A[k]);
        } else if constexpr (std::is_same_v<M, ThermalGaussian>) {
          const Vec3* c[2] = {&cL, &cR};
          auto corr = [&](double x, double xp) {
            return std::exp(-std::numbers::pi * (x - xp) * (x - xp) / (m.lambda * m.lambda));
          };
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
              cplx prod = m.density;
              for (int i = 0; i < 3; ++i) prod *= detail::axis_pair((*c[j])[i], (*c[k])[i], a, e.q[i], corr, spec, ok);
              f[j][k] = prod;
            }
        } else {
          // only the component along the table axis matters: the transverse
          // factors are common to all four terms and cancel in the visibility
          const double cj[2] = {dot(cL, m.axis), dot(cR, m.axis)};
          const double qa = dot(e.q, m.axis);
          auto corr = [&](double x, double xp) { return m.at(x, xp); };
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) f[j][k] = detail::axis_pair(cj[j], cj[k], a, qa, corr, spec, ok);
        }
      },
      model);

  out.background = e.pulse_t * (f[0][0].real() + f[1][1].real());
  out.total = out.background + e.pulse_t * (f[0][1].real() + f[1][0].real());
  out.converged = ok;
  return out;
}

}  // namespace homodyne::correlation
