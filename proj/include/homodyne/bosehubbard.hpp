#pragma once

// Single-site mean-field Bose-Hubbard solver and the interference flux of a
// uniform slab (left) against an optical lattice (right).
//
// Energies are in units of U; r = zJ/U. The site Hamiltonian is
//   h(psi) = -r psi (b + b^dag) + n(n-1)/2 - (mu/U) n + r psi^2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "homodyne/errors.hpp"
#include "homodyne/flux_twobec.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/quadrature.hpp"

namespace homodyne::bosehubbard {

/// Fault-injection knob for the self-check suite; zero in normal use.
namespace fault {
inline double lobe_offset = 0.0;
}  // namespace fault

struct BHParams {
  double r = 0.0;
  double mu_over_u = 0.0;
  int n_max = 8;
  double tol = 1e-10;

  void validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("BHParams: r must be >= 0");
    if (!std::isfinite(mu_over_u)) throw DomainError("BHParams: mu/U must be finite");
    if (n_max < 4) throw DomainError("BHParams: n_max must be >= 4");
    if (!(tol > 0.0)) throw DomainError("BHParams: tol must be positive");
  }
};

struct MeanFieldSolution {
  double psi = 0.0;
  double energy = 0.0;
  double mean_n = 0.0;
  int n_max = 0;
  int iterations = 0;
  bool converged = false;
};

struct SiteState {
  double energy = 0.0;
  double b = 0.0;  // <b>
  double n = 0.0;  // <n>
};

/// Ground state of the site Hamiltonian at fixed psi.
inline SiteState site_ground_state(double r, double mu, double psi, int n_max) {
  const int dim = n_max + 1;
  Eigen::VectorXd diag(dim);
  Eigen::VectorXd off(dim - 1);
  for (int n = 0; n < dim; ++n) diag[n] = 0.5 * n * (n - 1.0) - mu * n;
  for (int n = 1; n < dim; ++n) off[n - 1] = -r * psi * std::sqrt(static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  Eigen::VectorXd c = es.eigenvectors().col(0);
  if (c[0] < 0.0) c = -c;
  SiteState s;
  s.energy = es.eigenvalues()[0] + r * psi * psi;
  for (int n = 1; n < dim; ++n) s.b += std::sqrt(static_cast<double>(n)) * c[n - 1] * c[n];
  for (int n = 0; n < dim; ++n) s.n += n * c[n] * c[n];
  return s;
}

/// Self-consistent psi = <b>(psi). The Mott phase is detected from the linear
/// response at tiny psi; otherwise the fixed point is bracketed by a
/// golden-section search on the energy and polished by bisection.
inline MeanFieldSolution meanfield_solve(const BHParams& p) {
  p.validate();
  MeanFieldSolution sol;
  sol.n_max = p.n_max;
  const double mu = p.mu_over_u;
  auto finish = [&](double psi, int iters) {
    const auto st = site_ground_state(p.r, mu, psi, p.n_max);
    sol.psi = psi;
    sol.energy = st.energy;
    sol.mean_n = st.n;
    sol.iterations = iters;
    sol.converged = true;
    if (st.n > p.n_max - 1.0) throw DomainError("meanfield_solve: Fock truncation saturated (raise n_max)");
    return sol;
  };

  constexpr double kProbe = 1e-7;
  if (p.r == 0.0 || site_ground_state(p.r, mu, kProbe, p.n_max).b <= kProbe) return finish(0.0, 0);

  // golden section on the energy
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = std::sqrt(static_cast<double>(p.n_max));
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double e1 = site_ground_state(p.r, mu, x1, p.n_max).energy;
  double e2 = site_ground_state(p.r, mu, x2, p.n_max).energy;
  int iters = 0;
  while (b - a > 1e-3 && iters < 200) {
    ++iters;
    if (e1 < e2) {
      b = x2;
      x2 = x1;
      e2 = e1;
      x1 = b - phi * (b - a);
      e1 = site_ground_state(p.r, mu, x1, p.n_max).energy;
    } else {
      a = x1;
      x1 = x2;
      e1 = e2;
      x2 = a + phi * (b - a);
      e2 = site_ground_state(p.r, mu, x2, p.n_max).energy;
    }
  }

  // bisection on g(psi) = <b> - psi, positive below the fixed point
  auto g = [&](double psi) { return site_ground_state(p.r, mu, psi, p.n_max).b - psi; };
  double lo = std::max(kProbe, a - 1e-3), hi = b + 1e-3;
  while (g(lo) <= 0.0 && lo > kProbe) lo = std::max(kProbe, 0.5 * lo);
  const double top = std::sqrt(static_cast<double>(p.n_max)) + 1.0;
  while (g(hi) >= 0.0 && hi < top) hi = std::min(top, 2.0 * hi);
  if (!(g(lo) > 0.0 && g(hi) < 0.0)) {
    sol = finish(0.5 * (a + b), iters);
    sol.converged = false;
    return sol;
  }
  while (hi - lo > 0.1 * p.tol && iters < 1000) {
    ++iters;
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return finish(0.5 * (lo + hi), iters);
}

/// Second-order perturbative boundary of the n0-th Mott lobe,
/// 1/r_c = (n0 + 1)/(n0 - mu) + n0/(mu - n0 + 1).
inline double lobe_boundary(double mu_over_u, int n0) {
  if (n0 < 1) throw DomainError("lobe_boundary: n0 must be >= 1");
  if (!(mu_over_u > n0 - 1.0 && mu_over_u < n0)) throw DomainError("lobe_boundary: mu/U outside the lobe");
  const double inv = (n0 + 1.0) / (n0 - mu_over_u) + n0 / (mu_over_u - n0 + 1.0);
  return 1.0 / inv + fault::lobe_offset;
}

/// Harmonic width of one lattice well, (d0/pi)(E_R/V0)^(1/4).
inline double wannier_width(double v0_over_er, double d0) {
  if (!(v0_over_er > 1.0)) throw DomainError("wannier_width: lattice too shallow for a single band");
  if (!(d0 > 0.0)) throw DomainError("wannier_width: d0 must be positive");
  return d0 / std::numbers::pi * std::pow(v0_over_er, -0.25);
}

// ---- lattice flux -------------------------------------------------------------

/// Lattice scenario in internal units (hbar = m = 1). The separation and the
/// recoil both point along the tight x axis; the M x M lattice and the equally
/// sized uniform slab span y-z.
struct LatticeScenario {
  int m_sites = 50;
  double d0 = 1.0;
  double v0_over_er = 10.0;
  double x0 = 0.13;
  double d = 20.0;
  double q = 2.0 * std::numbers::pi;
  double Omega_minus_wq = 0.0;
  double delta_mu = 0.0;
  double phi_lr = 0.0;
  double n_left = 0.2;
  double gamma = 1.0;
  quad::QuadSpec spec{.abs_tol = 1e-12, .rel_tol = 1e-8};

  void validate() const {
    if (m_sites < 2) throw DomainError("LatticeScenario: m_sites must be >= 2");
    if (!(d0 > 0.0 && x0 > 0.0 && d > 0.0 && q > 0.0)) throw DomainError("LatticeScenario: lengths must be positive");
    if (!(n_left >= 0.0)) throw DomainError("LatticeScenario: n_left must be >= 0");
    spec.validate();
  }
  double omega_r() const { return std::numbers::pi * std::numbers::pi / (2.0 * d0 * d0); }
  double wannier() const { return wannier_width(v0_over_er, d0); }
  double slab_length() const { return m_sites * d0; }
  double total_sites() const { return static_cast<double>(m_sites) * m_sites; }
};

namespace detail {

// Lattice-sum factor sin(M x) / sin(x) with its limits at x = n pi.
inline double lattice_sum(int M, double x) {
  const double s = std::sin(x);
  if (std::abs(s) > 1e-8) return std::sin(M * x) / s;
  return M * std::cos(M * x) / std::cos(x);
}

// Product of the slab and lattice Fourier factors along one in-plane axis.
inline double transverse_product(const LatticeScenario& s, double a, double k) {
  const double L = s.slab_length();
  const double box = std::abs(k) < 1e-12 ? L : 2.0 * std::sin(0.5 * k * L) / k;
  const double wannier = std::sqrt(2.0 * a) * std::pow(std::numbers::pi, 0.25) * std::exp(-0.5 * k * k * a * a);
  return box * wannier * lattice_sum(s.m_sites, 0.5 * k * s.d0);
}

// Y(tau) = (1/2pi) int T(k) e^{i k^2 tau / 2} dk, with T even.
inline std::complex<double> transverse_propagator(const LatticeScenario& s, double tau) {
  const double a = s.wannier();
  const double K = std::sqrt(2.0 * std::log(1.0 / s.spec.envelope_eps)) / a + 2.0 * std::numbers::pi / s.d0;
  std::vector<double> bragg;
  for (double k = 2.0 * std::numbers::pi / s.d0; k < K; k += 2.0 * std::numbers::pi / s.d0) bragg.push_back(k);
  const double span = K * (0.5 * s.slab_length() + 0.5 * s.m_sites * s.d0) + 0.5 * K * K * tau;
  quad::QuadSpec spec = s.spec;
  spec.abs_tol = s.spec.rel_tol * 1e-3 * s.slab_length() * s.m_sites;
  auto r = quad::integrate_1d<std::complex<double>>(
      [&](double k) { return transverse_product(s, a, k) * std::polar(1.0, 0.5 * k * k * tau); }, 0.0, K, spec,
      {.initial_panels = quad::oscillation_panels(span, spec), .breakpoints = bragg});
  return r.value / std::numbers::pi;
}

// X(tau) = (1/2pi) int |phi~(k)|^2 e^{i k (q tau - shift) + i k^2 tau / 2} dk for a
// Gaussian ground state of width x0.
inline std::complex<double> tight_axis_propagator(double x0, double q, double shift, double tau) {
  const std::complex<double> A(x0 * x0, -0.5 * tau);
  const double u = q * tau - shift;
  const auto amp = 2.0 * x0 * std::sqrt(std::numbers::pi) * std::sqrt(std::numbers::pi / A) / (2.0 * std::numbers::pi);
  return amp * std::exp(-u * u / (4.0 * A));
}

}  // namespace detail

struct LatticeSeries {
  std::vector<double> times;
  /// F_I / (gamma M^2) per unit order parameter; multiply by psi.
  std::vector<double> unit_interference;
  bool converged = true;
};

/// Interference flux per unit psi on a strictly increasing grid, built as a
/// cumulative time integral:
///   F_I = psi sqrt(n_L) gamma Re[e^{i theta} H1(t) + e^{-i theta} H2(t)],
///   H_{1,2}(t) = int_0^t e^{-i Delta_{1,2} tau} X_{1,2}(tau) Y(tau)^2 dtau,
/// theta = delta_mu t - phi, Delta_1 = Omega - omega_q, Delta_2 = Delta_1 - delta_mu.
inline LatticeSeries lattice_unit_series(const LatticeScenario& s, const std::vector<double>& times,
                                         unsigned threads = 1) {
  s.validate();
  flux::require_increasing(times);
  const double D1 = s.Omega_minus_wq;
  const double D2 = s.Omega_minus_wq - s.delta_mu;
  using C2 = quad::FixedVector<4>;
  auto integrand = [&](double tau) {
    const auto y = detail::transverse_propagator(s, tau);
    const auto y2 = y * y;
    const auto h1 = std::polar(1.0, -D1 * tau) * detail::tight_axis_propagator(s.x0, s.q, s.d, tau) * y2;
    const auto h2 = std::polar(1.0, -D2 * tau) * detail::tight_axis_propagator(s.x0, s.q, -s.d, tau) * y2;
    C2 v;
    v[0] = h1.real();
    v[1] = h1.imag();
    v[2] = h2.real();
    v[3] = h2.imag();
    return v;
  };
  const double scale = std::sqrt(s.n_left) * s.gamma / s.total_sites();
  quad::QuadSpec spec = s.spec;
  spec.abs_tol = std::max(s.spec.abs_tol, 1e-9 * s.total_sites());

  const std::size_t n = times.size();
  std::vector<C2> pieces(n);
  std::vector<char> ok(n, 1);
  parallel_for(n, threads, [&](std::size_t i) {
    const double lo = i == 0 ? 0.0 : times[i - 1];
    const double hi = times[i];
    const double span = (std::abs(D1) + std::abs(D2) + s.q * s.q) * (hi - lo);
    auto r = quad::integrate_1d<C2>(integrand, lo, hi, spec, {.initial_panels = quad::oscillation_panels(span, spec)});
    pieces[i] = r.value;
    ok[i] = r.converged;
  });

  LatticeSeries out;
  out.times = times;
  C2 acc;
  for (std::size_t i = 0; i < n; ++i) {
    acc += pieces[i];
    const std::complex<double> H1(acc[0], acc[1]), H2(acc[2], acc[3]);
    const double theta = s.delta_mu * times[i] - s.phi_lr;
    const double f = (std::polar(1.0, theta) * H1 + std::polar(1.0, -theta) * H2).real();
    out.unit_interference.push_back(scale * f);
    out.converged = out.converged && ok[i];
  }
  return out;
}

/// F_I / (gamma M^2) at a single time for a given mean-field solution.
inline double lattice_interference_flux(const LatticeScenario& s, const MeanFieldSolution& sol, double t) {
  if (!sol.converged) throw DomainError("lattice_interference_flux: mean-field solution not converged");
  if (sol.psi == 0.0) return 0.0;
  return sol.psi * lattice_unit_series(s, {t}).unit_interference[0];
}

struct AmplitudePoint {
  double r = 0.0;
  double psi = 0.0;
  double C = 0.0;
};

/// C(r) = max F_I - min F_I over t >= t_min on `times`. F_I is linear in psi,
/// so the time series is computed once per unit psi and rescaled per r.
inline std::vector<AmplitudePoint> amplitude_vs_r(const LatticeScenario& s, const std::vector<double>& r_grid,
                                                  double mu_over_u, const std::vector<double>& times, double t_min,
                                                  unsigned threads = 1, int n_max = 8) {
  const auto unit = lattice_unit_series(s, times, threads);
  const double c_unit =
      flux::amplitude_C(unit.times, unit.unit_interference, t_min, 2.0 * std::numbers::pi / s.delta_mu);
  std::vector<AmplitudePoint> out(r_grid.size());
  parallel_for(r_grid.size(), threads, [&](std::size_t i) {
    const auto sol = meanfield_solve({r_grid[i], mu_over_u, n_max, 1e-10});
    out[i] = {r_grid[i], sol.psi, sol.psi * c_unit};
  });
  return out;
}

}  // namespace homodyne::bosehubbard
