#pragma once

// Deterministic adaptive Gauss-Kronrod quadrature in 1 to 3 dimensions.
//
// The 1D engine keeps a list of panels, bisects the panel with the largest
// local error until the global tolerance is met, and sums the panels in
// left-to-right order. Nothing depends on scheduling, so identical inputs give
// bit-identical results.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace homodyne::quad {

struct QuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_subdivisions = 4000;
  int min_nodes_per_oscillation = 8;
  /// Envelope threshold (relative to the peak) used to truncate infinite k-domains.
  double envelope_eps = 1e-6;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw std::invalid_argument("QuadSpec: tolerances must be positive");
    }
    if (min_nodes_per_oscillation < 4) {
      throw std::invalid_argument("QuadSpec: min_nodes_per_oscillation must be >= 4");
    }
    if (max_subdivisions < 1) {
      throw std::invalid_argument("QuadSpec: max_subdivisions must be >= 1");
    }
  }
};

template <class T>
struct QuadResult {
  T value{};
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Small fixed-size vector so several integrals can share one set of nodes.
template <std::size_t N>
struct FixedVector {
  std::array<double, N> v{};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  FixedVector& operator+=(const FixedVector& o) {
    for (std::size_t i = 0; i < N; ++i) v[i] += o.v[i];
    return *this;
  }
  friend FixedVector operator+(FixedVector a, const FixedVector& b) { return a += b; }
  friend FixedVector operator-(FixedVector a, const FixedVector& b) {
    for (std::size_t i = 0; i < N; ++i) a.v[i] -= b.v[i];
    return a;
  }
  friend FixedVector operator*(double s, FixedVector a) {
    for (auto& x : a.v) x *= s;
    return a;
  }
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }
template <std::size_t N>
double magnitude(const FixedVector<N>& x) {
  double s = 0.0;
  for (double e : x.v) s += std::abs(e);
  return s;
}

/// Number of nodes needed to resolve a phase excursion of `phase_span` radians.
inline std::size_t oscillation_nodes(double phase_span, const QuadSpec& spec) {
  if (!(phase_span >= 0.0)) throw std::invalid_argument("oscillation_nodes: negative phase span");
  const auto per = static_cast<std::size_t>(spec.min_nodes_per_oscillation);
  const auto periods = static_cast<std::size_t>(std::ceil(phase_span / (2.0 * std::numbers::pi) - 1e-12));
  return std::max(per, periods * per);
}

/// Panels of 15 Kronrod nodes needed to seed an integration spanning `phase_span` radians.
inline std::size_t oscillation_panels(double phase_span, const QuadSpec& spec) {
  const std::size_t nodes = oscillation_nodes(phase_span, spec);
  return std::max<std::size_t>(1, (nodes + 14) / 15);
}

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double err;
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kron = kWgk[7] * fc;
  T gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    const T s = f1 + f2;
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kron = half * kron;
  gauss = half * gauss;
  const double err = magnitude(kron - gauss);
  return {a, b, kron, err};
}

template <class T>
struct PanelOrder {
  bool operator()(const Panel<T>& x, const Panel<T>& y) const {
    if (x.err != y.err) return x.err < y.err;
    return x.a > y.a;  // deterministic tie-break
  }
};

}  // namespace detail

/// Extra structure to seed the 1D panel list with.
struct Seeding {
  std::size_t initial_panels = 1;
  /// Interior points where the integrand has kinks or sharp features.
  std::span<const double> breakpoints{};
};

/// Adaptive Gauss-Kronrod integration of f over [a, b]. T may be double,
/// std::complex<double> or FixedVector<N>. Non-convergence is reported through
/// QuadResult::converged; the best estimate is still returned.
template <class T = double, class F>
QuadResult<T> integrate_1d(F&& f, double a, double b, const QuadSpec& spec, const Seeding& seed = {}) {
  spec.validate();
  if (!(a < b)) {
    if (a == b) return {T{}, 0.0, 0, true};
    throw std::invalid_argument("integrate_1d: require a < b");
  }

  std::vector<double> cuts{a};
  for (double p : seed.breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double width = b - a;
  std::priority_queue<detail::Panel<T>, std::vector<detail::Panel<T>>, detail::PanelOrder<T>> heap;
  std::size_t panels = 0;
  std::size_t rules = 0;
  double total_err = 0.0;
  T total{};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s];
    const double hi = cuts[s + 1];
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(seed.initial_panels) * (hi - lo) / width)));
    for (std::size_t i = 0; i < n; ++i) {
      const double pa = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
      const double pb = (i + 1 == n) ? hi : lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(n);
      auto p = detail::gk15<T>(f, pa, pb);
      total_err += p.err;
      total += p.value;
      heap.push(std::move(p));
      ++panels;
      ++rules;
    }
  }

  const auto tolerance = [&](const T& v) { return std::max(spec.abs_tol, spec.rel_tol * magnitude(v)); };
  const std::size_t limit = std::max(spec.max_subdivisions, panels);
  while (total_err > tolerance(total) && panels < limit) {
    detail::Panel<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total_err += left.err + right.err - worst.err;
    total += (left.value + right.value) - worst.value;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++panels;
    rules += 2;
  }

  // Re-sum in a fixed left-to-right order.
  std::vector<detail::Panel<T>> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  QuadResult<T> out;
  double err = 0.0;
  for (const auto& p : all) {
    out.value += p.value;
    err += p.err;
  }
  out.err_estimate = err;
  out.evaluations = 15 * rules;
  out.converged = err <= tolerance(out.value);
  return out;
}

/// Axis-aligned integration box.
template <std::size_t N>
using Box = std::array<std::pair<double, double>, N>;

/// Nested adaptive integration over an N-dimensional box (N = 2 or 3).
/// f takes std::array<double, N>. The outer axis is axis 0.
template <class T = double, std::size_t N, class F>
QuadResult<T> integrate_nd(F&& f, const Box<N>& box, const QuadSpec& spec,
                           const std::array<std::size_t, N>& initial_panels = {}) {
  static_assert(N == 2 || N == 3, "integrate_nd supports 2 or 3 dimensions");
  spec.validate();
  for (const auto& [lo, hi] : box) {
    if (!(lo < hi)) throw std::invalid_argument("integrate_nd: each axis needs lo < hi");
  }

  std::size_t evaluations = 0;
  bool converged = true;
  double inner_err = 0.0;

  // Inner levels get a tighter absolute tolerance so their errors do not
  // dominate the outer estimate.
  auto inner_spec = [&](std::size_t axis) {
    QuadSpec s = spec;
    double width = 1.0;
    for (std::size_t i = 0; i < axis; ++i) width *= box[i].second - box[i].first;
    s.abs_tol = spec.abs_tol / (10.0 * width);
    s.rel_tol = spec.rel_tol / 10.0;
    return s;
  };
  auto seeding = [&](std::size_t axis) {
    Seeding sd;
    sd.initial_panels = std::max<std::size_t>(1, initial_panels[axis]);
    return sd;
  };

  std::array<double, N> x{};
  if constexpr (N == 2) {
    const QuadSpec s1 = inner_spec(1);
    auto outer = [&](double x0) {
      x[0] = x0;
      auto r = integrate_1d<T>(
          [&](double x1) {
            x[1] = x1;
            return static_cast<T>(f(x));
          },
          box[1].first, box[1].second, s1, seeding(1));
      evaluations += r.evaluations;
      converged = converged && r.converged;
      inner_err = std::max(inner_err, r.err_estimate);
      return r.value;
    };
    auto r = integrate_1d<T>(outer, box[0].first, box[0].second, spec, seeding(0));
    r.evaluations = evaluations;
    r.err_estimate += inner_err * (box[0].second - box[0].first);
    r.converged = r.converged && converged &&
                  r.err_estimate <= std::max(spec.abs_tol, spec.rel_tol * magnitude(r.value));
    return r;
  } else {
    const QuadSpec s1 = inner_spec(1);
    const QuadSpec s2 = inner_spec(2);
    auto outer = [&](double x0) {
      x[0] = x0;
      auto mid = integrate_1d<T>(
          [&](double x1) {
            x[1] = x1;
            auto r = integrate_1d<T>(
                [&](double x2) {
                  x[2] = x2;
                  return static_cast<T>(f(x));
                },
                box[2].first, box[2].second, s2, seeding(2));
            evaluations += r.evaluations;
            converged = converged && r.converged;
            inner_err = std::max(inner_err, r.err_estimate * (box[1].second - box[1].first));
            return r.value;
          },
          box[1].first, box[1].second, s1, seeding(1));
      converged = converged && mid.converged;
      inner_err = std::max(inner_err, mid.err_estimate);
      return mid.value;
    };
    auto r = integrate_1d<T>(outer, box[0].first, box[0].second, spec, seeding(0));
    r.evaluations = evaluations;
    r.err_estimate += inner_err * (box[0].second - box[0].first);
    r.converged = r.converged && converged &&
                  r.err_estimate <= std::max(spec.abs_tol, spec.rel_tol * magnitude(r.value));
    return r;
  }
}

}  // namespace homodyne::quad
