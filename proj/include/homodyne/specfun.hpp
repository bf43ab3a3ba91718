#pragma once

// Special functions used by the flux integrals: integer-order Bessel functions
// J0, J1, J2, the finite-time diffraction kernel and the Gaussian kernel K(x).

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "homodyne/errors.hpp"

namespace homodyne::specfun {

/// Fault-injection knobs for the self-check suite. Both are zero in normal use.
namespace fault {
inline double j2_offset = 0.0;
}  // namespace fault

namespace detail {

inline void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(who) + ": non-finite argument");
  }
}

// Power series sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!), valid for small |x|.
inline double series_jn(int n, double x) {
  const double half = 0.5 * x;
  const double h2 = half * half;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Hankel asymptotic expansion for J_n(x), x > 0 large.
inline double asymptotic_jn(int n, double x) {
  const double mu = 4.0 * n * n;
  const double inv8x = 1.0 / (8.0 * x);
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev_abs = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) * inv8x / k;
    if (std::abs(term) > prev_abs) break;  // series started diverging
    prev_abs = std::abs(term);
    // terms alternate between Q (odd k) and P (even k) with sign (-1)^floor(k/2)
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      q += sign * term;
    } else {
      p += sign * term;
    }
    if (std::abs(term) < 1e-18) break;
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

struct J01 {
  double j0;
  double j1;
};

// Miller backward recurrence normalised by J0 + 2 sum J_2k = 1.
inline J01 miller_j01(double x) {
  const int start = 2 * (static_cast<int>(x + 30.0 + 10.0 * std::cbrt(x)) / 2 + 1);
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k
  double norm = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
    if (k - 1 == 1) j1 = cur;
    if (k - 1 >= 2 && (k - 1) % 2 == 0) norm += 2.0 * cur;
  }
  j0 = cur;
  norm += j0;
  return {j0 / norm, j1 / norm};
}

inline constexpr double kSeriesCutoff = 8.0;
inline constexpr double kAsymptoticCutoff = 25.0;

}  // namespace detail

/// Bessel function of the first kind, order 0.
inline double bessel_j0(double x) {
  detail::require_finite(x, "bessel_j0");
  const double ax = std::abs(x);
  if (ax < detail::kSeriesCutoff) return detail::series_jn(0, ax);
  if (ax < detail::kAsymptoticCutoff) return detail::miller_j01(ax).j0;
  return detail::asymptotic_jn(0, ax);
}

/// Bessel function of the first kind, order 1 (odd).
inline double bessel_j1(double x) {
  detail::require_finite(x, "bessel_j1");
  const double ax = std::abs(x);
  double v;
  if (ax < detail::kSeriesCutoff) {
    v = detail::series_jn(1, ax);
  } else if (ax < detail::kAsymptoticCutoff) {
    v = detail::miller_j01(ax).j1;
  } else {
    v = detail::asymptotic_jn(1, ax);
  }
  return x < 0 ? -v : v;
}

/// Bessel function of the first kind, order 2 (even). Absolute error below 1e-12
/// for |x| <= 200.
inline double bessel_j2(double x) {
  detail::require_finite(x, "bessel_j2");
  const double ax = std::abs(x);
  double v;
  if (ax < detail::kSeriesCutoff) {
    v = detail::series_jn(2, ax);
  } else if (ax < detail::kAsymptoticCutoff) {
    const auto [j0, j1] = detail::miller_j01(ax);
    v = 2.0 * j1 / ax - j0;
  } else {
    v = detail::asymptotic_jn(2, ax);
  }
  return v + fault::j2_offset;
}

/// Diffraction function sin(omega t / 2) / (pi omega); tends to a Dirac delta as t grows.
inline double diffraction(double omega, double t) {
  if (!(t > 0.0)) throw DomainError("diffraction: t must be positive");
  const double wt = omega * t;
  if (std::abs(wt) < 1e-4) {
    return t / (2.0 * std::numbers::pi) * (1.0 - wt * wt / 24.0);
  }
  return std::sin(0.5 * wt) / (std::numbers::pi * omega);
}

/// exp(-i omega t / 2) times the diffraction function.
inline std::complex<double> diffraction_phased(double omega, double t) {
  const double mag = diffraction(omega, t);
  const double half = 0.5 * omega * t;
  return {mag * std::cos(half), -mag * std::sin(half)};
}

/// Gaussian kernel K(x) = sqrt(t0^2 / (5 pi)) exp(-t0^2 x^2 / 5), unit normalised,
/// variance 2.5 / t0^2.
inline double gaussian_kernel(double x, double t0) {
  if (!(t0 > 0.0)) throw DomainError("gaussian_kernel: t0 must be positive");
  return t0 / std::sqrt(5.0 * std::numbers::pi) * std::exp(-t0 * t0 * x * x / 5.0);
}

}  // namespace homodyne::specfun
