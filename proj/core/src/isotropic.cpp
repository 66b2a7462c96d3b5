#include "decaycoh/isotropic.hpp"

#include <cmath>
#include <numbers>

#include "decaycoh/errors.hpp"

namespace decaycoh {
namespace {

void require_finite(double x) {
  if (!std::isfinite(x)) throw ValidationError("special function argument must be finite");
}

void require_nonnegative(double k, double d) {
  require_finite(k);
  require_finite(d);
  if (k < 0.0) throw ValidationError("wavenumber must be >= 0");
  if (d < 0.0) throw ValidationError("sensor spacing must be >= 0");
}

// sum_m (-x^2/4)^m / (m!)^2. Largest term at x = 8 is ~1e2, so cancellation
// costs about two digits.
double j0_power_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m));
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

// Miller's backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalized with
// J_0 + 2 sum_k J_{2k} = 1. Stable for every x; used between the power series
// and the asymptotic expansion where neither is accurate enough.
double j0_backward_recurrence(double x) {
  const int start = 2 * ((static_cast<int>(x) + 40) / 2);
  double j_next = 0.0;  // J_{n+1}
  double j_curr = 1e-300;  // J_n, arbitrary scale
  double even_sum = 0.0;
  for (int n = start; n > 0; --n) {
    const double j_prev = (2.0 * n / x) * j_curr - j_next;
    j_next = j_curr;
    j_curr = j_prev;
    if ((n - 1) % 2 == 0 && n - 1 > 0) even_sum += j_curr;
    if (std::abs(j_curr) > 1e250) {
      j_curr *= 1e-250;
      j_next *= 1e-250;
      even_sum *= 1e-250;
    }
  }
  return j_curr / (j_curr + 2.0 * even_sum);
}

// Hankel expansion J0(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),
// chi = x - pi/4. Terms are summed until they stop shrinking.
double j0_asymptotic(double x) {
  double p = 0.0;
  double q = 0.0;
  double term = 1.0;  // a_k / x^k
  double previous = INFINITY;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      term *= -(odd * odd) / (8.0 * k * x);
    }
    const double magnitude = std::abs(term);
    if (magnitude > previous) break;
    previous = magnitude;
    // Signs of P and Q alternate every second order.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (magnitude < 1e-18) break;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double cos_chi = (c + s) * std::numbers::sqrt2 * 0.5;
  const double sin_chi = (s - c) * std::numbers::sqrt2 * 0.5;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cos_chi - q * sin_chi);
}

}  // namespace

double sinc_unnormalized(double x) {
  require_finite(x);
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double bessel_j0(double x) {
  require_finite(x);
  const double ax = std::abs(x);
  if (ax <= 8.0) return j0_power_series(ax);
  if (ax <= 25.0) return j0_backward_recurrence(ax);
  return j0_asymptotic(ax);
}

double spherical_coherence(double k, double d) {
  require_nonnegative(k, d);
  return sinc_unnormalized(k * d);
}

double cylindrical_coherence(double k, double d) {
  require_nonnegative(k, d);
  return bessel_j0(k * d);
}

}  // namespace decaycoh
