#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical paths, so agreement is evidence rather than tautology.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace decaycoh::oracle {

// J0 by its power series in long double.
inline double j0_series(double x) {
  const long double q = -0.25L * x * x;
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m < 400; ++m) {
    term *= q / (static_cast<long double>(m) * m);
    sum += term;
    if (std::fabs(term) < 1e-24L) break;
  }
  return static_cast<double>(sum);
}

// J0(x) = (1 / 2 pi) int_0^{2 pi} cos(x sin t) dt by the trapezoid rule,
// which converges geometrically for periodic integrands.
inline double j0_integral(double x, int n = 1024) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += std::cos(x * std::sin(2.0 * std::numbers::pi * i / n));
  }
  return sum / n;
}

// Direct O(N^2) DFT, bins 0..n/2.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x, std::size_t n) {
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k * i % n) / n;
      acc += x[i] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

// Textbook Welch coherence of one channel pair with periodic Hann window:
// E[conj(X1) X2] / sqrt(E|X1|^2 E|X2|^2).
inline std::vector<std::complex<double>> welch_coherence(std::span<const double> x1,
                                                         std::span<const double> x2,
                                                         std::size_t window, std::size_t hop,
                                                         std::size_t dft) {
  std::vector<double> w(window);
  for (std::size_t i = 0; i < window; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window);
  }
  const std::size_t bins = dft / 2 + 1;
  std::vector<double> p11(bins), p22(bins);
  std::vector<std::complex<double>> p12(bins);
  for (std::size_t start = 0; start + window <= x1.size(); start += hop) {
    std::vector<double> f1(window), f2(window);
    for (std::size_t i = 0; i < window; ++i) {
      f1[i] = x1[start + i] * w[i];
      f2[i] = x2[start + i] * w[i];
    }
    const auto s1 = naive_dft(f1, dft);
    const auto s2 = naive_dft(f2, dft);
    for (std::size_t k = 0; k < bins; ++k) {
      p11[k] += std::norm(s1[k]);
      p22[k] += std::norm(s2[k]);
      p12[k] += std::conj(s1[k]) * s2[k];
    }
  }
  std::vector<std::complex<double>> out(bins);
  for (std::size_t k = 0; k < bins; ++k) out[k] = p12[k] / std::sqrt(p11[k] * p22[k]);
  return out;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace decaycoh::oracle
