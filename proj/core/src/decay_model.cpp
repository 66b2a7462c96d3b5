#include "decaycoh/decay_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "adaptive_cubature.hpp"
#include "decaycoh/errors.hpp"

namespace decaycoh {
namespace {

using detail::Moments;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegenerateDenominator = 1e-300;

struct Vec3 {
  double x, y, z;
};

Vec3 axis_of(const MicPairSpec& mic) {
  const auto v = Direction{mic.theta_mic, mic.phi_mic}.unit_vector();
  return {v.x, v.y, v.z};
}

// Decay rates g_i = 2 t c |ln r_i| / l_i, so that A(n) = exp(-sum g_i |n_i|).
// A zero coefficient is flagged separately because its rate is infinite.
struct DecayRates {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  std::array<bool, 3> absorbing{false, false, false};

  int absorbing_count() const {
    return static_cast<int>(std::count(absorbing.begin(), absorbing.end(), true));
  }
};

DecayRates decay_rates(const RoomSpec& room, double t) {
  DecayRates rates;
  if (t == 0.0) return rates;
  const std::array<double, 3> r{room.rx, room.ry, room.rz};
  const std::array<double, 3> l{room.lx, room.ly, room.lz};
  for (int i = 0; i < 3; ++i) {
    if (r[i] == 0.0) {
      rates.absorbing[i] = true;
    } else {
      rates.g[i] = -2.0 * t * room.c * std::log(r[i]) / l[i];
    }
  }
  return rates;
}

void validate_inputs(double k, double t, const RoomSpec& room) {
  validate_room(room);
  if (!std::isfinite(k) || k < 0.0) throw ValidationError("wavenumber must be finite and >= 0");
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("time must be finite and >= 0");
}

// Breakpoints on [lo, hi] containing `kinks` and, when the weight is sharply
// peaked (rate g_max), a geometric ladder kink +- 4^j / g_max on each side so
// that boundary layers of width ~1/g_max are seen by the first panels.
std::vector<double> graded_breaks(std::span<const double> kinks, double lo, double hi,
                                  double g_max, double coarsest) {
  std::vector<double> breaks(kinks.begin(), kinks.end());
  if (g_max > 4.0) {
    for (double kink : kinks) {
      for (double h = 1.0 / g_max; h < coarsest; h *= 4.0) {
        if (kink - h > lo) breaks.push_back(kink - h);
        if (kink + h < hi) breaks.push_back(kink + h);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

// Integrand on the full sphere in (theta, phi), including the sin(theta)
// area element. The weight is shifted by exp(g_min), the largest value of
// A on the sphere, so peaked weights cannot underflow as a whole.
struct SphereKernel {
  std::array<double, 3> g;
  double shift;
  Vec3 m;
  double kd;

  struct AxisA {
    double cos_t, sin_t;
  };
  struct AxisB {
    double cos_p, sin_p;
  };
  AxisA prepare_a(double theta) const { return {std::cos(theta), std::sin(theta)}; }
  AxisB prepare_b(double phi) const { return {std::cos(phi), std::sin(phi)}; }

  Moments operator()(const AxisA& a, const AxisB& b) const {
    const double nx = a.cos_t;
    const double ny = a.sin_t * b.cos_p;
    const double nz = a.sin_t * b.sin_p;
    const double exponent =
        shift - (g[0] * std::abs(nx) + g[1] * std::abs(ny) + g[2] * std::abs(nz));
    const double w = std::exp(exponent) * a.sin_t;
    const double arg = -kd * (m.x * nx + m.y * ny + m.z * nz);
    return {w, w * std::cos(arg), w * std::sin(arg)};
  }
};

// Integrand on the great circle n = cos(s) e_p + sin(s) e_q left over when
// the third axis is perfectly absorbing. Arc length is the limiting measure.
struct CircleKernel {
  double g_p, g_q;
  double shift;
  double m_p, m_q;
  double kd;

  Moments operator()(double s) const {
    const double c = std::cos(s);
    const double sn = std::sin(s);
    const double w = std::exp(shift - (g_p * std::abs(c) + g_q * std::abs(sn)));
    const double arg = -kd * (m_p * c + m_q * sn);
    return {w, w * std::cos(arg), w * std::sin(arg)};
  }
};

CoherenceIntegral finish(const detail::AdaptiveOutcome& outcome, const QuadratureConfig& q) {
  const double den = outcome.integral.den;
  if (!(den > kDegenerateDenominator)) {
    throw DegenerateFieldError("PSD integral vanished: the sound field is fully absorbed");
  }
  const double achieved = outcome.error / den;
  if (!outcome.converged) {
    throw QuadratureError("coherence quadrature did not reach tolerance " +
                              std::to_string(q.tolerance) + " within " +
                              std::to_string(q.max_panels) + " panels (achieved " +
                              std::to_string(achieved) + ")",
                          achieved);
  }
  CoherenceIntegral result;
  result.value = {outcome.integral.num_re / den, outcome.integral.num_im / den};
  result.error_estimate = achieved;
  result.panels = outcome.panels;
  return result;
}

std::array<double, 3> components(const Vec3& v) { return {v.x, v.y, v.z}; }

// Axes left once `zero` is removed, in cyclic order.
std::pair<int, int> remaining_axes(int zero) {
  return {(zero + 1) % 3, (zero + 2) % 3};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Velocity velocity_components(Direction dir, double c) {
  const double st = std::sin(dir.theta);
  return {c * std::cos(dir.theta), c * st * std::cos(dir.phi), c * st * std::sin(dir.phi)};
}

double ray_attenuation(Direction dir, const RayAttenuationParams& params) {
  const RoomSpec& room = params.room;
  if (!std::isfinite(params.t) || params.t < 0.0) throw ValidationError("time must be >= 0");
  const Velocity v = velocity_components(dir, room.c);
  const std::array<double, 3> exponents{2.0 * params.t * std::abs(v.cx) / room.lx,
                                        2.0 * params.t * std::abs(v.cy) / room.ly,
                                        2.0 * params.t * std::abs(v.cz) / room.lz};
  const std::array<double, 3> r{room.rx, room.ry, room.rz};
  double log_power = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (exponents[i] == 0.0) continue;
    if (r[i] == 0.0) return 0.0;
    log_power += exponents[i] * std::log(r[i]);
  }
  return std::exp(log_power);
}

std::complex<double> phase_term(Direction dir, double k, const MicPairSpec& mic) {
  const double projection =
      std::cos(mic.theta_mic) * std::cos(dir.theta) +
      std::sin(mic.theta_mic) * std::sin(dir.theta) * std::cos(mic.phi_mic - dir.phi);
  const double arg = -k * mic.d * projection;
  return {std::cos(arg), std::sin(arg)};
}

double combine_wall_coefficients(double r1, double r2) {
  for (double r : {r1, r2}) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      throw ValidationError("wall reflection coefficient must lie in [0, 1]");
    }
  }
  return std::sqrt(r1 * r2);
}

CoherenceIntegral integrate_coherence(double k, double t, const RoomSpec& room,
                                      const MicPairSpec& mic_in, const QuadratureConfig& q) {
  validate_inputs(k, t, room);
  if (!(q.tolerance > 0.0)) throw ValidationError("quadrature tolerance must be > 0");
  const MicPairSpec mic = mic_in.normalized();
  const double kd = k * mic.d;
  const Vec3 m = axis_of(mic);
  const DecayRates rates = decay_rates(room, t);

  switch (rates.absorbing_count()) {
    case 3:
      throw DegenerateFieldError("all reflection coefficients are zero at t > 0");
    case 2: {
      // Only rays along the surviving axis remain, in both senses with equal
      // weight: the phases average to a cosine.
      const int axis = static_cast<int>(
          std::find(rates.absorbing.begin(), rates.absorbing.end(), false) -
          rates.absorbing.begin());
      CoherenceIntegral result;
      result.value = std::cos(kd * components(m)[axis]);
      return result;
    }
    case 1: {
      const int zero = static_cast<int>(
          std::find(rates.absorbing.begin(), rates.absorbing.end(), true) -
          rates.absorbing.begin());
      const auto [p, r] = remaining_axes(zero);
      const auto mc = components(m);
      const CircleKernel kernel{rates.g[p], rates.g[r], std::min(rates.g[p], rates.g[r]),
                                mc[p], mc[r], kd};
      const std::array<double, 5> kinks{0.0, 0.5 * kPi, kPi, 1.5 * kPi, kTwoPi};
      const auto breaks =
          q.split_domain
              ? graded_breaks(kinks, 0.0, kTwoPi, std::max(rates.g[p], rates.g[r]), kPi / 8)
              : std::vector<double>{0.0, kTwoPi};
      return finish(detail::integrate_intervals(kernel, breaks, q.tolerance, q.max_panels), q);
    }
    default:
      break;
  }

  const double g_max = *std::max_element(rates.g.begin(), rates.g.end());
  const double g_min = *std::min_element(rates.g.begin(), rates.g.end());
  const SphereKernel kernel{rates.g, g_min, m, kd};
  std::vector<double> theta_breaks{0.0, kPi};
  std::vector<double> phi_breaks{0.0, kTwoPi};
  if (q.split_domain) {
    const std::array<double, 3> theta_kinks{0.0, 0.5 * kPi, kPi};
    const std::array<double, 5> phi_kinks{0.0, 0.5 * kPi, kPi, 1.5 * kPi, kTwoPi};
    theta_breaks = graded_breaks(theta_kinks, 0.0, kPi, g_max, kPi / 8);
    phi_breaks = graded_breaks(phi_kinks, 0.0, kTwoPi, g_max, kPi / 8);
  }
  detail::RectangleIntegrator integrator(kernel, q.tolerance, q.max_panels);
  return finish(integrator.run(theta_breaks, phi_breaks), q);
}

std::complex<double> decaying_coherence(double k, double t, const RoomSpec& room,
                                        const MicPairSpec& mic, const QuadratureConfig& q) {
  return integrate_coherence(k, t, room, mic, q).value;
}

CoherenceCurve decaying_coherence_curve(const WavenumberGrid& grid, double t,
                                        const RoomSpec& room, const MicPairSpec& mic,
                                        const QuadratureConfig& q) {
  CoherenceCurve curve;
  curve.grid = grid;
  curve.t = t;
  curve.values.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      curve.values.push_back(decaying_coherence(grid[i], t, room, mic, q));
    } catch (const QuadratureError& e) {
      throw QuadratureError("grid index " + std::to_string(i) + ": " + e.what(),
                            e.achieved_error());
    } catch (const DegenerateFieldError& e) {
      throw DegenerateFieldError("grid index " + std::to_string(i) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("grid index " + std::to_string(i) + ": " + e.what());
    }
  }
  return curve;
}

double MonteCarloEstimate::std_error() const { return std::hypot(std_error_real, std_error_imag); }

MonteCarloEstimate mc_coherence(double k, double t, const RoomSpec& room,
                                const MicPairSpec& mic_in, std::size_t n_samples,
                                std::uint64_t seed) {
  validate_inputs(k, t, room);
  if (n_samples < 1) throw ValidationError("Monte Carlo needs at least one sample");
  const MicPairSpec mic = mic_in.normalized();
  const double kd = k * mic.d;
  const auto m = components(axis_of(mic));
  const DecayRates rates = decay_rates(room, t);
  const int zeros = rates.absorbing_count();
  if (zeros == 3) throw DegenerateFieldError("all reflection coefficients are zero at t > 0");
  if (zeros == 2) {
    const int axis = static_cast<int>(
        std::find(rates.absorbing.begin(), rates.absorbing.end(), false) -
        rates.absorbing.begin());
    return {std::cos(kd * m[axis]), 0.0, 0.0};
  }
  const int zero = zeros == 1 ? static_cast<int>(std::find(rates.absorbing.begin(),
                                                           rates.absorbing.end(), true) -
                                                 rates.absorbing.begin())
                              : -1;

  // Directions on the sphere (cos theta uniform, phi uniform), or uniform on
  // the surviving great circle when one axis is perfectly absorbing.
  auto draw = [&](std::mt19937_64& rng) -> std::array<double, 3> {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    if (zero >= 0) {
      const double s = kTwoPi * u1;
      std::array<double, 3> n{0.0, 0.0, 0.0};
      const auto [p, r] = remaining_axes(zero);
      n[p] = std::cos(s);
      n[r] = std::sin(s);
      return n;
    }
    const double ct = 2.0 * u1 - 1.0;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = kTwoPi * u2;
    return {ct, st * std::cos(phi), st * std::sin(phi)};
  };
  double shift = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (!rates.absorbing[i]) shift = std::min(shift, rates.g[i]);
  }

  constexpr std::size_t kBatch = std::size_t{1} << 16;
  double sum_w = 0.0, sum_w2 = 0.0;
  double sum_re = 0.0, sum_im = 0.0;
  double sum_re2 = 0.0, sum_im2 = 0.0;
  double sum_re_w = 0.0, sum_im_w = 0.0;
  for (std::size_t start = 0, batch = 0; start < n_samples; start += kBatch, ++batch) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(batch)));
    const std::size_t count = std::min(kBatch, n_samples - start);
    for (std::size_t i = 0; i < count; ++i) {
      const auto n = draw(rng);
      double exponent = shift;
      for (int a = 0; a < 3; ++a) {
        if (!rates.absorbing[a]) exponent -= rates.g[a] * std::abs(n[a]);
      }
      const double w = std::exp(exponent);
      const double arg = -kd * (m[0] * n[0] + m[1] * n[1] + m[2] * n[2]);
      const double re = w * std::cos(arg);
      const double im = w * std::sin(arg);
      sum_w += w;
      sum_w2 += w * w;
      sum_re += re;
      sum_im += im;
      sum_re2 += re * re;
      sum_im2 += im * im;
      sum_re_w += re * w;
      sum_im_w += im * w;
    }
  }
  if (!(sum_w > 0.0)) throw DegenerateFieldError("every Monte Carlo sample was absorbed");
  const double ratio_re = sum_re / sum_w;
  const double ratio_im = sum_im / sum_w;
  // Delta method: residuals e_i = num_i - ratio * w_i.
  const double n = static_cast<double>(n_samples);
  auto stderr_of = [&](double sum_x2, double sum_xw, double ratio) {
    if (n_samples < 2) return 0.0;
    const double ss = (sum_x2 - 2.0 * ratio * sum_xw) + ratio * ratio * sum_w2;
    const double var_mean = std::max(0.0, ss) / (n * (n - 1.0));
    return std::sqrt(var_mean) / (sum_w / n);
  };
  MonteCarloEstimate est;
  est.value = {ratio_re, ratio_im};
  est.std_error_real = stderr_of(sum_re2, sum_re_w, ratio_re);
  est.std_error_imag = stderr_of(sum_im2, sum_im_w, ratio_im);
  return est;
}

}  // namespace decaycoh
