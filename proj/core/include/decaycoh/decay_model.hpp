#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include "decaycoh/core_types.hpp"

namespace decaycoh {

// Time-varying coherence of the decaying sound field in a rectangular room.
//
// Every ray starts with the same power at t = 0 (isotropic initial state) and
// loses r^2 per wall collision. A ray travelling along n for a time t meets
// the x walls about t c |n_x| / lx times, so its remaining power is
//
//   A(n, t) = rx^(2 t c |n_x| / lx) * ry^(2 t c |n_y| / ly) * rz^(2 t c |n_z| / lz).
//
// The coherence is the A-weighted average of the inter-sensor phase
// exp(-j k d <m, n>) over the unit sphere. Source and sensor positions never
// enter, only the room and the orientation m of the sensor axis.

struct Velocity {
  double cx, cy, cz;
};

/// Cartesian components of a ray velocity of magnitude `c` along `dir`.
Velocity velocity_components(Direction dir, double c);

struct RayAttenuationParams {
  RoomSpec room;
  double t = 0.0;  // seconds since excitation
};

/// Power factor A(dir, t) in [0, 1], evaluated as exp(sum of exponent * ln r).
/// A coefficient of 0 with a zero exponent contributes 1; with a positive
/// exponent it contributes 0.
double ray_attenuation(Direction dir, const RayAttenuationParams& params);

/// exp(-j k d <m, n>) for a plane wave propagating along `dir`.
std::complex<double> phase_term(Direction dir, double k, const MicPairSpec& mic);

/// Single coefficient for two parallel walls with different coefficients:
/// the geometric mean sqrt(r1 * r2).
double combine_wall_coefficients(double r1, double r2);

struct QuadratureConfig {
  double tolerance = 1e-8;         // absolute error target on the coherence
  std::size_t max_panels = 200000;  // refinement budget
  bool split_domain = true;         // start from the octants of the sphere
};

struct CoherenceIntegral {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

/// Adaptive tensor Gauss-Kronrod evaluation of the coherence quotient, with
/// its error estimate and the number of panels used. Throws QuadratureError
/// when the budget runs out and DegenerateFieldError when every ray is
/// absorbed (all coefficients zero and t > 0).
///
/// A coefficient equal to zero is treated as the limit r -> 0+: the weight
/// collapses onto the plane (one zero) or the axis (two zeros) where the
/// absorbing walls are never hit, and the quotient is evaluated there.
CoherenceIntegral integrate_coherence(double k, double t, const RoomSpec& room,
                                      const MicPairSpec& mic,
                                      const QuadratureConfig& q = {});

std::complex<double> decaying_coherence(double k, double t, const RoomSpec& room,
                                        const MicPairSpec& mic,
                                        const QuadratureConfig& q = {});

/// Pointwise decaying_coherence over `grid`. Errors are rethrown with the
/// offending grid index in the message.
CoherenceCurve decaying_coherence_curve(const WavenumberGrid& grid, double t,
                                        const RoomSpec& room, const MicPairSpec& mic,
                                        const QuadratureConfig& q = {});

struct MonteCarloEstimate {
  std::complex<double> value;
  double std_error_real = 0.0;
  double std_error_imag = 0.0;

  double std_error() const;
};

/// Ratio estimator of the same quotient from `n_samples` directions drawn
/// uniformly on the sphere. Samples are drawn in fixed-size batches, each
/// with its own generator derived from `seed`, so the result depends only
/// on (inputs, n_samples, seed).
MonteCarloEstimate mc_coherence(double k, double t, const RoomSpec& room,
                                const MicPairSpec& mic, std::size_t n_samples,
                                std::uint64_t seed);

}  // namespace decaycoh
