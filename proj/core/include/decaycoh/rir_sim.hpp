#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "decaycoh/core_types.hpp"

namespace decaycoh {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Point3&) const = default;
};

double distance(const Point3& a, const Point3& b);

/// Amplitude reflection coefficients of the six walls. `x0` is the wall at
/// x = 0, `x1` the wall at x = lx, and so on.
struct WallCoefficients {
  double x0 = 1.0, x1 = 1.0;
  double y0 = 1.0, y1 = 1.0;
  double z0 = 1.0, z1 = 1.0;

  bool operator==(const WallCoefficients&) const = default;
};

struct SimConfig {
  RoomSpec room;
  // Overrides the per-axis coefficients of `room` when present.
  std::optional<WallCoefficients> walls;
  Point3 source;
  std::vector<Point3> mics;
  double sample_rate = 16000.0;
  std::size_t length = 0;  // samples per channel
  int max_order = -1;      // total reflection count cutoff; -1 = length only
  bool fractional_delay = true;
  std::size_t fractional_taps = 81;  // odd, Hann-windowed sinc
  std::size_t max_images = 20'000'000;

  bool operator==(const SimConfig&) const = default;
};

/// Throws ValidationError unless the room is valid, the source and every
/// microphone lie strictly inside it, and the rate and length are positive.
SimConfig validate_sim_config(const SimConfig& cfg);

/// Six wall coefficients in effect: `walls` if set, else the axis values.
WallCoefficients effective_walls(const SimConfig& cfg);

/// Per-axis room for the decay model: each pair of walls collapsed with
/// combine_wall_coefficients.
RoomSpec model_room(const SimConfig& cfg);

struct ImageSource {
  Point3 position;
  double gain = 1.0;  // product of wall coefficients along the path
  int order = 0;      // number of reflections
};

/// Mirror images of the source in lattice order, limited by `max_order` and
/// by the largest distance that still lands inside the response. Throws
/// ImageBudgetError if the lattice exceeds `max_images`.
std::vector<ImageSource> enumerate_images(const SimConfig& cfg);

struct ImpulseResponseSet {
  std::vector<std::vector<double>> channels;
  double sample_rate = 0.0;
  std::optional<SimConfig> geometry;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Validates equal channel lengths, finite samples and a positive rate.
void validate_impulse_responses(const ImpulseResponseSet& ir);

/// Image-source room impulse responses from `cfg.source` to every mic. Each
/// image contributes gain / (4 pi r) at delay r / c, either rounded to the
/// nearest sample or spread with a windowed-sinc fractional delay.
ImpulseResponseSet synthesize_rir(const SimConfig& cfg);

/// Schroeder backward integral: edc[i] = sum_{j >= i} h[j]^2.
std::vector<double> energy_decay_curve(std::span<const double> h);

}  // namespace decaycoh
