#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace decaycoh {

inline constexpr double kDefaultSpeedOfSound = 343.0;  // m/s

/// Rectangular room aligned with the coordinate axes, origin at one corner.
///
/// `rx`, `ry`, `rz` are amplitude reflection coefficients shared by each pair
/// of parallel walls; a ray loses a factor `r * r` of its power per bounce.
struct RoomSpec {
  double lx = 0.0;
  double ly = 0.0;
  double lz = 0.0;
  double rx = 1.0;
  double ry = 1.0;
  double rz = 1.0;
  double c = kDefaultSpeedOfSound;

  bool operator==(const RoomSpec&) const = default;
};

/// Checks every invariant of `spec` and returns it unchanged.
/// Throws ValidationError naming the first offending field.
RoomSpec validate_room(const RoomSpec& spec);

/// Propagation direction in the room frame. `theta` is the angle from the
/// x axis; `phi` rotates about x, measured from y towards z, so the unit
/// vector is (cos theta, sin theta cos phi, sin theta sin phi).
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  /// Same physical direction with theta in [0, pi] and phi in [0, 2 pi).
  Direction normalized() const;

  struct Vector {
    double x, y, z;
  };
  Vector unit_vector() const;
};

/// Two omnidirectional sensors `d` apart whose axis points along
/// (theta_mic, phi_mic) in the Direction convention.
struct MicPairSpec {
  double d = 0.0;
  double theta_mic = 0.0;
  double phi_mic = 0.0;

  /// Validates d and normalizes the orientation into the canonical ranges.
  MicPairSpec normalized() const;
};

double wavenumber_from_frequency(double frequency_hz, double c = kDefaultSpeedOfSound);
double frequency_from_wavenumber(double k, double c = kDefaultSpeedOfSound);

/// Strictly increasing, nonnegative wavenumbers in rad/m.
class WavenumberGrid {
 public:
  WavenumberGrid() = default;
  explicit WavenumberGrid(std::vector<double> k);

  static WavenumberGrid from_frequencies(std::span<const double> frequencies_hz,
                                         double c = kDefaultSpeedOfSound);
  static WavenumberGrid linspace(double k_min, double k_max, std::size_t n);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::vector<double> frequencies(double c = kDefaultSpeedOfSound) const;

 private:
  std::vector<double> values_;
};

struct CoherenceCurve {
  WavenumberGrid grid;
  std::vector<std::complex<double>> values;
  std::optional<double> t;  // evaluation time; empty for stationary models
};

inline constexpr double kCoherenceBoundTolerance = 1e-9;

/// True when every value satisfies |value| <= 1 + tolerance.
bool is_bounded(const CoherenceCurve& curve, double tolerance = kCoherenceBoundTolerance);

}  // namespace decaycoh
