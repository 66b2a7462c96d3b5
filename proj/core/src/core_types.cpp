#include "decaycoh/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decaycoh/errors.hpp"

namespace decaycoh {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be finite");
  }
}

void require_positive_length(double value, const char* name) {
  require_finite(value, name);
  if (value <= 0.0) {
    throw ValidationError(std::string(name) + " must be > 0, got " + std::to_string(value));
  }
}

void require_reflection(double value, const char* name) {
  require_finite(value, name);
  if (value < 0.0 || value > 1.0) {
    throw ValidationError(std::string(name) + " must lie in [0, 1], got " +
                          std::to_string(value));
  }
}

}  // namespace

RoomSpec validate_room(const RoomSpec& spec) {
  require_positive_length(spec.lx, "lx");
  require_positive_length(spec.ly, "ly");
  require_positive_length(spec.lz, "lz");
  require_reflection(spec.rx, "rx");
  require_reflection(spec.ry, "ry");
  require_reflection(spec.rz, "rz");
  require_positive_length(spec.c, "c");
  return spec;
}

Direction::Vector Direction::unit_vector() const {
  const double st = std::sin(theta);
  return {std::cos(theta), st * std::cos(phi), st * std::sin(phi)};
}

Direction Direction::normalized() const {
  require_finite(theta, "theta");
  require_finite(phi, "phi");
  if (theta >= 0.0 && theta <= std::numbers::pi && phi >= 0.0 && phi < kTwoPi) {
    return *this;
  }
  // Round-trip through the unit vector so that e.g. theta = -0.3 maps onto
  // the same physical direction.
  const auto v = unit_vector();
  Direction out;
  out.theta = std::acos(std::clamp(v.x, -1.0, 1.0));
  double p = std::atan2(v.z, v.y);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  out.phi = p;
  return out;
}

MicPairSpec MicPairSpec::normalized() const {
  require_finite(d, "d");
  if (d < 0.0) throw ValidationError("sensor spacing d must be >= 0");
  const Direction axis = Direction{theta_mic, phi_mic}.normalized();
  return {d, axis.theta, axis.phi};
}

double wavenumber_from_frequency(double frequency_hz, double c) {
  require_finite(frequency_hz, "frequency");
  require_positive_length(c, "c");
  if (frequency_hz < 0.0) throw ValidationError("frequency must be >= 0");
  return kTwoPi * frequency_hz / c;
}

double frequency_from_wavenumber(double k, double c) {
  require_finite(k, "k");
  require_positive_length(c, "c");
  if (k < 0.0) throw ValidationError("wavenumber must be >= 0");
  return k * c / kTwoPi;
}

WavenumberGrid::WavenumberGrid(std::vector<double> k) : values_(std::move(k)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require_finite(values_[i], "wavenumber");
    if (values_[i] < 0.0) throw ValidationError("wavenumbers must be >= 0");
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw ValidationError("wavenumber grid must be strictly increasing");
    }
  }
}

WavenumberGrid WavenumberGrid::from_frequencies(std::span<const double> frequencies_hz,
                                                double c) {
  std::vector<double> k;
  k.reserve(frequencies_hz.size());
  for (double f : frequencies_hz) k.push_back(wavenumber_from_frequency(f, c));
  return WavenumberGrid(std::move(k));
}

WavenumberGrid WavenumberGrid::linspace(double k_min, double k_max, std::size_t n) {
  std::vector<double> k(n);
  if (n == 1) {
    k[0] = k_min;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      k[i] = k_min + (k_max - k_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
  }
  return WavenumberGrid(std::move(k));
}

std::vector<double> WavenumberGrid::frequencies(double c) const {
  std::vector<double> f;
  f.reserve(values_.size());
  for (double k : values_) f.push_back(frequency_from_wavenumber(k, c));
  return f;
}

bool is_bounded(const CoherenceCurve& curve, double tolerance) {
  for (const auto& v : curve.values) {
    if (!(std::abs(v) <= 1.0 + tolerance)) return false;
  }
  return true;
}

}  // namespace decaycoh
