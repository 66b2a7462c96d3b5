#include "decaycoh/rir_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "decaycoh/decay_model.hpp"
#include "decaycoh/errors.hpp"

namespace decaycoh {
namespace {

bool strictly_inside(const Point3& p, const RoomSpec& room) {
  return p.x > 0.0 && p.x < room.lx && p.y > 0.0 && p.y < room.ly && p.z > 0.0 &&
         p.z < room.lz;
}

// Image coordinates along one axis: (1 - 2q) s + 2 n L, hitting the wall at
// 0 |n - q| times and the wall at L |n| times.
struct AxisImage {
  double coordinate;
  double gain;
  int order;
};

std::vector<AxisImage> axis_images(double source, double length, double r0, double r1,
                                   int n_bound, int max_order) {
  std::vector<AxisImage> out;
  for (int n = -n_bound; n <= n_bound; ++n) {
    for (int q = 0; q <= 1; ++q) {
      const int hits0 = std::abs(n - q);
      const int hits1 = std::abs(n);
      const int order = hits0 + hits1;
      if (max_order >= 0 && order > max_order) continue;
      out.push_back({(1 - 2 * q) * source + 2.0 * n * length,
                     std::pow(r0, hits0) * std::pow(r1, hits1), order});
    }
  }
  return out;
}

}  // namespace

double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

SimConfig validate_sim_config(const SimConfig& cfg) {
  validate_room(cfg.room);
  if (cfg.walls) {
    const auto& w = *cfg.walls;
    for (double r : {w.x0, w.x1, w.y0, w.y1, w.z0, w.z1}) {
      if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
        throw ValidationError("wall reflection coefficients must lie in [0, 1]");
      }
    }
  }
  if (!strictly_inside(cfg.source, cfg.room)) {
    throw ValidationError("source must lie strictly inside the room");
  }
  if (cfg.mics.empty()) throw ValidationError("at least one microphone is required");
  for (std::size_t i = 0; i < cfg.mics.size(); ++i) {
    if (!strictly_inside(cfg.mics[i], cfg.room)) {
      throw ValidationError("microphone " + std::to_string(i) +
                            " must lie strictly inside the room");
    }
  }
  if (!std::isfinite(cfg.sample_rate) || cfg.sample_rate <= 0.0) {
    throw ValidationError("sample rate must be > 0");
  }
  if (cfg.length == 0) throw ValidationError("impulse response length must be > 0");
  if (cfg.fractional_delay && cfg.fractional_taps % 2 == 0) {
    throw ValidationError("fractional delay filter length must be odd");
  }
  return cfg;
}

WallCoefficients effective_walls(const SimConfig& cfg) {
  if (cfg.walls) return *cfg.walls;
  const auto& r = cfg.room;
  return {r.rx, r.rx, r.ry, r.ry, r.rz, r.rz};
}

RoomSpec model_room(const SimConfig& cfg) {
  const WallCoefficients w = effective_walls(cfg);
  RoomSpec room = cfg.room;
  room.rx = combine_wall_coefficients(w.x0, w.x1);
  room.ry = combine_wall_coefficients(w.y0, w.y1);
  room.rz = combine_wall_coefficients(w.z0, w.z1);
  return room;
}

std::vector<ImageSource> enumerate_images(const SimConfig& cfg_in) {
  const SimConfig cfg = validate_sim_config(cfg_in);
  const WallCoefficients w = effective_walls(cfg);
  const RoomSpec& room = cfg.room;

  // Farthest path that still reaches the last sample, including the
  // fractional-delay filter half-length.
  const double tail = cfg.fractional_delay ? 0.5 * static_cast<double>(cfg.fractional_taps) : 0.5;
  const double max_distance = (static_cast<double>(cfg.length) + tail) * room.c / cfg.sample_rate;
  auto bound = [&](double length) {
    int n = static_cast<int>(std::ceil(max_distance / (2.0 * length))) + 1;
    if (cfg.max_order >= 0) n = std::min(n, cfg.max_order / 2 + 1);
    return n;
  };
  const int nx = bound(room.lx), ny = bound(room.ly), nz = bound(room.lz);
  const double lattice = 8.0 * (2.0 * nx + 1) * (2.0 * ny + 1) * (2.0 * nz + 1);
  if (lattice > static_cast<double>(cfg.max_images)) {
    throw ImageBudgetError("image lattice of " + std::to_string(static_cast<long long>(lattice)) +
                               " images exceeds the budget of " +
                               std::to_string(cfg.max_images),
                           cfg.max_images);
  }

  const auto xs = axis_images(cfg.source.x, room.lx, w.x0, w.x1, nx, cfg.max_order);
  const auto ys = axis_images(cfg.source.y, room.ly, w.y0, w.y1, ny, cfg.max_order);
  const auto zs = axis_images(cfg.source.z, room.lz, w.z0, w.z1, nz, cfg.max_order);

  // Images beyond max_distance of every point of the room are useless.
  const Point3 centre{0.5 * room.lx, 0.5 * room.ly, 0.5 * room.lz};
  const double reach =
      max_distance + 0.5 * std::sqrt(room.lx * room.lx + room.ly * room.ly + room.lz * room.lz);

  std::vector<ImageSource> images;
  for (const auto& ix : xs) {
    for (const auto& iy : ys) {
      for (const auto& iz : zs) {
        const int order = ix.order + iy.order + iz.order;
        if (cfg.max_order >= 0 && order > cfg.max_order) continue;
        const Point3 p{ix.coordinate, iy.coordinate, iz.coordinate};
        if (distance(p, centre) > reach) continue;
        images.push_back({p, ix.gain * iy.gain * iz.gain, order});
      }
    }
  }
  return images;
}

void validate_impulse_responses(const ImpulseResponseSet& ir) {
  if (!std::isfinite(ir.sample_rate) || ir.sample_rate <= 0.0) {
    throw ValidationError("impulse response sample rate must be > 0");
  }
  for (const auto& ch : ir.channels) {
    if (ch.size() != ir.num_samples()) {
      throw ValidationError("impulse response channels must have equal length");
    }
    for (double v : ch) {
      if (!std::isfinite(v)) throw ValidationError("impulse response contains non-finite samples");
    }
  }
}

ImpulseResponseSet synthesize_rir(const SimConfig& cfg_in) {
  const SimConfig cfg = validate_sim_config(cfg_in);
  const auto images = enumerate_images(cfg);
  const double samples_per_metre = cfg.sample_rate / cfg.room.c;
  const auto length = static_cast<std::ptrdiff_t>(cfg.length);
  const double half = 0.5 * static_cast<double>(cfg.fractional_taps);

  ImpulseResponseSet out;
  out.sample_rate = cfg.sample_rate;
  out.geometry = cfg;
  out.channels.assign(cfg.mics.size(), std::vector<double>(cfg.length, 0.0));

  for (std::size_t m = 0; m < cfg.mics.size(); ++m) {
    auto& h = out.channels[m];
    for (const auto& image : images) {
      if (image.gain == 0.0) continue;
      const double r = distance(image.position, cfg.mics[m]);
      const double amplitude = image.gain / (4.0 * std::numbers::pi * r);
      const double delay = r * samples_per_metre;
      if (!cfg.fractional_delay) {
        const auto n = static_cast<std::ptrdiff_t>(std::lround(delay));
        if (n < length) h[static_cast<std::size_t>(n)] += amplitude;
        continue;
      }
      const auto first = static_cast<std::ptrdiff_t>(std::ceil(delay - half));
      const auto last = std::min(static_cast<std::ptrdiff_t>(std::floor(delay + half)), length - 1);
      for (std::ptrdiff_t n = std::max<std::ptrdiff_t>(first, 0); n <= last; ++n) {
        const double x = static_cast<double>(n) - delay;
        const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * x / half));
        const double sinc =
            std::abs(x) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        h[static_cast<std::size_t>(n)] += amplitude * window * sinc;
      }
    }
  }
  return out;
}

std::vector<double> energy_decay_curve(std::span<const double> h) {
  std::vector<double> edc(h.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  return edc;
}

}  // namespace decaycoh
