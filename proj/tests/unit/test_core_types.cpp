#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "decaycoh/core_types.hpp"
#include "decaycoh/errors.hpp"

using namespace decaycoh;

namespace {
RoomSpec reference_room() { return {6.0, 4.0, 3.0, 0.8, 1.0, 1.0, 343.0}; }
}  // namespace

TEST_CASE("validate_room accepts the reference room unchanged") {
  const RoomSpec room = reference_room();
  CHECK(validate_room(room) == room);
  CHECK(validate_room(validate_room(room)) == validate_room(room));
}

TEST_CASE("validate_room rejects invariant violations") {
  RoomSpec room = reference_room();
  room.lx = 0.0;
  CHECK_THROWS_AS(validate_room(room), ValidationError);

  room = reference_room();
  room.rx = 1.2;
  CHECK_THROWS_AS(validate_room(room), ValidationError);

  room = reference_room();
  room.rz = -0.01;
  CHECK_THROWS_AS(validate_room(room), ValidationError);

  room = reference_room();
  room.ly = std::nan("");
  CHECK_THROWS_AS(validate_room(room), ValidationError);

  room = reference_room();
  room.c = 0.0;
  CHECK_THROWS_AS(validate_room(room), ValidationError);

  room = reference_room();
  room.lz = INFINITY;
  CHECK_THROWS_AS(validate_room(room), ValidationError);
}

TEST_CASE("wavenumber_from_frequency") {
  CHECK(wavenumber_from_frequency(0.0, 343.0) == 0.0);
  CHECK(wavenumber_from_frequency(343.0 / (2.0 * std::numbers::pi), 343.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // 2 pi 1000 / 343
  CHECK(wavenumber_from_frequency(1000.0, 343.0) ==
        doctest::Approx(18.318324510727657).epsilon(1e-14));
  CHECK_THROWS_AS(wavenumber_from_frequency(std::nan(""), 343.0), ValidationError);
  CHECK_THROWS_AS(wavenumber_from_frequency(-1.0, 343.0), ValidationError);
}

TEST_CASE("frequency round trip recovers f to 1e-12 relative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> f_dist(0.0, 48000.0), c_dist(300.0, 400.0);
  for (int i = 0; i < 1000; ++i) {
    const double f = f_dist(rng), c = c_dist(rng);
    const double back = frequency_from_wavenumber(wavenumber_from_frequency(f, c), c);
    CHECK(std::abs(back - f) <= 1e-12 * std::max(f, 1e-300));
  }
}

TEST_CASE("Direction normalization keeps the physical direction") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const Direction raw{angle(rng), angle(rng)};
    const Direction n = raw.normalized();
    CHECK(n.theta >= 0.0);
    CHECK(n.theta <= std::numbers::pi);
    CHECK(n.phi >= 0.0);
    CHECK(n.phi < 2.0 * std::numbers::pi);
    const auto a = raw.unit_vector();
    const auto b = n.unit_vector();
    CHECK(std::hypot(a.x - b.x, a.y - b.y, a.z - b.z) < 1e-12);
  }
}

TEST_CASE("MicPairSpec normalization") {
  const auto mic = MicPairSpec{0.08, -0.3, 7.0}.normalized();
  CHECK(mic.d == 0.08);
  CHECK(mic.theta_mic == doctest::Approx(0.3));
  CHECK_THROWS_AS((MicPairSpec{-0.1, 0.0, 0.0}.normalized()), ValidationError);
}

TEST_CASE("WavenumberGrid enforces ordering") {
  CHECK_NOTHROW(WavenumberGrid({0.0, 1.0, 2.0}));
  CHECK_THROWS_AS(WavenumberGrid({0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(WavenumberGrid({1.0, 0.5}), ValidationError);
  CHECK_THROWS_AS(WavenumberGrid({-1.0}), ValidationError);
  const auto grid = WavenumberGrid::linspace(0.0, 10.0, 11);
  CHECK(grid.size() == 11);
  CHECK(grid[10] == 10.0);
  const std::vector<double> f{0.0, 100.0, 1000.0};
  const auto from_f = WavenumberGrid::from_frequencies(f, 343.0);
  const auto back = from_f.frequencies(343.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]));
}

TEST_CASE("is_bounded") {
  CoherenceCurve curve{WavenumberGrid({0.0, 1.0}), {{1.0, 0.0}, {0.5, 0.5}}, std::nullopt};
  CHECK(is_bounded(curve));
  curve.values[1] = {1.0, 1e-3};
  CHECK_FALSE(is_bounded(curve));
}
