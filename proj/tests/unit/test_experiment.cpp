#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decaycoh/errors.hpp"
#include "decaycoh/experiment.hpp"
#include "decaycoh/isotropic.hpp"
#include "decaycoh/wav_io.hpp"

using namespace decaycoh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "decaycoh_test_experiment" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A quick variant of the reference setup: 4 mics, 0.2 s, coarse DFT.
ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.array.n_mics = 4;
  cfg.simulation.length_s = 0.2;
  cfg.estimation.window_length = 256;
  cfg.estimation.dft_length = 256;
  cfg.output_dir = out;
  return cfg;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_CASE("defaults describe the reference room") {
  const ExperimentConfig cfg;
  CHECK(cfg.room == RoomSpec{6.0, 4.0, 3.0, 0.8, 1.0, 1.0, 343.0});
  CHECK(cfg.array.n_mics == 16);
  CHECK(interval_count(cfg) == 4);
  CHECK(model_frequencies(cfg).size() == 513);
  CHECK_NOTHROW(validate_experiment(cfg));
  const auto positions = array_positions(cfg);
  REQUIRE(positions.size() == 16);
  CHECK(positions[8].x - positions[7].x == doctest::Approx(0.08));
  CHECK(0.5 * (positions[0].x + positions[15].x) == doctest::Approx(3.0));
}

TEST_CASE("config round trips through JSON") {
  ExperimentConfig cfg;
  cfg.array.theta_mic = 20.0 * std::numbers::pi / 180.0;
  cfg.simulation.walls = WallCoefficients{0.9, 0.7, 1.0, 1.0, 0.5, 0.5};
  cfg.estimation.pair_policy = PairPolicy::kExplicit;
  cfg.estimation.pairs = {{0, 1}, {2, 3}};
  cfg.model.frequencies_hz = std::vector<double>{100.0, 200.0};
  const auto back = parse_experiment_config(experiment_config_to_json(cfg));
  CHECK(back.array.theta_mic == doctest::Approx(cfg.array.theta_mic));
  CHECK(back.simulation.walls == cfg.simulation.walls);
  CHECK(back.estimation.pairs == cfg.estimation.pairs);
  CHECK(back.model.frequencies_hz == cfg.model.frequencies_hz);
}

TEST_CASE("partial config and overrides") {
  const auto cfg = parse_experiment_config(R"({"room": {"rx": 0.5}, "array": {"n_mics": 8}})",
                                           {"estimation.window=rectangular", "seed=42",
                                            "array.center=[1, 1, 1]"});
  CHECK(cfg.room.rx == 0.5);
  CHECK(cfg.room.lx == 6.0);
  CHECK(cfg.array.n_mics == 8);
  CHECK(cfg.estimation.window == WindowType::kRectangular);
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.array.center.has_value());
  CHECK(*cfg.array.center == Point3{1.0, 1.0, 1.0});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_experiment_config(R"({"room": {"rq": 1}})"), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"bogus": 1})"), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config("{not json"), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config("[]"), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config("{}", {"room.lx"}), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config("{}", {"room.nope=3"}), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"room": {"lx": "wide"}})"), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"estimation": {"window": "kaiser"}})"),
                  ValidationError);
  CHECK_THROWS_AS(load_experiment_config(fs::path("/nonexistent/config.json")), IoError);

  ExperimentConfig cfg;
  cfg.model.frequencies_hz = std::vector<double>{};
  CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
  cfg = {};
  cfg.array.n_mics = 100;  // 7.9 m long, pokes through the walls
  CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
  cfg = {};
  cfg.model.time_offset_s = 0.2;
  CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
  cfg = {};
  cfg.band_lo_hz = 8000.0;
  CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
}

TEST_CASE("lossless room model equals sinc") {
  ExperimentConfig cfg = small_config(scratch("lossless"));
  cfg.room.rx = 1.0;
  cfg.model.frequencies_hz = std::vector<double>{0.0, 250.0, 1000.0, 4000.0, 7000.0};
  const auto rows = run_model(cfg);
  CHECK(rows.size() == 2 * 5);
  for (const auto& r : rows) {
    CHECK(std::abs(r.model - r.sinc) < 1e-6);
    CHECK(r.sinc == sinc_unnormalized(r.wavenumber * 0.08));
    CHECK(r.j0 == bessel_j0(r.wavenumber * 0.08));
  }
  CHECK(rows[5].t_s == doctest::Approx(0.11));
}

TEST_CASE("model csv with Monte Carlo columns") {
  ExperimentConfig cfg = small_config(scratch("model_csv"));
  cfg.model.frequencies_hz = std::vector<double>{500.0, 1500.0};
  cfg.model.mc_samples = 20000;
  const auto path = cmd_model(cfg);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("mc_stderr") != std::string::npos);
  CHECK(count_lines(path) == 1 + 2 * 2);
  const auto rows = run_model(cfg);
  for (const auto& r : rows) {
    REQUIRE(r.monte_carlo.has_value());
    CHECK(std::abs(r.monte_carlo->value - r.model) < 5.0 * r.monte_carlo->std_error() + 1e-3);
  }
}

TEST_CASE("simulate writes one channel per mic plus a sidecar") {
  const auto out = scratch("simulate");
  ExperimentConfig cfg = small_config(out);
  cfg.array.n_mics = 16;
  const auto wav = cmd_simulate(cfg);
  const auto data = read_wav(wav);
  CHECK(data.channels.size() == 16);
  CHECK(data.sample_rate == 16000.0);
  CHECK(data.channels[0].size() == 3200);
  CHECK(fs::exists(out / "rir.json"));
  const auto ir = load_impulse_responses(wav);
  REQUIRE(ir.geometry.has_value());
  CHECK(ir.geometry->mics == array_positions(cfg));
  CHECK(ir.geometry->room == cfg.room);
}

TEST_CASE("estimate on duplicated channels and mono input") {
  const auto out = scratch("estimate");
  ExperimentConfig cfg = small_config(out);
  ImpulseResponseSet ir;
  ir.sample_rate = 16000.0;
  std::vector<double> x(3200);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i) + 0.3 * std::cos(1.91 * i + 0.2 * std::sin(0.01 * i));
  ir.channels = {x, x, x};
  save_impulse_responses(out / "dup.wav", ir);
  const auto csv = cmd_estimate(out / "dup.wav", cfg);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "interval_index,t_start_s,t_end_s,frequency_hz,coherence_real,coherence_imag,n_frames,n_pairs");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 8);
    CHECK(std::stod(cells[4]) == 1.0);
    CHECK(std::stod(cells[5]) == 0.0);
    CHECK(cells[7] == "2");
    ++rows;
  }
  CHECK(rows > 0);

  write_wav(out / "mono.wav", WavData{{x}, 16000.0, WavSampleFormat::kFloat32});
  CHECK_THROWS_AS(cmd_estimate(out / "mono.wav", cfg), ValidationError);
  CHECK_THROWS_AS(cmd_estimate(out / "absent.wav", cfg), IoError);
}

TEST_CASE("compare reuses the model values bit for bit") {
  const auto out = scratch("compare");
  ExperimentConfig cfg = small_config(out);
  cfg.emit_gnuplot = true;
  const auto result = cmd_compare(cfg);
  REQUIRE(result.intervals.size() == 2);
  const auto rows = run_model(cfg);
  REQUIRE(rows.size() == result.model.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].model == result.model[i].model);
    CHECK(rows[i].t_s == result.model[i].t_s);
    CHECK(rows[i].frequency_hz == result.model[i].frequency_hz);
  }
  for (const auto& cmp : result.intervals) {
    CHECK(cmp.n_bins > 0);
    CHECK(std::isfinite(cmp.rmse_model));
    CHECK(std::isfinite(cmp.rmse_sinc));
  }
  CHECK(fs::exists(out / "comparison.csv"));
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "compare.gp"));
  CHECK(count_lines(out / "comparison.csv") == 1 + 2 * 129);

  cfg.model.frequencies_hz = std::vector<double>{100.0};
  CHECK_THROWS_AS(cmd_compare(cfg), ValidationError);
}

TEST_CASE("band_rmse") {
  IntervalCoherence est;
  est.frequencies_hz = {0.0, 100.0, 200.0, 300.0};
  est.values = {{1.0, 0.0}, {0.5, 0.3}, {0.2, 0.0}, {9.0, 0.0}};
  est.valid = {true, true, false, true};
  std::size_t n = 0;
  const double r = band_rmse(est, {0.0, 0.0, 0.0, 0.0}, 50.0, 250.0, &n);
  CHECK(n == 1);
  CHECK(r == doctest::Approx(0.5));
  CHECK_THROWS_AS(band_rmse(est, {0.0, 0.0, 0.0, 0.0}, 150.0, 250.0), ValidationError);
}
