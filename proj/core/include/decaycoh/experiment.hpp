#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decaycoh/coherence_estimator.hpp"
#include "decaycoh/decay_model.hpp"
#include "decaycoh/rir_sim.hpp"

namespace decaycoh {

// Experiment orchestration behind the command-line tool: JSON
// configuration, the simulate -> estimate -> model pipeline, and CSV/JSON
// emission. A default-constructed ExperimentConfig is the 6 x 4 x 3 m room
// with a 16-microphone x-aligned array used for the reference comparison.

/// Uniform linear array centred in the room (or at `center`), with its axis
/// along (theta_mic, phi_mic) in radians.
struct ArrayGeometry {
  std::size_t n_mics = 16;
  double spacing = 0.08;
  double theta_mic = 0.0;
  double phi_mic = 0.0;
  std::optional<Point3> center;
};

struct SimulationSettings {
  Point3 source{4.8, 3.2, 2.6};
  double sample_rate = 16000.0;
  double length_s = 0.4;
  int max_order = -1;
  bool fractional_delay = true;
  std::size_t fractional_taps = 81;
  std::size_t max_images = 20'000'000;
  std::optional<WallCoefficients> walls;
};

struct ModelSettings {
  double time_offset_s = 0.010;  // model time = interval start + offset
  QuadratureConfig quadrature;
  // Explicit grid; when empty the model is evaluated at the estimator's
  // DFT bin frequencies.
  std::optional<std::vector<double>> frequencies_hz;
  std::size_t mc_samples = 0;  // adds a Monte Carlo column when > 0
};

struct ExperimentConfig {
  RoomSpec room{6.0, 4.0, 3.0, 0.8, 1.0, 1.0, kDefaultSpeedOfSound};
  ArrayGeometry array;
  SimulationSettings simulation;
  EstimationConfig estimation;
  ModelSettings model;
  double band_lo_hz = 200.0;
  double band_hi_hz = 7500.0;
  bool emit_gnuplot = false;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

/// Loads `path` (if given) over the defaults, then applies `key.path=value`
/// overrides whose value is parsed as JSON when possible and as a string
/// otherwise. Unknown keys are rejected. Throws ValidationError / IoError.
ExperimentConfig load_experiment_config(const std::optional<std::filesystem::path>& path,
                                        const std::vector<std::string>& overrides = {});

/// Same as load_experiment_config but from an in-memory JSON document.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::vector<std::string>& overrides = {});

std::string experiment_config_to_json(const ExperimentConfig& cfg);

void validate_experiment(const ExperimentConfig& cfg);

std::vector<Point3> array_positions(const ExperimentConfig& cfg);
MicPairSpec mic_pair(const ExperimentConfig& cfg);
SimConfig build_sim_config(const ExperimentConfig& cfg);
std::size_t interval_count(const ExperimentConfig& cfg);

/// Frequencies the model is evaluated at: the explicit grid or the DFT bins.
std::vector<double> model_frequencies(const ExperimentConfig& cfg);

struct ModelRow {
  std::size_t interval_index = 0;
  double t_s = 0.0;
  double frequency_hz = 0.0;
  double wavenumber = 0.0;
  std::complex<double> model;
  double sinc = 0.0;
  double j0 = 0.0;
  std::optional<MonteCarloEstimate> monte_carlo;
};

/// Decaying-field model plus sinc and J0 reference curves at each interval's
/// model time over model_frequencies(cfg).
std::vector<ModelRow> run_model(const ExperimentConfig& cfg);

struct IntervalComparison {
  std::size_t index = 0;
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  double t_model_s = 0.0;
  double rmse_model = 0.0;
  double rmse_sinc = 0.0;
  std::size_t n_bins = 0;
};

struct ComparisonResult {
  std::vector<IntervalCoherence> estimates;
  std::vector<ModelRow> model;  // one row per estimator bin per interval
  std::vector<IntervalComparison> intervals;
};

/// Root-mean-square of Re(estimate) - reference over valid bins inside
/// [band_lo_hz, band_hi_hz]. `reference` is indexed like the estimate bins.
double band_rmse(const IntervalCoherence& estimate, const std::vector<double>& reference,
                 double band_lo_hz, double band_hi_hz, std::size_t* n_bins = nullptr);

/// Reads a WAV file as impulse responses. A sidecar `<stem>.json` written by
/// cmd_simulate, if present, supplies the geometry.
ImpulseResponseSet load_impulse_responses(const std::filesystem::path& wav_path);

/// Writes `ir` as 32-bit float WAV plus the `<stem>.json` sidecar.
void save_impulse_responses(const std::filesystem::path& wav_path, const ImpulseResponseSet& ir);

void write_model_csv(const std::filesystem::path& path, const std::vector<ModelRow>& rows);
void write_coherence_csv(const std::filesystem::path& path,
                         const std::vector<IntervalCoherence>& intervals);

// Subcommands. Each writes into cfg.output_dir and returns the primary
// output path.
std::filesystem::path cmd_model(const ExperimentConfig& cfg);
std::filesystem::path cmd_simulate(const ExperimentConfig& cfg);
std::filesystem::path cmd_estimate(const std::filesystem::path& wav_path,
                                   const ExperimentConfig& cfg);

/// simulate -> WAV round trip -> estimate -> model. Writes rir.wav,
/// comparison.csv, summary.json (and compare.gp when enabled).
ComparisonResult cmd_compare(const ExperimentConfig& cfg);

}  // namespace decaycoh
