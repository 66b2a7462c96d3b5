#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "decaycoh/rir_sim.hpp"

namespace decaycoh {

enum class WindowType {
  kHann,           // periodic Hann, the usual choice for Welch estimates
  kHannSymmetric,  // symmetric Hann; time reversal maps frames onto frames
  kRectangular,
};

enum class PairPolicy {
  kAdjacent,  // (0,1), (1,2), ...
  kExplicit,  // EstimationConfig::pairs
};

struct EstimationConfig {
  double interval_s = 0.1;
  std::size_t window_length = 1024;
  double overlap = 0.75;
  std::size_t dft_length = 1024;
  WindowType window = WindowType::kHann;
  PairPolicy pair_policy = PairPolicy::kAdjacent;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  // Averaging assumes every pair has the same spacing vector; set to accept
  // arrays where that does not hold.
  bool allow_mixed_spacing = false;
};

/// Throws ValidationError unless 0 <= overlap < 1, window <= DFT length and
/// an interval holds at least one window at `sample_rate`.
void validate_estimation_config(const EstimationConfig& cfg, double sample_rate);

std::size_t hop_length(const EstimationConfig& cfg);
std::size_t interval_samples(const EstimationConfig& cfg, double sample_rate);

/// Analysis window of `cfg.window_length` samples.
std::vector<double> analysis_window(const EstimationConfig& cfg);

struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - begin; }
  bool operator==(const SampleRange&) const = default;
};

struct IntervalCoherence {
  std::size_t index = 0;
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  std::vector<double> frequencies_hz;
  std::vector<std::complex<double>> values;
  std::vector<bool> valid;  // false where an auto-spectrum vanished
  std::size_t n_frames = 0;  // frames per channel
  std::size_t n_pairs = 0;
};

/// Consecutive non-overlapping intervals; a trailing partial interval is
/// dropped. Throws ValidationError if not even one interval fits.
std::vector<SampleRange> segment_intervals(const ImpulseResponseSet& ir,
                                           const EstimationConfig& cfg);

/// Windowed, zero-padded frames at hop window * (1 - overlap); bins
/// 0 .. dft/2 of each frame.
std::vector<std::vector<std::complex<double>>> stft_frames(std::span<const double> segment,
                                                           const EstimationConfig& cfg);

/// Microphone pairs selected by the config for an array of `n_channels`.
std::vector<std::pair<std::size_t, std::size_t>> select_pairs(const ImpulseResponseSet& ir,
                                                              const EstimationConfig& cfg);

/// Averages auto- and cross-spectra over every frame in `range` and every
/// selected pair, then forms Phi12 / sqrt(Phi11 Phi22) with
/// Phi12 = E[conj(X1) X2]. The magnitude never exceeds 1.
IntervalCoherence estimate_interval_coherence(const ImpulseResponseSet& ir, SampleRange range,
                                              const EstimationConfig& cfg,
                                              std::size_t index = 0);

std::vector<IntervalCoherence> estimate_all(const ImpulseResponseSet& ir,
                                            const EstimationConfig& cfg);

}  // namespace decaycoh
