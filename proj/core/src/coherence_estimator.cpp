#include "decaycoh/coherence_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "decaycoh/errors.hpp"
#include "real_fft.hpp"

namespace decaycoh {
namespace {

constexpr double kAutoSpectrumFloor = 1e-30;
constexpr double kSpacingTolerance = 1e-9;

using Spectra = std::vector<std::vector<std::complex<double>>>;

Spectra transform_frames(std::span<const double> segment, const EstimationConfig& cfg,
                         const std::vector<double>& window, detail::RealFft& fft) {
  const std::size_t hop = hop_length(cfg);
  Spectra frames;
  if (segment.size() < cfg.window_length) return frames;
  const std::size_t count = (segment.size() - cfg.window_length) / hop + 1;
  frames.reserve(count);
  auto input = fft.input();
  for (std::size_t f = 0; f < count; ++f) {
    std::fill(input.begin(), input.end(), 0.0);
    const std::size_t offset = f * hop;
    for (std::size_t i = 0; i < cfg.window_length; ++i) {
      input[i] = segment[offset + i] * window[i];
    }
    auto& spectrum = frames.emplace_back(fft.bins());
    fft.execute(spectrum);
  }
  return frames;
}

}  // namespace

void validate_estimation_config(const EstimationConfig& cfg, double sample_rate) {
  if (!std::isfinite(cfg.overlap) || cfg.overlap < 0.0 || cfg.overlap >= 1.0) {
    throw ValidationError("overlap must lie in [0, 1)");
  }
  if (cfg.window_length == 0) throw ValidationError("window length must be > 0");
  if (cfg.window_length > cfg.dft_length) {
    throw ValidationError("window length must not exceed the DFT length");
  }
  if (!std::isfinite(cfg.interval_s) || cfg.interval_s <= 0.0) {
    throw ValidationError("interval length must be > 0");
  }
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    throw ValidationError("sample rate must be > 0");
  }
  if (interval_samples(cfg, sample_rate) < cfg.window_length) {
    throw ValidationError("an interval must hold at least one analysis window");
  }
  if (cfg.pair_policy == PairPolicy::kExplicit && cfg.pairs.empty()) {
    throw ValidationError("explicit pair policy needs at least one pair");
  }
}

std::size_t hop_length(const EstimationConfig& cfg) {
  const auto hop = static_cast<std::size_t>(
      std::lround(static_cast<double>(cfg.window_length) * (1.0 - cfg.overlap)));
  return std::max<std::size_t>(hop, 1);
}

std::size_t interval_samples(const EstimationConfig& cfg, double sample_rate) {
  return static_cast<std::size_t>(std::lround(cfg.interval_s * sample_rate));
}

std::vector<double> analysis_window(const EstimationConfig& cfg) {
  const std::size_t n = cfg.window_length;
  std::vector<double> w(n, 1.0);
  if (cfg.window == WindowType::kRectangular) return w;
  const double period =
      cfg.window == WindowType::kHann ? static_cast<double>(n) : static_cast<double>(n - 1);
  if (period <= 0.0) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / period);
  }
  return w;
}

std::vector<SampleRange> segment_intervals(const ImpulseResponseSet& ir,
                                           const EstimationConfig& cfg) {
  validate_estimation_config(cfg, ir.sample_rate);
  const std::size_t len = interval_samples(cfg, ir.sample_rate);
  const std::size_t count = ir.num_samples() / len;
  if (count == 0) {
    throw ValidationError("impulse response of " + std::to_string(ir.num_samples()) +
                          " samples is shorter than one interval of " + std::to_string(len));
  }
  std::vector<SampleRange> ranges;
  ranges.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ranges.push_back({i * len, (i + 1) * len});
  return ranges;
}

std::vector<std::vector<std::complex<double>>> stft_frames(std::span<const double> segment,
                                                           const EstimationConfig& cfg) {
  if (cfg.window_length == 0 || cfg.window_length > cfg.dft_length) {
    throw ValidationError("window length must be in [1, DFT length]");
  }
  if (segment.size() < cfg.window_length) {
    throw ValidationError("segment shorter than the analysis window");
  }
  detail::RealFft fft(cfg.dft_length);
  return transform_frames(segment, cfg, analysis_window(cfg), fft);
}

std::vector<std::pair<std::size_t, std::size_t>> select_pairs(const ImpulseResponseSet& ir,
                                                              const EstimationConfig& cfg) {
  const std::size_t n = ir.num_channels();
  if (n < 2) throw ValidationError("coherence estimation needs at least two channels");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (cfg.pair_policy == PairPolicy::kAdjacent) {
    for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  } else {
    pairs = cfg.pairs;
    for (const auto& [a, b] : pairs) {
      if (a >= n || b >= n || a == b) {
        throw ValidationError("pair (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") is invalid for " + std::to_string(n) + " channels");
      }
    }
  }
  if (!cfg.allow_mixed_spacing && ir.geometry && ir.geometry->mics.size() == n && pairs.size() > 1) {
    const auto& mics = ir.geometry->mics;
    auto offset = [&](const std::pair<std::size_t, std::size_t>& p) {
      return Point3{mics[p.second].x - mics[p.first].x, mics[p.second].y - mics[p.first].y,
                    mics[p.second].z - mics[p.first].z};
    };
    const Point3 reference = offset(pairs.front());
    for (const auto& p : pairs) {
      if (distance(offset(p), reference) > kSpacingTolerance) {
        throw ValidationError(
            "selected microphone pairs differ in spacing or orientation; set "
            "allow_mixed_spacing to average them anyway");
      }
    }
  }
  return pairs;
}

IntervalCoherence estimate_interval_coherence(const ImpulseResponseSet& ir, SampleRange range,
                                              const EstimationConfig& cfg, std::size_t index) {
  validate_impulse_responses(ir);
  validate_estimation_config(cfg, ir.sample_rate);
  const auto pairs = select_pairs(ir, cfg);
  if (range.end > ir.num_samples() || range.begin >= range.end) {
    throw ValidationError("sample range lies outside the impulse response");
  }
  if (range.size() < cfg.window_length) {
    throw ValidationError("interval holds no complete analysis frame");
  }

  detail::RealFft fft(cfg.dft_length);
  const auto window = analysis_window(cfg);
  std::vector<bool> needed(ir.num_channels(), false);
  for (const auto& [a, b] : pairs) needed[a] = needed[b] = true;
  std::vector<Spectra> spectra(ir.num_channels());
  for (std::size_t ch = 0; ch < ir.num_channels(); ++ch) {
    if (!needed[ch]) continue;
    std::span<const double> segment(ir.channels[ch].data() + range.begin, range.size());
    spectra[ch] = transform_frames(segment, cfg, window, fft);
  }

  const std::size_t bins = fft.bins();
  const std::size_t frames = spectra[pairs.front().first].size();
  std::vector<double> s11(bins, 0.0), s22(bins, 0.0), s12_re(bins, 0.0), s12_im(bins, 0.0);
  for (const auto& [a, b] : pairs) {
    for (std::size_t f = 0; f < frames; ++f) {
      const auto& x1 = spectra[a][f];
      const auto& x2 = spectra[b][f];
      for (std::size_t k = 0; k < bins; ++k) {
        const double a1 = x1[k].real(), b1 = x1[k].imag();
        const double a2 = x2[k].real(), b2 = x2[k].imag();
        // Same expression shape for auto and cross terms, so identical
        // channels give bit-identical Phi11 and Re Phi12.
        s11[k] += a1 * a1 + b1 * b1;
        s22[k] += a2 * a2 + b2 * b2;
        s12_re[k] += a1 * a2 + b1 * b2;
        s12_im[k] += a1 * b2 - b1 * a2;
      }
    }
  }

  IntervalCoherence out;
  out.index = index;
  out.t_start_s = static_cast<double>(range.begin) / ir.sample_rate;
  out.t_end_s = static_cast<double>(range.end) / ir.sample_rate;
  out.n_frames = frames;
  out.n_pairs = pairs.size();
  out.frequencies_hz.resize(bins);
  out.values.resize(bins);
  out.valid.resize(bins);
  const double count = static_cast<double>(frames * pairs.size());
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequencies_hz[k] =
        static_cast<double>(k) * ir.sample_rate / static_cast<double>(cfg.dft_length);
    const double p11 = s11[k] / count;
    const double p22 = s22[k] / count;
    if (p11 < kAutoSpectrumFloor || p22 < kAutoSpectrumFloor) {
      out.valid[k] = false;
      out.values[k] = {0.0, 0.0};
      continue;
    }
    std::complex<double> gamma{s12_re[k] / count, s12_im[k] / count};
    gamma /= std::sqrt(p11 * p22);
    // Cauchy-Schwarz holds for the averaged spectra; rounding may still
    // leave the magnitude an ulp above one.
    const double magnitude = std::abs(gamma);
    if (magnitude > 1.0) gamma /= magnitude;
    while (std::abs(gamma) > 1.0) gamma *= std::nextafter(1.0, 0.0);
    out.valid[k] = true;
    out.values[k] = gamma;
  }
  return out;
}

std::vector<IntervalCoherence> estimate_all(const ImpulseResponseSet& ir,
                                            const EstimationConfig& cfg) {
  const auto ranges = segment_intervals(ir, cfg);
  std::vector<IntervalCoherence> out;
  out.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    out.push_back(estimate_interval_coherence(ir, ranges[i], cfg, i));
  }
  return out;
}

}  // namespace decaycoh
