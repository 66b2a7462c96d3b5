#pragma once

#include <filesystem>
#include <vector>

namespace decaycoh {

enum class WavSampleFormat {
  kPcm16,
  kPcm24,
  kPcm32,
  kFloat32,
  kFloat64,
};

struct WavData {
  std::vector<std::vector<double>> channels;
  double sample_rate = 0.0;
  WavSampleFormat format = WavSampleFormat::kFloat32;
};

/// Writes interleaved little-endian WAV. Integer formats clip to [-1, 1).
/// Files with more than two channels or more than 16 bits per sample use
/// the WAVE_FORMAT_EXTENSIBLE header. Throws IoError on failure.
void write_wav(const std::filesystem::path& path, const WavData& data);

/// Reads 16/24/32-bit PCM and 32/64-bit float WAV, plain or extensible.
/// Integer samples are scaled to [-1, 1). Throws IoError for unreadable or
/// unsupported files.
WavData read_wav(const std::filesystem::path& path);

}  // namespace decaycoh
