#include "decaycoh/wav_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "decaycoh/errors.hpp"

namespace decaycoh {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// Tail of the KSDATAFORMAT_SUBTYPE GUIDs; the first two bytes carry the
// plain format code.
constexpr std::array<std::uint8_t, 14> kSubformatTail = {
    0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80, 0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};

struct Layout {
  std::uint16_t code;
  std::uint16_t bits;
};

Layout layout_of(WavSampleFormat f) {
  switch (f) {
    case WavSampleFormat::kPcm16: return {kFormatPcm, 16};
    case WavSampleFormat::kPcm24: return {kFormatPcm, 24};
    case WavSampleFormat::kPcm32: return {kFormatPcm, 32};
    case WavSampleFormat::kFloat32: return {kFormatFloat, 32};
    case WavSampleFormat::kFloat64: return {kFormatFloat, 64};
  }
  throw ValidationError("unknown WAV sample format");
}

class ByteWriter {
 public:
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void tag(const char* s) { bytes_.insert(bytes_.end(), s, s + 4); }
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::vector<char>& bytes() { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::vector<char>& bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}
  std::uint64_t get(int n) {
    if (pos_ + static_cast<std::size_t>(n) > end_) throw IoError("truncated WAV chunk");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }

 private:
  const std::vector<char>& bytes_;
  std::size_t pos_;
  std::size_t end_;
};

std::int64_t quantize(double v, int bits) {
  const double scale = std::ldexp(1.0, bits - 1);
  const double q = std::round(std::clamp(v, -1.0, 1.0) * scale);
  return static_cast<std::int64_t>(std::clamp(q, -scale, scale - 1.0));
}

}  // namespace

void write_wav(const std::filesystem::path& path, const WavData& data) {
  const std::size_t n_channels = data.channels.size();
  if (n_channels == 0 || n_channels > 0xFFFF) throw ValidationError("WAV needs 1..65535 channels");
  const std::size_t frames = data.channels.front().size();
  for (const auto& ch : data.channels) {
    if (ch.size() != frames) throw ValidationError("WAV channels must have equal length");
  }
  if (!(data.sample_rate > 0.0) || data.sample_rate > 4.0e9) {
    throw ValidationError("WAV sample rate out of range");
  }
  const Layout layout = layout_of(data.format);
  const std::size_t block = n_channels * layout.bits / 8;
  const std::size_t data_bytes = frames * block;
  const bool extensible = n_channels > 2 || layout.bits > 16;
  const std::uint32_t fmt_size = extensible ? 40 : 16;
  if (data_bytes + 36 + fmt_size > 0xFFFFFFFFull) throw ValidationError("WAV data exceeds 4 GiB");

  ByteWriter w;
  w.tag("RIFF");
  w.u32(static_cast<std::uint32_t>(4 + 8 + fmt_size + 8 + data_bytes));
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(fmt_size);
  w.u16(extensible ? kFormatExtensible : layout.code);
  w.u16(static_cast<std::uint16_t>(n_channels));
  const auto rate = static_cast<std::uint32_t>(std::lround(data.sample_rate));
  w.u32(rate);
  w.u32(static_cast<std::uint32_t>(rate * block));
  w.u16(static_cast<std::uint16_t>(block));
  w.u16(layout.bits);
  if (extensible) {
    w.u16(22);
    w.u16(layout.bits);
    w.u32(0);  // no speaker mapping
    w.u16(layout.code);
    for (std::uint8_t b : kSubformatTail) w.put(b, 1);
  }
  w.tag("data");
  w.u32(static_cast<std::uint32_t>(data_bytes));
  auto& bytes = w.bytes();
  bytes.reserve(bytes.size() + data_bytes);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : data.channels) {
      const double v = ch[i];
      switch (data.format) {
        case WavSampleFormat::kFloat32:
          w.put(std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
          break;
        case WavSampleFormat::kFloat64:
          w.put(std::bit_cast<std::uint64_t>(v), 8);
          break;
        default:
          w.put(static_cast<std::uint64_t>(quantize(v, layout.bits)), layout.bits / 8);
          break;
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError(path.string() + " is not a RIFF/WAVE file");
  }

  std::uint16_t code = 0, n_channels = 0, bits = 0, block = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_size = 0;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    ByteReader header(bytes, pos, bytes.size());
    char id[4];
    std::memcpy(id, bytes.data() + pos, 4);
    header.get(4);
    const std::size_t size = header.u32();
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(size, bytes.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      ByteReader fmt(bytes, body, body + available);
      code = fmt.u16();
      n_channels = fmt.u16();
      rate = fmt.u32();
      fmt.u32();  // byte rate
      block = fmt.u16();
      bits = fmt.u16();
      if (code == kFormatExtensible) {
        if (fmt.u16() < 22) throw IoError("malformed WAVE_FORMAT_EXTENSIBLE header");
        fmt.u16();  // valid bits
        fmt.u32();  // channel mask
        code = fmt.u16();
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_pos = body;
      data_size = available;
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) throw IoError(path.string() + " lacks a fmt or data chunk");
  if (n_channels == 0 || rate == 0) throw IoError(path.string() + " has an empty format");

  WavData out;
  out.sample_rate = rate;
  if (code == kFormatPcm && bits == 16) {
    out.format = WavSampleFormat::kPcm16;
  } else if (code == kFormatPcm && bits == 24) {
    out.format = WavSampleFormat::kPcm24;
  } else if (code == kFormatPcm && bits == 32) {
    out.format = WavSampleFormat::kPcm32;
  } else if (code == kFormatFloat && bits == 32) {
    out.format = WavSampleFormat::kFloat32;
  } else if (code == kFormatFloat && bits == 64) {
    out.format = WavSampleFormat::kFloat64;
  } else {
    throw IoError(path.string() + ": unsupported WAV encoding (format " + std::to_string(code) +
                  ", " + std::to_string(bits) + " bits)");
  }
  const std::size_t sample_bytes = bits / 8;
  if (block != n_channels * sample_bytes) throw IoError(path.string() + ": inconsistent block size");
  const std::size_t frames = data_size / block;
  out.channels.assign(n_channels, std::vector<double>(frames));
  ByteReader reader(bytes, data_pos, data_pos + frames * block);
  const double int_scale = 1.0 / std::ldexp(1.0, bits - 1);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      const std::uint64_t raw = reader.get(static_cast<int>(sample_bytes));
      double v = 0.0;
      switch (out.format) {
        case WavSampleFormat::kFloat32:
          v = std::bit_cast<float>(static_cast<std::uint32_t>(raw));
          break;
        case WavSampleFormat::kFloat64:
          v = std::bit_cast<double>(raw);
          break;
        default: {
          // Sign-extend from `bits`.
          const int shift = 64 - bits;
          const auto s = static_cast<std::int64_t>(raw << shift) >> shift;
          v = static_cast<double>(s) * int_scale;
          break;
        }
      }
      out.channels[c][i] = v;
    }
  }
  return out;
}

}  // namespace decaycoh
