#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "decaycoh/errors.hpp"
#include "decaycoh/wav_io.hpp"
#include "oracles.hpp"

using namespace decaycoh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "decaycoh_test_wav";
  fs::create_directories(dir);
  return dir / name;
}

WavData sample_data(std::size_t channels, std::size_t frames, WavSampleFormat format) {
  WavData d;
  d.sample_rate = 16000.0;
  d.format = format;
  for (std::size_t c = 0; c < channels; ++c) {
    auto x = oracle::white_noise(frames, 100 + c);
    for (auto& v : x) v = std::tanh(0.3 * v);
    d.channels.push_back(std::move(x));
  }
  return d;
}

}  // namespace

TEST_CASE("float formats round trip exactly") {
  auto d = sample_data(3, 500, WavSampleFormat::kFloat64);
  const auto p = scratch("f64.wav");
  write_wav(p, d);
  const auto back = read_wav(p);
  CHECK(back.format == WavSampleFormat::kFloat64);
  CHECK(back.sample_rate == 16000.0);
  CHECK(back.channels == d.channels);

  d.format = WavSampleFormat::kFloat32;
  for (auto& ch : d.channels) {
    for (auto& v : ch) v = static_cast<float>(v);
  }
  write_wav(p, d);
  CHECK(read_wav(p).channels == d.channels);
}

TEST_CASE("integer formats round trip within half a step") {
  for (auto [format, bits] : {std::pair{WavSampleFormat::kPcm16, 16},
                              std::pair{WavSampleFormat::kPcm24, 24},
                              std::pair{WavSampleFormat::kPcm32, 32}}) {
    const auto d = sample_data(2, 400, format);
    const auto p = scratch("pcm.wav");
    write_wav(p, d);
    const auto back = read_wav(p);
    CAPTURE(bits);
    CHECK(back.format == format);
    REQUIRE(back.channels.size() == 2);
    const double step = std::ldexp(1.0, 1 - bits);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < 400; ++i) {
        CHECK(std::abs(back.channels[c][i] - d.channels[c][i]) <= 0.5 * step + 1e-15);
      }
    }
  }
}

TEST_CASE("integer formats clip and keep sign") {
  WavData d;
  d.sample_rate = 8000.0;
  d.format = WavSampleFormat::kPcm16;
  d.channels = {{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}};
  const auto p = scratch("clip.wav");
  write_wav(p, d);
  const auto back = read_wav(p).channels[0];
  CHECK(back[0] == -1.0);
  CHECK(back[1] == -1.0);
  CHECK(back[2] == -0.5);
  CHECK(back[3] == 0.0);
  CHECK(back[4] == 0.5);
  CHECK(back[5] == 32767.0 / 32768.0);
  CHECK(back[6] == 32767.0 / 32768.0);
}

TEST_CASE("mono and many-channel files") {
  const auto p = scratch("mono.wav");
  const auto mono = sample_data(1, 10, WavSampleFormat::kFloat64);
  write_wav(p, mono);
  CHECK(read_wav(p).channels.size() == 1);
  const auto many = sample_data(16, 64, WavSampleFormat::kFloat32);
  write_wav(p, many);
  const auto back = read_wav(p);
  CHECK(back.channels.size() == 16);
  CHECK(back.channels[15].size() == 64);
}

TEST_CASE("plain 16-bit stereo header layout") {
  const auto p = scratch("stereo.wav");
  write_wav(p, sample_data(2, 4, WavSampleFormat::kPcm16));
  CHECK(fs::file_size(p) == 44 + 4 * 2 * 2);
}

TEST_CASE("unknown chunks are skipped") {
  const auto p = scratch("chunks.wav");
  write_wav(p, sample_data(2, 8, WavSampleFormat::kPcm16));
  std::ifstream in(p, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  // Insert a 3-byte LIST chunk (with pad byte) after the fmt chunk.
  const std::vector<char> extra = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, extra.begin(), extra.end());
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  const auto back = read_wav(p);
  CHECK(back.channels.size() == 2);
  CHECK(back.channels[0].size() == 8);
}

TEST_CASE("write errors") {
  WavData d;
  d.sample_rate = 16000.0;
  CHECK_THROWS_AS(write_wav(scratch("x.wav"), d), ValidationError);
  d.channels = {{0.0, 1.0}, {0.0}};
  CHECK_THROWS_AS(write_wav(scratch("x.wav"), d), ValidationError);
  d.channels = {{0.0}};
  d.sample_rate = 0.0;
  CHECK_THROWS_AS(write_wav(scratch("x.wav"), d), ValidationError);
  d.sample_rate = 16000.0;
  CHECK_THROWS_AS(write_wav(scratch("missing_dir") / "a" / "x.wav", d), IoError);
}

TEST_CASE("read errors") {
  CHECK_THROWS_AS(read_wav(scratch("does_not_exist.wav")), IoError);
  const auto p = scratch("garbage.wav");
  {
    std::ofstream out(p, std::ios::binary);
    out << "this is not audio at all";
  }
  CHECK_THROWS_AS(read_wav(p), IoError);
  {
    std::ofstream out(p, std::ios::binary);
    out.write("RIFF\x04\x00\x00\x00WAVE", 12);
  }
  CHECK_THROWS_AS(read_wav(p), IoError);
}
