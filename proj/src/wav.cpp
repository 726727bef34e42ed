// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "aenr/error.hpp"

namespace aenr {

namespace {

std::uint32_t u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}
std::uint16_t u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

}  // namespace

Audio read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> b((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw FormatError("'" + name + "' is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const unsigned char* chunk = b.data() + pos;
    const std::size_t len = u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(len, b.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw FormatError("'" + name + "': fmt chunk too short");
      format = u16(b.data() + body);
      channels = u16(b.data() + body + 2);
      rate = u32(b.data() + body + 4);
      bits = u16(b.data() + body + 14);
      if (format == kFormatExtensible && avail >= 26) format = u16(b.data() + body + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = b.data() + body;
      data_bytes = avail;
    }
    pos = body + len + (len & 1);
  }
  if (format == 0) throw FormatError("'" + name + "': missing fmt chunk");
  if (!data) throw FormatError("'" + name + "': missing data chunk");
  if (channels != 1) throw FormatError("'" + name + "': expected mono, got " + std::to_string(channels) + " channels");

  Audio out;
  out.sample_rate = rate;
  if (format == kFormatPcm && bits == 16) {
    out.samples.resize(data_bytes / 2);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      out.samples[i] = static_cast<std::int16_t>(u16(data + 2 * i)) / 32768.0;
  } else if (format == kFormatFloat && bits == 32) {
    out.samples.resize(data_bytes / 4);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      out.samples[i] = static_cast<double>(std::bit_cast<float>(u32(data + 4 * i)));
  } else {
    throw FormatError("'" + name + "': unsupported encoding (format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits); need 16-bit PCM or 32-bit float");
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const Audio& audio, WavEncoding enc) {
  const bool is_float = enc == WavEncoding::kFloat32;
  const std::uint16_t bytes_per_sample = is_float ? 4 : 2;
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * bytes_per_sample);
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * bytes_per_sample);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out += "data";
  put_u32(out, data_bytes);
  for (double s : audio.samples) {
    if (is_float) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    } else {
      const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write to '" + path.string() + "'");
}

}  // namespace aenr
