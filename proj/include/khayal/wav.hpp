#ifndef KHAYAL_WAV_HPP
#define KHAYAL_WAV_HPP

// Minimal RIFF/WAVE support: mono 16-bit PCM or 32-bit float in, 32-bit
// float out.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "khayal/error.hpp"
#include "khayal/text.hpp"

namespace khayal {

struct MonoAudio {
  int sample_rate = 0;
  std::vector<float> samples;
  double duration() const { return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0; }
};

namespace detail {

inline std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
inline std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
inline void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}
inline void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

}  // namespace detail

inline MonoAudio decode_wav(std::string_view bytes) {
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(b, "RIFF", 4) != 0 || std::memcmp(b + 8, "WAVE", 4) != 0)
    throw ValidationError("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const std::uint32_t size = detail::le32(b + pos + 4);
    const std::size_t body = pos + 8;
    if (size > n - body) throw ValidationError("truncated WAV chunk");
    if (std::memcmp(b + pos, "fmt ", 4) == 0) {
      if (size < 16) throw ValidationError("WAV fmt chunk too short");
      format = detail::le16(b + body);
      channels = detail::le16(b + body + 2);
      rate = detail::le32(b + body + 4);
      bits = detail::le16(b + body + 14);
      if (format == 0xFFFE && size >= 26) format = detail::le16(b + body + 24);
      have_fmt = true;
    } else if (std::memcmp(b + pos, "data", 4) == 0) {
      if (!have_fmt) throw ValidationError("WAV data chunk before fmt chunk");
      if (channels != 1) throw ValidationError("expected mono WAV, found " + std::to_string(channels) + " channels");
      MonoAudio audio;
      audio.sample_rate = static_cast<int>(rate);
      const auto* d = b + body;
      if (format == 1 && bits == 16) {
        audio.samples.resize(size / 2);
        for (std::size_t i = 0; i < audio.samples.size(); ++i)
          audio.samples[i] = static_cast<float>(static_cast<std::int16_t>(detail::le16(d + 2 * i))) / 32768.0f;
      } else if (format == 3 && bits == 32) {
        audio.samples.resize(size / 4);
        for (std::size_t i = 0; i < audio.samples.size(); ++i) {
          const std::uint32_t u = detail::le32(d + 4 * i);
          std::memcpy(&audio.samples[i], &u, 4);
        }
      } else {
        throw ValidationError("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                              std::to_string(bits) + " bits)");
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw ValidationError("WAV file has no data chunk");
}

inline MonoAudio read_wav(const std::filesystem::path& p) {
  try {
    return decode_wav(text::read_file(p));
  } catch (const ValidationError& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

/// Mono IEEE float WAV bytes.
inline std::string encode_wav(const MonoAudio& audio) {
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 4);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put32(out, 16);
  detail::put16(out, 3);
  detail::put16(out, 1);
  detail::put32(out, static_cast<std::uint32_t>(audio.sample_rate));
  detail::put32(out, static_cast<std::uint32_t>(audio.sample_rate) * 4);
  detail::put16(out, 4);
  detail::put16(out, 32);
  out += "data";
  detail::put32(out, data_bytes);
  for (float s : audio.samples) {
    std::uint32_t u = 0;
    std::memcpy(&u, &s, 4);
    detail::put32(out, u);
  }
  return out;
}

/// 16-bit PCM encoding, used for fixtures that exercise the integer reader.
inline std::string encode_wav_pcm16(const MonoAudio& audio) {
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out += "RIFF";
  detail::put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put32(out, 16);
  detail::put16(out, 1);
  detail::put16(out, 1);
  detail::put32(out, static_cast<std::uint32_t>(audio.sample_rate));
  detail::put32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  detail::put16(out, 2);
  detail::put16(out, 16);
  out += "data";
  detail::put32(out, data_bytes);
  for (float s : audio.samples) {
    const float c = std::nearbyint(s * 32768.0f);
    const auto v = static_cast<std::int16_t>(c > 32767.0f ? 32767.0f : (c < -32768.0f ? -32768.0f : c));
    detail::put16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

inline void write_wav(const std::filesystem::path& p, const MonoAudio& audio) {
  text::write_file(p, encode_wav(audio));
}

}  // namespace khayal

#endif  // KHAYAL_WAV_HPP
