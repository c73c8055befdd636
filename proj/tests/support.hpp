#ifndef KHAYAL_TESTS_SUPPORT_HPP
#define KHAYAL_TESTS_SUPPORT_HPP

// Shared fixtures and random generators for the test suites.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "khayal/swar.hpp"

namespace khayal::testkit {

inline const std::filesystem::path kDataDir = KHAYAL_DATA_DIR;
inline const std::filesystem::path kSyntheticDir = kDataDir / "synthetic";

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("khayal_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::vector<float> sine(double hz, double seconds, int sample_rate, double amplitude = 0.5,
                               double phase = 0.0) {
  std::vector<float> out(static_cast<std::size_t>(std::llround(seconds * sample_rate)));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) /
                                                     sample_rate + phase));
  return out;
}

/// Random string over the given alphabet.
inline std::vector<SwarSymbol> random_string(std::mt19937_64& rng, std::size_t len,
                                             const std::vector<SwarSymbol>& alphabet) {
  std::vector<SwarSymbol> s(len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (auto& x : s) x = alphabet[pick(rng)];
  return s;
}

inline std::vector<SwarSymbol> alphabet3() {
  return {SwarSymbol{Degree::S, 0}, SwarSymbol{Degree::R, 0}, SwarSymbol{Degree::g, 0}};
}

/// Every string of length 0..max_len over `alphabet`.
inline std::vector<std::vector<SwarSymbol>> all_strings(const std::vector<SwarSymbol>& alphabet,
                                                        std::size_t max_len) {
  std::vector<std::vector<SwarSymbol>> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& a : alphabet) {
        auto s = out[i];
        s.push_back(a);
        out.push_back(std::move(s));
      }
    begin = end;
  }
  return out;
}

}  // namespace khayal::testkit

#endif  // KHAYAL_TESTS_SUPPORT_HPP
