#ifndef KHAYAL_SWAR_HPP
#define KHAYAL_SWAR_HPP

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "khayal/error.hpp"

namespace khayal {

/// The twelve scale degrees in ascending order. Lowercase letters are the
/// komal (flat) forms; M is tivra Ma.
enum class Degree : int { S = 0, r, R, g, G, m, M, P, d, D, n, N };

inline constexpr std::array<char, 12> kDegreeLetters = {'S', 'r', 'R', 'g', 'G', 'm',
                                                       'M', 'P', 'd', 'D', 'n', 'N'};

inline std::optional<Degree> degree_from_letter(char c) {
  for (int i = 0; i < 12; ++i)
    if (kDegreeLetters[static_cast<std::size_t>(i)] == c) return static_cast<Degree>(i);
  return std::nullopt;
}

inline char degree_letter(Degree d) { return kDegreeLetters[static_cast<std::size_t>(d)]; }

/// A scale degree in one of three octaves: -1 mandra, 0 madhya, +1 taar.
///
/// ASCII spelling: a bare letter is madhya, a leading '.' marks mandra and a
/// trailing '\'' marks taar, e.g. ".n", "S", "S'".
struct SwarSymbol {
  Degree degree = Degree::S;
  int octave = 0;

  /// Position on the chromatic line, used for grid ordering.
  int semitone_index() const { return octave * 12 + static_cast<int>(degree); }

  friend bool operator==(const SwarSymbol&, const SwarSymbol&) = default;
  friend std::strong_ordering operator<=>(const SwarSymbol& a, const SwarSymbol& b) {
    return a.semitone_index() <=> b.semitone_index();
  }
};

inline std::string render(const SwarSymbol& s) {
  std::string out;
  if (s.octave < 0) out += '.';
  out += degree_letter(s.degree);
  if (s.octave > 0) out += '\'';
  return out;
}

/// Parses one token such as "P", ".n" or "S'". Returns nullopt for anything else.
inline std::optional<SwarSymbol> try_parse_swar(std::string_view tok) {
  int octave = 0;
  if (!tok.empty() && tok.front() == '.') {
    octave = -1;
    tok.remove_prefix(1);
  }
  if (!tok.empty() && tok.back() == '\'') {
    if (octave != 0) return std::nullopt;
    octave = 1;
    tok.remove_suffix(1);
  }
  if (tok.size() != 1) return std::nullopt;
  const auto d = degree_from_letter(tok.front());
  if (!d) return std::nullopt;
  return SwarSymbol{*d, octave};
}

inline SwarSymbol parse_swar(std::string_view tok) {
  if (auto s = try_parse_swar(tok)) return *s;
  throw ParseError("unknown swar token '" + std::string(tok) + "'");
}

/// Concatenated spelling of a symbol sequence, e.g. "SS.nS'". Octave marks
/// bind unambiguously, so no separator is needed.
inline std::string render_string(const std::vector<SwarSymbol>& seq) {
  std::string out;
  for (const auto& s : seq) out += render(s);
  return out;
}

inline std::vector<SwarSymbol> parse_string(std::string_view text) {
  std::vector<SwarSymbol> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    if (text[i] == '.') len = 2;
    else if (i + 1 < text.size() && text[i + 1] == '\'') len = 2;
    if (i + len > text.size()) throw ParseError("truncated swar string '" + std::string(text) + "'");
    out.push_back(parse_swar(text.substr(i, len)));
    i += len;
  }
  return out;
}

}  // namespace khayal

#endif  // KHAYAL_SWAR_HPP
