#ifndef KHAYAL_RAGA_HPP
#define KHAYAL_RAGA_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "khayal/error.hpp"
#include "khayal/swar.hpp"
#include "khayal/text.hpp"

namespace khayal {

/// Reference pitch (Sa) of a performance.
class Tonic {
 public:
  explicit Tonic(double hz) : hz_(hz) {
    if (!(std::isfinite(hz) && hz > 0.0)) throw DomainError("tonic must be finite and positive");
  }
  double hz() const { return hz_; }

 private:
  double hz_;
};

inline double hz_to_cents(double f0, const Tonic& tonic) {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw DomainError("frequency must be positive, got " + text::format_double(f0));
  return 1200.0 * std::log2(f0 / tonic.hz());
}

inline double cents_to_hz(double cents, const Tonic& tonic) {
  return tonic.hz() * std::exp2(cents / 1200.0);
}

struct GridPoint {
  SwarSymbol swar;
  double cents = 0.0;
};

/// The notes of a raga laid out over three octaves in cents above the tonic.
/// Intonation defaults to 12-TET (degree index x 100 cents); individual
/// degrees can be retuned.
class RagaScale {
 public:
  RagaScale(std::string name, std::vector<Degree> degrees, std::map<Degree, double> cents_overrides = {})
      : name_(std::move(name)), degrees_(std::move(degrees)), overrides_(std::move(cents_overrides)) {
    if (degrees_.empty()) throw ConfigError("raga '" + name_ + "' has no swars");
    for (const auto& [d, c] : overrides_) {
      if (std::find(degrees_.begin(), degrees_.end(), d) == degrees_.end())
        throw ConfigError("raga '" + name_ + "': cents override for absent swar " + degree_letter(d));
      if (!(c >= 0.0 && c < 1200.0))
        throw ConfigError("raga '" + name_ + "': override cents must lie in [0, 1200)");
    }
    for (std::size_t i = 1; i < degrees_.size(); ++i)
      if (!(base_cents(degrees_[i - 1]) < base_cents(degrees_[i])))
        throw ConfigError("raga '" + name_ + "': swars must be strictly ascending in cents");
    for (int octave = -1; octave <= 1; ++octave)
      for (auto d : degrees_) grid_.push_back({SwarSymbol{d, octave}, base_cents(d) + 1200.0 * octave});
  }

  const std::string& name() const { return name_; }
  const std::vector<Degree>& degrees() const { return degrees_; }
  const std::map<Degree, double>& overrides() const { return overrides_; }
  const std::vector<GridPoint>& grid() const { return grid_; }

  double base_cents(Degree d) const {
    auto it = overrides_.find(d);
    return it != overrides_.end() ? it->second : 100.0 * static_cast<int>(d);
  }

  bool contains(const SwarSymbol& s) const {
    return s.octave >= -1 && s.octave <= 1 &&
           std::find(degrees_.begin(), degrees_.end(), s.degree) != degrees_.end();
  }

  double cents_of(const SwarSymbol& s) const {
    if (!contains(s)) throw DomainError("swar " + render(s) + " is not in raga " + name_);
    return base_cents(s.degree) + 1200.0 * s.octave;
  }

  /// Grid position of a symbol (0 = lowest mandra note).
  std::size_t grid_index(const SwarSymbol& s) const {
    for (std::size_t i = 0; i < grid_.size(); ++i)
      if (grid_[i].swar == s) return i;
    throw DomainError("swar " + render(s) + " is not in raga " + name_);
  }

 private:
  std::string name_;
  std::vector<Degree> degrees_;
  std::map<Degree, double> overrides_;
  std::vector<GridPoint> grid_;
};

/// Nearest grid note; an exact midpoint goes to the lower note. Values more
/// than 600 cents beyond the outermost grid notes are rejected.
inline SwarSymbol quantize_cents(double c, const RagaScale& scale) {
  const auto& g = scale.grid();
  if (!std::isfinite(c)) throw DomainError("cents value is not finite");
  if (c < g.front().cents - 600.0)
    throw OutOfRangeError(text::format_double(c) + " cents is below the grid (lowest note " +
                          render(g.front().swar) + ")");
  if (c > g.back().cents + 600.0)
    throw OutOfRangeError(text::format_double(c) + " cents is above the grid (highest note " +
                          render(g.back().swar) + ")");
  auto hi = std::lower_bound(g.begin(), g.end(), c, [](const GridPoint& p, double v) { return p.cents < v; });
  if (hi == g.begin()) return hi->swar;
  if (hi == g.end()) return g.back().swar;
  auto lo = std::prev(hi);
  return (hi->cents - c) < (c - lo->cents) ? hi->swar : lo->swar;
}

inline RagaScale bhimpalasi() {
  using enum Degree;
  return RagaScale("Bhimpalasi", {S, R, g, m, P, D, n});
}

inline RagaScale yaman() {
  using enum Degree;
  return RagaScale("Yaman", {S, R, G, M, P, D, N});
}

/// Raga definition file:
///
///   name = Bhimpalasi
///   swars = S R g m P D n
///   cents = g:294 n:996      (optional)
inline RagaScale parse_raga(std::string_view source) {
  std::string name;
  std::vector<Degree> degrees;
  std::map<Degree, double> overrides;
  bool have_swars = false;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(source, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("raga file line " + std::to_string(line_no) + ": expected key = value");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key == "name") {
      name = value;
    } else if (key == "swars") {
      have_swars = true;
      for (const auto& tok : text::split_ws(value)) {
        if (tok.size() != 1 || !degree_from_letter(tok[0]))
          throw ParseError("raga file line " + std::to_string(line_no) + ": unknown swar '" + tok + "'");
        degrees.push_back(*degree_from_letter(tok[0]));
      }
    } else if (key == "cents") {
      for (const auto& tok : text::split_ws(value)) {
        const auto colon = tok.find(':');
        double c = 0.0;
        if (colon != 1 || !degree_from_letter(tok[0]) || !text::parse_double(tok.substr(2), c))
          throw ParseError("raga file line " + std::to_string(line_no) + ": bad cents override '" + tok + "'");
        overrides[*degree_from_letter(tok[0])] = c;
      }
    } else {
      throw ParseError("raga file line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (name.empty() || !have_swars) throw ParseError("raga file needs 'name' and 'swars'");
  return RagaScale(name, degrees, overrides);
}

}  // namespace khayal

#endif  // KHAYAL_RAGA_HPP
