#ifndef KHAYAL_NOTATION_HPP
#define KHAYAL_NOTATION_HPP

// Canonical bandish notation: one CSV file holding a header block and, per
// line of the composition, a notation row and a lyric row of exactly
// beats_per_cycle cells each.
//
//   bandish,raga,tala,beats_per_cycle
//   Ja Ja Re,Bhimpalasi,teentaal,16
//   m,s,P,s,n,(D)P,...        <- notation row
//   Jaa,-,Jaa,-,Re,Apne,...   <- lyric row
//
// Notation cells: swar tokens separated by spaces, an optional ornament in
// parentheses before them, `s` for a held note, empty for a rest. Lyric
// cells: one or more syllables, `-` for an extension of the previous
// syllable, empty for a rest.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "khayal/error.hpp"
#include "khayal/swar.hpp"
#include "khayal/text.hpp"

namespace khayal {

enum class CellKind { syllable, sustain, rest };

struct NotationCell {
  CellKind kind = CellKind::rest;
  /// Main notes. Empty for rests and for `s` sustains; a `-` lyric cell under
  /// written notes is a sustain that carries new notes for the held syllable.
  std::vector<SwarSymbol> swars;
  /// Grace/glide prefix. Kept for round-tripping, never used in similarity.
  std::vector<SwarSymbol> ornament;
  /// Lyric syllables as written (several when a beat holds more than one).
  std::vector<std::string> lyrics;
  /// Whether the lyric row spelled the extension as `-` (vs. left empty).
  bool lyric_dash = false;
  /// Whether the notation row spelled the hold as `s` (vs. left empty).
  bool note_s = false;
};

struct CanonicalSyllable {
  std::string label;  ///< unique within the line ("Jaa1", "Jaa2", "Re")
  std::string lyric;  ///< as written
  int beat_index = 0; ///< 0-based beat of the cycle holding the onset
  /// Onset position in beats from the start of the cycle. Equals beat_index
  /// except when several syllables share one beat.
  double position = 0.0;
  int allotted_beats = 1;
  /// Canonical length in beats; fractional for syllables sharing a beat.
  double span_beats = 1.0;
  std::vector<SwarSymbol> swars;
  std::vector<SwarSymbol> ornament;
  /// Notes per allotted beat; an empty entry holds the previous note.
  std::vector<std::vector<SwarSymbol>> beat_swars;
};

struct CanonicalLine {
  int line_index = 1;
  std::vector<NotationCell> cells;
  std::vector<CanonicalSyllable> syllables;

  int rest_count() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                          [](const NotationCell& c) { return c.kind == CellKind::rest; }));
  }

  const CanonicalSyllable* find(std::string_view label) const {
    for (const auto& s : syllables)
      if (s.label == label) return &s;
    return nullptr;
  }
};

struct CanonicalScore {
  std::string bandish_name;
  std::string raga_name;
  std::string tala_name;
  int beats_per_cycle = 16;
  std::vector<CanonicalLine> lines;
};

namespace detail {

inline std::string cell_where(std::size_t file_line, std::size_t cell) {
  return "file line " + std::to_string(file_line) + ", cell " + std::to_string(cell + 1);
}

inline std::vector<SwarSymbol> parse_swar_list(std::string_view text, std::size_t file_line,
                                               std::size_t cell) {
  std::vector<SwarSymbol> out;
  for (const auto& tok : text::split_ws(text)) {
    auto s = try_parse_swar(tok);
    if (!s) throw ParseError("unknown swar token '" + tok + "' at " + cell_where(file_line, cell));
    out.push_back(*s);
  }
  return out;
}

inline NotationCell classify_cell(std::string_view note, std::string_view lyric, std::size_t note_line,
                                  std::size_t lyric_line, std::size_t cell) {
  NotationCell c;
  note = text::trim(note);
  lyric = text::trim(lyric);
  c.lyric_dash = lyric == "-";

  if (note.empty() && lyric.empty()) return c;

  if (note == "s") {
    if (!lyric.empty() && !c.lyric_dash)
      throw ParseError("lyric syllable '" + std::string(lyric) + "' on a sustain cell at " +
                       cell_where(lyric_line, cell));
    c.kind = CellKind::sustain;
    c.note_s = true;
    return c;
  }

  if (!note.empty()) {
    if (note.front() == '(') {
      const auto close = note.find(')');
      if (close == std::string_view::npos)
        throw ParseError("unclosed ornament at " + cell_where(note_line, cell));
      c.ornament = parse_swar_list(note.substr(1, close - 1), note_line, cell);
      note = text::trim(note.substr(close + 1));
    }
    c.swars = parse_swar_list(note, note_line, cell);
    if (c.swars.empty()) throw ParseError("ornament without a main note at " + cell_where(note_line, cell));
  }

  if (c.lyric_dash) {
    c.kind = CellKind::sustain;
    return c;
  }
  if (lyric.empty())
    throw ParseError("note without a lyric syllable at " + cell_where(lyric_line, cell) +
                     " (use '-' to extend the previous syllable)");
  if (c.swars.empty())
    throw ParseError("lyric syllable '" + std::string(lyric) + "' without a note at " +
                     cell_where(note_line, cell));
  c.kind = CellKind::syllable;
  c.lyrics = text::split_ws(lyric);
  if (c.lyrics.size() > c.swars.size())
    throw ParseError("more syllables than notes at " + cell_where(note_line, cell));
  return c;
}

/// Derives syllables from classified cells: sustains attach to the closest
/// preceding syllable, repeated lyrics get ordinal suffixes.
inline std::vector<CanonicalSyllable> derive_syllables(const std::vector<NotationCell>& cells,
                                                       int line_index) {
  std::vector<CanonicalSyllable> out;
  bool open = false;  // a syllable is currently extendable
  for (std::size_t b = 0; b < cells.size(); ++b) {
    const auto& c = cells[b];
    switch (c.kind) {
      case CellKind::rest:
        open = false;
        break;
      case CellKind::sustain:
        if (!open)
          throw ParseError("line " + std::to_string(line_index) + ": sustain at beat " +
                           std::to_string(b + 1) + " has no preceding syllable");
        out.back().allotted_beats += 1;
        out.back().span_beats += 1.0;
        out.back().beat_swars.push_back(c.swars);
        break;
      case CellKind::syllable: {
        const std::size_t k = c.lyrics.size();
        const std::size_t base = c.swars.size() / k;
        const std::size_t extra = c.swars.size() % k;
        std::size_t next = 0;
        for (std::size_t j = 0; j < k; ++j) {
          const std::size_t take = base + (j < extra ? 1 : 0);
          CanonicalSyllable s;
          s.lyric = c.lyrics[j];
          s.beat_index = static_cast<int>(b);
          s.position = static_cast<double>(b) + static_cast<double>(j) / static_cast<double>(k);
          s.allotted_beats = 1;
          s.span_beats = 1.0 / static_cast<double>(k);
          s.swars.assign(c.swars.begin() + static_cast<std::ptrdiff_t>(next),
                         c.swars.begin() + static_cast<std::ptrdiff_t>(next + take));
          if (j == 0) s.ornament = c.ornament;
          s.beat_swars.push_back(s.swars);
          next += take;
          out.push_back(std::move(s));
        }
        open = true;
        break;
      }
    }
  }

  std::map<std::string, int> total, seen;
  for (const auto& s : out) ++total[s.lyric];
  for (auto& s : out) {
    s.label = s.lyric;
    if (total[s.lyric] > 1) s.label += std::to_string(++seen[s.lyric]);
  }
  return out;
}

inline std::string render_swar_list(const std::vector<SwarSymbol>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += render(v[i]);
  }
  return out;
}

}  // namespace detail

inline CanonicalScore parse_notation(std::string_view source) {
  const auto rows = text::parse_csv(source);
  if (rows.size() < 2) throw ParseError("notation file needs a header row and a values row");

  const std::vector<std::string> expected_header{"bandish", "raga", "tala", "beats_per_cycle"};
  if (rows[0].cells != expected_header)
    throw ParseError("file line " + std::to_string(rows[0].line) +
                     ": expected header 'bandish,raga,tala,beats_per_cycle'");
  const auto& meta = rows[1];
  if (meta.cells.size() != 4)
    throw ParseError("file line " + std::to_string(meta.line) + ": header values need 4 cells");

  CanonicalScore score;
  score.bandish_name = meta.cells[0];
  score.raga_name = meta.cells[1];
  score.tala_name = meta.cells[2];
  long long bpc = 0;
  if (!text::parse_int(meta.cells[3], bpc) || bpc <= 0 || bpc % 2 != 0)
    throw ParseError("file line " + std::to_string(meta.line) +
                     ": beats_per_cycle must be a positive even integer");
  score.beats_per_cycle = static_cast<int>(bpc);
  if (score.tala_name == "teentaal" && score.beats_per_cycle != 16)
    throw ParseError("teentaal has 16 beats per cycle, header says " + meta.cells[3]);

  if ((rows.size() - 2) % 2 != 0)
    throw ParseError("file line " + std::to_string(rows.back().line) +
                     ": notation row without a matching lyric row");

  const auto width = static_cast<std::size_t>(score.beats_per_cycle);
  for (std::size_t r = 2; r < rows.size(); r += 2) {
    const auto& note_row = rows[r];
    const auto& lyric_row = rows[r + 1];
    const int line_index = static_cast<int>((r - 2) / 2 + 1);
    for (const auto* row : {&note_row, &lyric_row}) {
      if (row->cells.size() != width)
        throw ParseError("line " + std::to_string(line_index) + " (file line " + std::to_string(row->line) +
                         "): expected " + std::to_string(width) + " cells, found " +
                         std::to_string(row->cells.size()));
    }
    CanonicalLine line;
    line.line_index = line_index;
    for (std::size_t c = 0; c < width; ++c)
      line.cells.push_back(
          detail::classify_cell(note_row.cells[c], lyric_row.cells[c], note_row.line, lyric_row.line, c));
    line.syllables = detail::derive_syllables(line.cells, line_index);
    score.lines.push_back(std::move(line));
  }
  return score;
}

/// Writes a score back in the notation file format.
inline std::string serialize_notation(const CanonicalScore& score) {
  std::string out = "bandish,raga,tala,beats_per_cycle\n";
  out += score.bandish_name + ',' + score.raga_name + ',' + score.tala_name + ',' +
         std::to_string(score.beats_per_cycle) + '\n';
  for (const auto& line : score.lines) {
    std::string notes, lyrics;
    for (std::size_t c = 0; c < line.cells.size(); ++c) {
      const auto& cell = line.cells[c];
      if (c) {
        notes += ',';
        lyrics += ',';
      }
      if (cell.kind == CellKind::rest) continue;
      if (cell.kind == CellKind::sustain && cell.swars.empty()) {
        if (cell.note_s) notes += 's';
      } else {
        if (!cell.ornament.empty()) notes += '(' + detail::render_swar_list(cell.ornament) + ')';
        notes += detail::render_swar_list(cell.swars);
      }
      if (cell.kind == CellKind::sustain) {
        if (cell.lyric_dash) lyrics += '-';
      } else {
        for (std::size_t i = 0; i < cell.lyrics.size(); ++i) {
          if (i) lyrics += ' ';
          lyrics += cell.lyrics[i];
        }
      }
    }
    out += notes + '\n' + lyrics + '\n';
  }
  return out;
}

/// Syllables of one line in canonical (onset) order.
inline const std::vector<CanonicalSyllable>& canonical_positions(const CanonicalScore& score,
                                                                 int line_index) {
  if (line_index < 1 || line_index > static_cast<int>(score.lines.size()))
    throw NotFoundError("line " + std::to_string(line_index) + " not in '" + score.bandish_name + "' (" +
                        std::to_string(score.lines.size()) + " lines)");
  return score.lines[static_cast<std::size_t>(line_index - 1)].syllables;
}

inline const CanonicalLine& line_of(const CanonicalScore& score, int line_index) {
  canonical_positions(score, line_index);
  return score.lines[static_cast<std::size_t>(line_index - 1)];
}

}  // namespace khayal

#endif  // KHAYAL_NOTATION_HPP
