#ifndef KHAYAL_ANNOTATION_IO_HPP
#define KHAYAL_ANNOTATION_IO_HPP

// Per-performance annotation files and the dataset manifest.
//
// A dataset root looks like
//
//   manifest.json
//   notation/<bandish>.csv        canonical notation (see notation.hpp)
//   ragas/<raga>.raga             raga definitions (see raga.hpp)
//   performances/<concert_id>/
//     performance.meta            key = value: concert_id, artist_id, bandish,
//                                 tonic_hz, optional tempo_min/tempo_max
//     beats.csv                   time_s,kind        (kind: sam | khali)
//     onsets.csv                  line,repetition,syllable_label,onset_s
//     silences.csv                start_s,end_s
//     pitch.csv                   time_s,f0_hz       (optional, 0 = unvoiced)
//     audio.wav                   (optional, mono)

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "khayal/error.hpp"
#include "khayal/notation.hpp"
#include "khayal/pitchtrack.hpp"
#include "khayal/raga.hpp"
#include "khayal/text.hpp"

namespace khayal {

namespace fs = std::filesystem;

enum class BeatKind { sam, khali };

inline const char* to_string(BeatKind k) { return k == BeatKind::sam ? "sam" : "khali"; }

struct BeatMark {
  double time = 0.0;
  BeatKind kind = BeatKind::sam;
  friend bool operator==(const BeatMark&, const BeatMark&) = default;
};

struct Onset {
  std::string label;
  double time = 0.0;
  friend bool operator==(const Onset&, const Onset&) = default;
};

struct Silence {
  double start = 0.0;
  double end = 0.0;
  friend bool operator==(const Silence&, const Silence&) = default;
};

struct LineRendition {
  int line_index = 1;
  int repetition_index = 1;
  std::vector<Onset> onsets;
  /// Silences starting inside [first onset, end_time).
  std::vector<Silence> silences;
  /// Next rendition's first onset, or the last beat mark.
  double end_time = 0.0;
  friend bool operator==(const LineRendition&, const LineRendition&) = default;
};

/// Tempo in matra (beats) per minute.
struct TempoRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const TempoRange&, const TempoRange&) = default;
};

struct PerformanceAnnotation {
  std::string concert_id;
  std::string artist_id;
  std::string bandish_name;
  double tonic_hz = 0.0;
  TempoRange tempo_range;
  std::vector<BeatMark> beat_marks;
  std::vector<LineRendition> renditions;  ///< chronological
  std::optional<PitchContour> pitch;
  std::optional<fs::path> audio_path;

  Tonic tonic() const { return Tonic(tonic_hz); }

  friend bool operator==(const PerformanceAnnotation& a, const PerformanceAnnotation& b) {
    auto same_pitch = [](const std::optional<PitchContour>& x, const std::optional<PitchContour>& y) {
      if (x.has_value() != y.has_value()) return false;
      return !x || (x->hop == y->hop && x->start_time == y->start_time && x->frames == y->frames);
    };
    return a.concert_id == b.concert_id && a.artist_id == b.artist_id && a.bandish_name == b.bandish_name &&
           a.tonic_hz == b.tonic_hz && a.tempo_range == b.tempo_range && a.beat_marks == b.beat_marks &&
           a.renditions == b.renditions && same_pitch(a.pitch, b.pitch);
  }
};

namespace detail {

inline std::string at_row(const std::string& file, std::size_t line) {
  return file + " line " + std::to_string(line);
}

inline void expect_header(const std::vector<text::Row>& rows, const std::string& file,
                          const std::vector<std::string>& header) {
  if (rows.empty() || rows.front().cells != header) {
    std::string h;
    for (const auto& c : header) h += (h.empty() ? "" : ",") + c;
    throw ValidationError(file + ": expected header '" + h + "'");
  }
}

inline double need_double(const std::string& cell, const std::string& file, std::size_t line) {
  double v = 0.0;
  if (!text::parse_double(cell, v)) throw ValidationError(at_row(file, line) + ": not a number: '" + cell + "'");
  return v;
}

inline int need_int(const std::string& cell, const std::string& file, std::size_t line) {
  long long v = 0;
  if (!text::parse_int(cell, v)) throw ValidationError(at_row(file, line) + ": not an integer: '" + cell + "'");
  return static_cast<int>(v);
}

inline std::map<std::string, std::string> parse_meta(const std::string& content, const std::string& file) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(at_row(file, line_no) + ": expected key = value");
    kv[std::string(text::trim(line.substr(0, eq)))] = std::string(text::trim(line.substr(eq + 1)));
  }
  return kv;
}

}  // namespace detail

/// Half-cycle tempo range implied by consecutive beat marks.
inline TempoRange tempo_from_marks(const std::vector<BeatMark>& marks, int beats_per_cycle = 16) {
  TempoRange r{0.0, 0.0};
  const double half = beats_per_cycle / 2.0;
  for (std::size_t i = 1; i < marks.size(); ++i) {
    const double t = half * 60.0 / (marks[i].time - marks[i - 1].time);
    if (i == 1 || t < r.min) r.min = t;
    if (i == 1 || t > r.max) r.max = t;
  }
  return r;
}

inline std::vector<BeatMark> parse_beats(const std::string& content, const std::string& file = "beats.csv") {
  const auto rows = text::parse_csv(content);
  detail::expect_header(rows, file, {"time_s", "kind"});
  std::vector<BeatMark> marks;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 2) throw ValidationError(detail::at_row(file, r.line) + ": expected 2 cells");
    BeatMark m;
    m.time = detail::need_double(r.cells[0], file, r.line);
    if (m.time < 0.0) throw ValidationError(detail::at_row(file, r.line) + ": negative time");
    const auto& k = r.cells[1];
    if (k == "sam" || k == "x") m.kind = BeatKind::sam;
    else if (k == "khali" || k == "o") m.kind = BeatKind::khali;
    else throw ValidationError(detail::at_row(file, r.line) + ": beat kind must be sam or khali");
    if (!marks.empty()) {
      if (!(m.time > marks.back().time))
        throw ValidationError(detail::at_row(file, r.line) + ": beat marks must be strictly increasing");
      if (m.kind == marks.back().kind)
        throw ValidationError(detail::at_row(file, r.line) + ": beat marks must alternate sam/khali");
    }
    marks.push_back(m);
  }
  if (marks.size() < 2) throw ValidationError(file + ": need at least two beat marks");
  return marks;
}

inline PitchContour parse_pitch(const std::string& content, const std::string& file = "pitch.csv") {
  const auto rows = text::parse_csv(content);
  detail::expect_header(rows, file, {"time_s", "f0_hz"});
  if (rows.size() < 2) throw ValidationError(file + ": no pitch frames");
  PitchContour pc;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 2) throw ValidationError(detail::at_row(file, r.line) + ": expected 2 cells");
    const double t = detail::need_double(r.cells[0], file, r.line);
    const double f = detail::need_double(r.cells[1], file, r.line);
    if (f < 0.0) throw ValidationError(detail::at_row(file, r.line) + ": negative f0");
    if (i == 1) pc.start_time = t;
    else if (std::abs(t - pc.time_of(i - 1)) > 1e-6)
      throw ValidationError(detail::at_row(file, r.line) + ": frames must be spaced 0.010 s apart");
    pc.frames.push_back(f);
  }
  return pc;
}

inline std::string serialize_pitch(const PitchContour& pc) {
  std::string out = "time_s,f0_hz\n";
  for (std::size_t i = 0; i < pc.frames.size(); ++i)
    out += text::format_time(pc.time_of(i)) + ',' + text::format_double(pc.frames[i]) + '\n';
  return out;
}

/// Reads and cross-validates one performance directory against its score.
inline PerformanceAnnotation load_performance(const fs::path& dir, const CanonicalScore& score) {
  PerformanceAnnotation p;
  const auto meta = detail::parse_meta(text::read_file(dir / "performance.meta"), (dir / "performance.meta").string());
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end() || it->second.empty())
      throw ValidationError((dir / "performance.meta").string() + ": missing '" + key + "'");
    return it->second;
  };
  p.concert_id = need("concert_id");
  p.artist_id = need("artist_id");
  p.bandish_name = need("bandish");
  if (p.bandish_name != score.bandish_name)
    throw ValidationError(p.concert_id + ": bandish '" + p.bandish_name + "' does not match notation '" +
                          score.bandish_name + "'");
  if (!text::parse_double(need("tonic_hz"), p.tonic_hz) || !(p.tonic_hz > 0.0))
    throw ValidationError(p.concert_id + ": tonic_hz must be a positive number");

  const auto beats_file = (dir / "beats.csv").string();
  p.beat_marks = parse_beats(text::read_file(dir / "beats.csv"), beats_file);
  p.tempo_range = tempo_from_marks(p.beat_marks, score.beats_per_cycle);
  if (meta.count("tempo_min") && meta.count("tempo_max")) {
    if (!text::parse_double(meta.at("tempo_min"), p.tempo_range.min) ||
        !text::parse_double(meta.at("tempo_max"), p.tempo_range.max) ||
        !(p.tempo_range.min > 0.0 && p.tempo_range.min <= p.tempo_range.max))
      throw ValidationError(p.concert_id + ": tempo_min/tempo_max must be positive and ordered");
  }
  const double grid_begin = p.beat_marks.front().time;
  const double grid_end = p.beat_marks.back().time;

  // Onsets, grouped into renditions by (line, repetition) in file order.
  const auto onsets_file = (dir / "onsets.csv").string();
  const auto rows = text::parse_csv(text::read_file(dir / "onsets.csv"));
  detail::expect_header(rows, onsets_file, {"line", "repetition", "syllable_label", "onset_s"});
  std::set<std::pair<int, int>> closed;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 4) throw ValidationError(detail::at_row(onsets_file, r.line) + ": expected 4 cells");
    const int line = detail::need_int(r.cells[0], onsets_file, r.line);
    const int rep = detail::need_int(r.cells[1], onsets_file, r.line);
    const auto& label = r.cells[2];
    const double t = detail::need_double(r.cells[3], onsets_file, r.line);
    if (line < 1 || line > static_cast<int>(score.lines.size()))
      throw ValidationError(detail::at_row(onsets_file, r.line) + ": line " + std::to_string(line) +
                            " not in notation");
    if (rep < 1) throw ValidationError(detail::at_row(onsets_file, r.line) + ": repetition must be >= 1");
    const auto& canon = score.lines[static_cast<std::size_t>(line - 1)];
    if (!canon.find(label)) {
      std::string valid;
      for (const auto& s : canon.syllables) valid += (valid.empty() ? "" : ", ") + s.label;
      throw ValidationError(detail::at_row(onsets_file, r.line) + ": unknown syllable '" + label + "' for line " +
                            std::to_string(line) + " (valid: " + valid + ")");
    }
    if (t < grid_begin || t > grid_end)
      throw ValidationError(detail::at_row(onsets_file, r.line) + ": onset " + text::format_time(t) +
                            " s outside beat marks [" + text::format_time(grid_begin) + ", " +
                            text::format_time(grid_end) + "]");
    const bool continues = !p.renditions.empty() && p.renditions.back().line_index == line &&
                           p.renditions.back().repetition_index == rep;
    if (!continues) {
      if (!closed.insert({line, rep}).second)
        throw ValidationError(detail::at_row(onsets_file, r.line) + ": rows of line " + std::to_string(line) +
                              " repetition " + std::to_string(rep) + " are not contiguous");
      p.renditions.push_back(LineRendition{line, rep, {}, {}, 0.0});
    }
    auto& rend = p.renditions.back();
    if (!rend.onsets.empty() && !(t > rend.onsets.back().time))
      throw ValidationError(detail::at_row(onsets_file, r.line) + ": onsets must be strictly increasing");
    rend.onsets.push_back({label, t});
  }

  std::stable_sort(p.renditions.begin(), p.renditions.end(), [](const LineRendition& a, const LineRendition& b) {
    return a.onsets.front().time < b.onsets.front().time;
  });
  for (std::size_t i = 0; i < p.renditions.size(); ++i) {
    p.renditions[i].end_time = i + 1 < p.renditions.size() ? p.renditions[i + 1].onsets.front().time : grid_end;
    if (p.renditions[i].onsets.back().time >= p.renditions[i].end_time && i + 1 < p.renditions.size())
      throw ValidationError(p.concert_id + ": line " + std::to_string(p.renditions[i].line_index) + " repetition " +
                            std::to_string(p.renditions[i].repetition_index) + " overlaps the next rendition");
  }

  const auto silences_file = (dir / "silences.csv").string();
  const auto srows = text::parse_csv(text::read_file(dir / "silences.csv"));
  detail::expect_header(srows, silences_file, {"start_s", "end_s"});
  double prev_end = -1.0;
  for (std::size_t i = 1; i < srows.size(); ++i) {
    const auto& r = srows[i];
    if (r.cells.size() != 2) throw ValidationError(detail::at_row(silences_file, r.line) + ": expected 2 cells");
    Silence s{detail::need_double(r.cells[0], silences_file, r.line),
              detail::need_double(r.cells[1], silences_file, r.line)};
    if (!(s.end > s.start)) throw ValidationError(detail::at_row(silences_file, r.line) + ": silence end <= start");
    if (s.start < prev_end)
      throw ValidationError(detail::at_row(silences_file, r.line) + ": silences must be sorted and non-overlapping");
    prev_end = s.end;
    for (auto& rend : p.renditions)
      if (s.start >= rend.onsets.front().time && s.start < rend.end_time) rend.silences.push_back(s);
  }

  if (fs::exists(dir / "pitch.csv"))
    p.pitch = parse_pitch(text::read_file(dir / "pitch.csv"), (dir / "pitch.csv").string());
  if (fs::exists(dir / "audio.wav")) p.audio_path = dir / "audio.wav";
  return p;
}

/// File name -> content for a performance directory.
inline std::map<std::string, std::string> serialize_performance(const PerformanceAnnotation& p) {
  std::map<std::string, std::string> files;
  files["performance.meta"] = "concert_id = " + p.concert_id + "\nartist_id = " + p.artist_id +
                              "\nbandish = " + p.bandish_name + "\ntonic_hz = " + text::format_double(p.tonic_hz) +
                              "\ntempo_min = " + text::format_double(p.tempo_range.min) +
                              "\ntempo_max = " + text::format_double(p.tempo_range.max) + "\n";
  std::string beats = "time_s,kind\n";
  for (const auto& m : p.beat_marks) beats += text::format_time(m.time) + ',' + to_string(m.kind) + '\n';
  files["beats.csv"] = beats;

  std::string onsets = "line,repetition,syllable_label,onset_s\n";
  for (const auto& r : p.renditions)
    for (const auto& o : r.onsets)
      onsets += std::to_string(r.line_index) + ',' + std::to_string(r.repetition_index) + ',' + o.label + ',' +
                text::format_time(o.time) + '\n';
  files["onsets.csv"] = onsets;

  std::vector<Silence> all;
  for (const auto& r : p.renditions) all.insert(all.end(), r.silences.begin(), r.silences.end());
  std::sort(all.begin(), all.end(), [](const Silence& a, const Silence& b) { return a.start < b.start; });
  std::string silences = "start_s,end_s\n";
  for (const auto& s : all) silences += text::format_time(s.start) + ',' + text::format_time(s.end) + '\n';
  files["silences.csv"] = silences;

  if (p.pitch) files["pitch.csv"] = serialize_pitch(*p.pitch);
  return files;
}

inline void write_performance(const fs::path& dir, const PerformanceAnnotation& p) {
  for (const auto& [name, content] : serialize_performance(p)) text::write_file(dir / name, content);
}

// ---------------------------------------------------------------------------
// Manifest and dataset

struct BandishEntry {
  std::string name;
  std::string raga;
  std::string tala;
  std::string notation_file;
  std::string raga_file;
  std::vector<std::string> concerts;
  std::vector<int> repetitions;  ///< claimed count per line
};

struct DatasetManifest {
  std::string name;
  std::vector<BandishEntry> bandish;
};

inline DatasetManifest parse_manifest(const std::string& content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.name = j.value("name", "");
    for (const auto& b : j.at("bandish")) {
      BandishEntry e;
      e.name = b.at("name").get<std::string>();
      e.raga = b.at("raga").get<std::string>();
      e.tala = b.value("tala", "teentaal");
      e.notation_file = b.at("notation").get<std::string>();
      e.raga_file = b.at("raga_file").get<std::string>();
      e.concerts = b.at("concerts").get<std::vector<std::string>>();
      e.repetitions = b.at("repetitions").get<std::vector<int>>();
      m.bandish.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
  return m;
}

inline std::string serialize_manifest(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["bandish"] = nlohmann::ordered_json::array();
  for (const auto& b : m.bandish) {
    nlohmann::ordered_json e;
    e["name"] = b.name;
    e["raga"] = b.raga;
    e["tala"] = b.tala;
    e["notation"] = b.notation_file;
    e["raga_file"] = b.raga_file;
    e["concerts"] = b.concerts;
    e["repetitions"] = b.repetitions;
    j["bandish"].push_back(e);
  }
  return j.dump(2) + "\n";
}

struct Dataset {
  fs::path root;
  DatasetManifest manifest;
  std::map<std::string, CanonicalScore> scores;  ///< by bandish name
  std::map<std::string, RagaScale> scales;       ///< by bandish name
  std::vector<PerformanceAnnotation> performances;

  const CanonicalScore& score_for(const PerformanceAnnotation& p) const { return scores.at(p.bandish_name); }
  const RagaScale& scale_for(const PerformanceAnnotation& p) const { return scales.at(p.bandish_name); }
};

/// Loads every performance listed in the manifest. Directories under
/// performances/ that the manifest does not list are an error.
inline Dataset load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("dataset root " + root.string() + " is not a directory");
  const auto perf_root = root / "performances";
  std::set<std::string> on_disk;
  if (fs::is_directory(perf_root))
    for (const auto& e : fs::directory_iterator(perf_root))
      if (e.is_directory()) on_disk.insert(e.path().filename().string());
  if (on_disk.empty()) throw ValidationError("no performances found under " + perf_root.string());

  Dataset ds;
  ds.root = root;
  ds.manifest = parse_manifest(text::read_file(root / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& b : ds.manifest.bandish) {
    auto score = parse_notation(text::read_file(root / b.notation_file));
    if (score.bandish_name != b.name)
      throw ValidationError(b.notation_file + " describes '" + score.bandish_name + "', manifest says '" + b.name + "'");
    ds.scales.emplace(b.name, parse_raga(text::read_file(root / b.raga_file)));
    for (const auto& c : b.concerts) {
      if (!on_disk.count(c)) throw IoError("concert '" + c + "' listed in manifest has no directory");
      listed.insert(c);
      try {
        ds.performances.push_back(load_performance(perf_root / c, score));
      } catch (const ValidationError& e) {
        throw ValidationError("performances/" + c + ": " + e.what());
      }
    }
    ds.scores.emplace(b.name, std::move(score));
  }
  for (const auto& c : on_disk)
    if (!listed.count(c)) throw ValidationError("performances/" + c + " is not listed in manifest.json");
  return ds;
}

struct BandishSummary {
  std::string name;
  std::string raga;
  std::string tala;
  std::size_t concerts = 0;
  std::size_t artists = 0;
  std::vector<int> claimed;   ///< repetitions per line from the manifest
  std::vector<int> observed;  ///< repetitions per line after load
  TempoRange tempo;           ///< over all concerts; zero when none
  std::vector<std::string> mismatches;
};

struct ManifestReport {
  std::vector<BandishSummary> bandish;
  bool ok() const {
    return std::all_of(bandish.begin(), bandish.end(), [](const BandishSummary& b) { return b.mismatches.empty(); });
  }
};

inline ManifestReport validate_manifest(const DatasetManifest& manifest,
                                        const std::vector<PerformanceAnnotation>& performances) {
  ManifestReport report;
  for (const auto& b : manifest.bandish) {
    BandishSummary s;
    s.name = b.name;
    s.raga = b.raga;
    s.tala = b.tala;
    s.claimed = b.repetitions;
    s.observed.assign(b.repetitions.size(), 0);
    std::set<std::string> artists;
    bool first = true;
    for (const auto& p : performances) {
      if (p.bandish_name != b.name) continue;
      if (std::find(b.concerts.begin(), b.concerts.end(), p.concert_id) == b.concerts.end()) continue;
      ++s.concerts;
      artists.insert(p.artist_id);
      for (const auto& r : p.renditions) {
        const auto idx = static_cast<std::size_t>(r.line_index - 1);
        if (idx >= s.observed.size()) s.observed.resize(idx + 1, 0);
        ++s.observed[idx];
      }
      s.tempo.min = first ? p.tempo_range.min : std::min(s.tempo.min, p.tempo_range.min);
      s.tempo.max = first ? p.tempo_range.max : std::max(s.tempo.max, p.tempo_range.max);
      first = false;
    }
    s.artists = artists.size();
    if (s.concerts != b.concerts.size())
      s.mismatches.push_back("concerts: manifest lists " + std::to_string(b.concerts.size()) + ", loaded " +
                             std::to_string(s.concerts));
    for (std::size_t i = 0; i < std::max(s.claimed.size(), s.observed.size()); ++i) {
      const int want = i < s.claimed.size() ? s.claimed[i] : 0;
      const int got = i < s.observed.size() ? s.observed[i] : 0;
      if (want != got)
        s.mismatches.push_back("line " + std::to_string(i + 1) + " repetitions: manifest " + std::to_string(want) +
                               ", observed " + std::to_string(got));
    }
    report.bandish.push_back(std::move(s));
  }
  return report;
}

inline std::string render_report(const ManifestReport& r) {
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s;
  };
  auto fixed1 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return std::string(buf);
  };
  std::string out;
  for (const auto& b : r.bandish) {
    out += "Bandish            " + b.name + "\n";
    out += "Raga               " + b.raga + "\n";
    out += "Tala               " + b.tala + "\n";
    out += "# Concerts         " + std::to_string(b.concerts) + "\n";
    out += "# Artists          " + std::to_string(b.artists) + "\n";
    out += "# Repetitions      " + join(b.observed) + "\n";
    out += "Matra per min      " + fixed1(b.tempo.min) + "--" + fixed1(b.tempo.max) + "\n";
    for (const auto& m : b.mismatches) out += "MISMATCH           " + m + "\n";
    out += "\n";
  }
  return out;
}

}  // namespace khayal

#endif  // KHAYAL_ANNOTATION_IO_HPP
