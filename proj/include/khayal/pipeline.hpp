#ifndef KHAYAL_PIPELINE_HPP
#define KHAYAL_PIPELINE_HPP

// Dataset-level commands behind the command-line tool. Every command reads
// the dataset (and, for later stages, the CSV files written by earlier
// ones) and writes its artifacts under the output directory. Rows are
// ordered by artist, concert, line, repetition and canonical syllable
// order; every CSV starts with a `# seed=N` comment and every JSON file has
// a "seed" key.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "khayal/aggregate.hpp"
#include "khayal/annotation_io.hpp"
#include "khayal/figures.hpp"
#include "khayal/generate.hpp"
#include "khayal/melody.hpp"
#include "khayal/pitchtrack.hpp"
#include "khayal/rhythm.hpp"
#include "khayal/wav.hpp"

namespace khayal {

struct RunConfig {
  fs::path dataset;
  fs::path out = "khayal_out";
  std::optional<std::string> bandish;
  std::optional<std::string> artist;
  std::optional<int> line;
  std::uint64_t seed = 0;
  int paa_per_beat = kDefaultPaaPerBeat;
  double nlss_threshold = 0.3;
  std::optional<double> tempo;     ///< matra per minute, generation only
  std::optional<double> tonic_hz;  ///< generation only
  TrackerParams tracker;
  double jitter = 0.0;
  int sample_rate = 22050;
};

inline void validate_config(const RunConfig& c) {
  if (c.paa_per_beat < 1 || c.paa_per_beat > 100) throw ConfigError("--paa-per-beat must lie in [1, 100]");
  if (!(c.nlss_threshold >= 0.0 && c.nlss_threshold <= 1.0)) throw ConfigError("--nlss-threshold must lie in [0, 1]");
  if (c.line && *c.line < 1) throw ConfigError("--line must be at least 1");
  if (c.tempo && !(*c.tempo > 0.0)) throw ConfigError("--tempo must be positive");
  if (c.tonic_hz && !(*c.tonic_hz > 0.0)) throw ConfigError("--tonic-hz must be positive");
  if (!(c.jitter >= 0.0)) throw ConfigError("--jitter must be non-negative");
  if (!(c.tracker.fmin > 0.0 && c.tracker.fmin < c.tracker.fmax)) throw ConfigError("need 0 < --fmin < --fmax");
  if (!(c.tracker.voicing_threshold > 0.0 && c.tracker.voicing_threshold < 1.0))
    throw ConfigError("--voicing-threshold must lie in (0, 1)");
  if (c.sample_rate < 8000) throw ConfigError("sample rate must be at least 8000 Hz");
}

struct CommandResult {
  std::vector<fs::path> written;
  std::vector<std::string> notes;  ///< skipped items and other remarks
};

namespace detail {

inline std::string seed_line(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

inline std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

inline bool wanted(const RunConfig& c, const PerformanceAnnotation& p) {
  return (!c.bandish || *c.bandish == p.bandish_name) && (!c.artist || *c.artist == p.artist_id);
}

inline bool wanted_line(const RunConfig& c, int line) { return !c.line || *c.line == line; }

/// Dataset with only the performances that pass the filters, sorted by
/// artist then concert.
inline Dataset load_selected(const RunConfig& c) {
  validate_config(c);
  auto ds = load_dataset(c.dataset);
  if (c.bandish && !ds.scores.count(*c.bandish)) throw NotFoundError("bandish '" + *c.bandish + "' not in dataset");
  std::erase_if(ds.performances, [&](const PerformanceAnnotation& p) { return !wanted(c, p); });
  if (ds.performances.empty()) throw NotFoundError("no performance matches the --bandish/--artist filters");
  std::sort(ds.performances.begin(), ds.performances.end(), [](const auto& a, const auto& b) {
    return std::tie(a.artist_id, a.concert_id) < std::tie(b.artist_id, b.concert_id);
  });
  return ds;
}

/// Renditions passing the line filter, by line then repetition.
inline std::vector<const LineRendition*> selected_renditions(const RunConfig& c, const PerformanceAnnotation& p) {
  std::vector<const LineRendition*> out;
  for (const auto& r : p.renditions)
    if (wanted_line(c, r.line_index)) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    return std::tie(a->line_index, a->repetition_index) < std::tie(b->line_index, b->repetition_index);
  });
  return out;
}

inline std::size_t canonical_index(const CanonicalScore& score, int line, const std::string& label) {
  const auto& syl = canonical_positions(score, line);
  for (std::size_t i = 0; i < syl.size(); ++i)
    if (syl[i].label == label) return i;
  return syl.size();
}

inline fs::path need_artifact(const RunConfig& c, const std::string& name, const std::string& producer) {
  const auto p = c.out / name;
  if (!fs::exists(p)) throw IoError(p.string() + " not found; run '" + producer + "' first");
  return p;
}

inline PitchContour contour_of(const PerformanceAnnotation& p, const TrackerParams& params) {
  if (p.pitch) return *p.pitch;
  if (p.audio_path) {
    const auto audio = read_wav(*p.audio_path);
    return extract_f0(audio.samples, audio.sample_rate, params);
  }
  throw ValidationError(p.concert_id + ": neither pitch.csv nor audio.wav present");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Readers for the stage outputs

inline std::vector<TimingRecord> read_timing_csv(const fs::path& path) {
  const auto rows = text::parse_csv(text::read_file(path));
  const std::string file = path.string();
  detail::expect_header(rows, file, {"concert", "artist", "line", "repetition", "syllable", "deviation", "onset_s"});
  std::vector<TimingRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 7) throw ValidationError(detail::at_row(file, r.line) + ": expected 7 cells");
    out.push_back({r.cells[0], r.cells[1], detail::need_int(r.cells[2], file, r.line),
                   detail::need_int(r.cells[3], file, r.line), r.cells[4],
                   detail::need_double(r.cells[5], file, r.line), detail::need_double(r.cells[6], file, r.line)});
  }
  return out;
}

inline std::vector<PaaRecord> read_paa_csv(const fs::path& path) {
  const auto rows = text::parse_csv(text::read_file(path));
  const std::string file = path.string();
  detail::expect_header(rows, file, {"concert", "artist", "line", "repetition", "syllable", "string"});
  std::vector<PaaRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 6) throw ValidationError(detail::at_row(file, r.line) + ": expected 6 cells");
    std::vector<SwarSymbol> symbols;
    try {
      symbols = parse_string(r.cells[5]);
    } catch (const ParseError& e) {
      throw ValidationError(detail::at_row(file, r.line) + ": " + e.what());
    }
    out.push_back({r.cells[0], r.cells[1], detail::need_int(r.cells[2], file, r.line),
                   detail::need_int(r.cells[3], file, r.line), r.cells[4], std::move(symbols)});
  }
  return out;
}

/// Pairwise NLSS of each (concert, line, syllable) with at least two
/// repetitions, in input order of first appearance.
inline std::vector<NlssRecord> nlss_records(const std::vector<PaaRecord>& paa) {
  std::vector<std::tuple<std::string, int, std::string>> keys;
  std::map<std::tuple<std::string, int, std::string>, std::vector<PaaString>> groups;
  std::map<std::string, std::string> artist_of;
  for (const auto& r : paa) {
    const auto key = std::make_tuple(r.concert, r.line, r.syllable);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back({r.syllable, r.repetition, r.symbols});
    artist_of[r.concert] = r.artist;
  }
  std::vector<NlssRecord> out;
  for (const auto& key : keys) {
    const auto& reps = groups[key];
    if (reps.size() < 2) continue;
    const auto& [concert, line, syllable] = key;
    out.push_back({concert, artist_of[concert], line, syllable, pairwise_nlss(reps)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

struct ValidateResult {
  ManifestReport report;
  std::string text;
};

/// Loads and cross-checks the whole dataset (filters are not applied).
inline ValidateResult cmd_validate(const RunConfig& c) {
  validate_config(c);
  const auto ds = load_dataset(c.dataset);
  ValidateResult r;
  r.report = validate_manifest(ds.manifest, ds.performances);
  r.text = render_report(r.report);
  return r;
}

/// Writes pitch.csv next to every selected audio.wav that has no contour.
inline CommandResult cmd_extract_pitch(const RunConfig& c) {
  const auto ds = detail::load_selected(c);
  CommandResult res;
  for (const auto& p : ds.performances) {
    const auto dir = ds.root / "performances" / p.concert_id;
    if (p.pitch) {
      res.notes.push_back(p.concert_id + ": pitch.csv present, skipped");
      continue;
    }
    if (!p.audio_path) {
      res.notes.push_back(p.concert_id + ": no audio.wav, skipped");
      continue;
    }
    const auto audio = read_wav(*p.audio_path);
    const auto pc = extract_f0(audio.samples, audio.sample_rate, c.tracker);
    text::write_file(dir / "pitch.csv", serialize_pitch(pc));
    res.written.push_back(dir / "pitch.csv");
  }
  return res;
}

inline CommandResult cmd_timing(const RunConfig& c) {
  const auto ds = detail::load_selected(c);
  CommandResult res;
  std::string dev_csv = detail::seed_line(c.seed) + "concert,artist,line,repetition,syllable,deviation,onset_s\n";
  std::string dur_csv = detail::seed_line(c.seed) + "concert,artist,line,repetition,syllable,onset_s,duration_s\n";
  // (artist, bandish, line) -> label -> deviations
  std::map<std::tuple<std::string, std::string, int>, std::map<std::string, std::vector<double>>> pooled;

  for (const auto& p : ds.performances) {
    const auto& score = ds.score_for(p);
    const BeatGrid grid(p.beat_marks, score.beats_per_cycle);
    for (const auto* r : detail::selected_renditions(c, p)) {
      auto devs = assign_and_deviate(*r, canonical_positions(score, r->line_index), grid);
      std::stable_sort(devs.begin(), devs.end(), [&](const auto& a, const auto& b) {
        return detail::canonical_index(score, r->line_index, a.syllable_label) <
               detail::canonical_index(score, r->line_index, b.syllable_label);
      });
      for (const auto& d : devs) {
        dev_csv += p.concert_id + ',' + p.artist_id + ',' + std::to_string(d.line_index) + ',' +
                   std::to_string(d.repetition_index) + ',' + d.syllable_label + ',' +
                   text::format_double(d.deviation) + ',' + text::format_time(d.onset_time) + '\n';
        pooled[{p.artist_id, p.bandish_name, d.line_index}][d.syllable_label].push_back(d.deviation);
      }
      for (const auto& d : syllable_durations(*r))
        dur_csv += p.concert_id + ',' + p.artist_id + ',' + std::to_string(r->line_index) + ',' +
                   std::to_string(r->repetition_index) + ',' + d.syllable_label + ',' +
                   text::format_time(d.onset_time) + ',' + text::format_time(d.duration) + '\n';
    }
  }

  std::string stats_csv = detail::seed_line(c.seed) + "artist,bandish,line,syllable,mean,sd,n\n";
  for (const auto& [key, by_label] : pooled) {
    const auto& [artist, bandish, line] = key;
    for (const auto& syl : canonical_positions(ds.scores.at(bandish), line)) {
      const auto it = by_label.find(syl.label);
      if (it == by_label.end()) continue;
      stats_csv += artist + ',' + bandish + ',' + std::to_string(line) + ',' + syl.label + ',' +
                   text::format_double(stats::mean(it->second)) + ',' +
                   text::format_double(stats::sample_sd(it->second)) + ',' + std::to_string(it->second.size()) + '\n';
    }
  }
  for (const auto& [name, content] : {std::pair{"timing_deviations.csv", &dev_csv},
                                      std::pair{"timing_stats.csv", &stats_csv},
                                      std::pair{"syllable_durations.csv", &dur_csv}}) {
    text::write_file(c.out / name, *content);
    res.written.push_back(c.out / name);
  }
  return res;
}

inline nlohmann::ordered_json nlss_json(const NlssRecord& r, std::uint64_t seed) {
  const std::size_t n = r.matrix.values.size;
  auto square = [&](auto get) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < n; ++j) row.push_back(get(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["concert"] = r.concert;
  j["artist"] = r.artist;
  j["line"] = r.line;
  j["syllable"] = r.syllable;
  j["repetitions"] = r.matrix.labels;
  j["nlss"] = square([&](std::size_t a, std::size_t b) { return r.matrix.values.at(a, b); });
  j["edit_distance"] = square([&](std::size_t a, std::size_t b) { return r.matrix.edit_distance[a * n + b]; });
  j["substitutions"] = square([&](std::size_t a, std::size_t b) { return r.matrix.substitutions[a * n + b]; });
  j["mean_nlss"] = mean_nlss(r.matrix);
  return j;
}

/// PAA strings of every selected syllable rendition. Syllables that cannot
/// be encoded (shorter than one frame, no voiced frame) are listed in the
/// notes and left out.
inline std::vector<PaaRecord> compute_paa(const RunConfig& c, const Dataset& ds, CommandResult& res) {
  std::vector<PaaRecord> out;
  for (const auto& p : ds.performances) {
    const auto& score = ds.score_for(p);
    const auto& scale = ds.scale_for(p);
    const auto renditions = detail::selected_renditions(c, p);
    if (renditions.empty()) continue;
    const auto contour = detail::contour_of(p, c.tracker);
    for (const auto* r : renditions) {
      std::vector<PaaRecord> rows;
      try {
        const auto cents = continuous_cents(contour_region(contour, r->onsets.front().time, r->end_time), p.tonic());
        for (const auto& d : syllable_durations(*r)) {
          const auto* syl = line_of(score, r->line_index).find(d.syllable_label);
          try {
            const auto seg = slice_syllable(cents, d.onset_time, d.duration);
            rows.push_back({p.concert_id, p.artist_id, r->line_index, r->repetition_index, d.syllable_label,
                            paa_symbols(seg, syl->allotted_beats, scale, c.paa_per_beat)});
          } catch (const DomainError& e) {
            res.notes.push_back(p.concert_id + " line " + std::to_string(r->line_index) + " repetition " +
                                std::to_string(r->repetition_index) + " '" + d.syllable_label + "': " + e.what());
          }
        }
      } catch (const DomainError& e) {
        res.notes.push_back(p.concert_id + " line " + std::to_string(r->line_index) + " repetition " +
                            std::to_string(r->repetition_index) + ": " + e.what());
        continue;
      }
      std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
        return detail::canonical_index(score, r->line_index, a.syllable) <
               detail::canonical_index(score, r->line_index, b.syllable);
      });
      out.insert(out.end(), rows.begin(), rows.end());
    }
  }
  return out;
}

inline CommandResult cmd_pitch(const RunConfig& c) {
  const auto ds = detail::load_selected(c);
  CommandResult res;
  const auto paa = compute_paa(c, ds, res);
  std::string csv = detail::seed_line(c.seed) + "concert,artist,line,repetition,syllable,string\n";
  for (const auto& r : paa)
    csv += r.concert + ',' + r.artist + ',' + std::to_string(r.line) + ',' + std::to_string(r.repetition) + ',' +
           r.syllable + ',' + render_string(r.symbols) + '\n';
  text::write_file(c.out / "paa_strings.csv", csv);
  res.written.push_back(c.out / "paa_strings.csv");

  const auto nlss_dir = c.out / "nlss";
  if (fs::exists(nlss_dir)) fs::remove_all(nlss_dir);
  for (const auto& r : nlss_records(paa)) {
    const auto path =
        nlss_dir / (r.concert + "__L" + std::to_string(r.line) + "__" + detail::slug(r.syllable) + ".json");
    text::write_file(path, nlss_json(r, c.seed).dump(2) + "\n");
    res.written.push_back(path);
  }
  return res;
}

struct AggregateTables {
  std::string bandish;
  ExpressionTable timing;
  ExpressionTable pitch;
};

/// Expression tables per (bandish, line), rebuilt from the stage CSVs.
inline std::vector<AggregateTables> build_tables(const RunConfig& c, const Dataset& ds,
                                                 const std::vector<TimingRecord>& timing,
                                                 const std::vector<PaaRecord>& paa) {
  std::map<std::string, const PerformanceAnnotation*> by_concert;
  for (const auto& p : ds.performances) by_concert[p.concert_id] = &p;
  auto keep = [&](const std::string& concert, int line) {
    return by_concert.count(concert) && detail::wanted_line(c, line);
  };

  std::vector<AggregateTables> out;
  for (const auto& [name, score] : ds.scores) {
    if (c.bandish && *c.bandish != name) continue;
    auto in_bandish = [&](const std::string& concert) { return by_concert.at(concert)->bandish_name == name; };
    std::vector<TimingRecord> t;
    for (const auto& r : timing)
      if (keep(r.concert, r.line) && in_bandish(r.concert)) t.push_back(r);
    std::vector<PaaRecord> s;
    for (const auto& r : paa)
      if (keep(r.concert, r.line) && in_bandish(r.concert)) s.push_back(r);
    const auto nlss = nlss_records(s);
    for (const auto& line : score.lines) {
      if (!detail::wanted_line(c, line.line_index)) continue;
      std::set<std::string> artists;
      for (const auto& r : t)
        if (r.line == line.line_index) artists.insert(r.artist);
      for (const auto& r : s)
        if (r.line == line.line_index) artists.insert(r.artist);
      if (artists.empty()) continue;
      const std::vector<std::string> rows(artists.begin(), artists.end());
      out.push_back({name, timing_table(t, line.line_index, line.syllables, rows),
                     pitch_table(nlss, line.line_index, line.syllables, rows)});
    }
  }
  return out;
}

inline std::string table_csv(const std::vector<AggregateTables>& tables, bool pitch, std::uint64_t seed) {
  std::string csv = detail::seed_line(seed) + "bandish,line,artist,syllable,value,n\n";
  for (const auto& g : tables) {
    const auto& t = pitch ? g.pitch : g.timing;
    for (std::size_t r = 0; r < t.artists.size(); ++r)
      for (std::size_t col = 0; col < t.syllables.size(); ++col) {
        const auto& cell = t.at(r, col);
        csv += g.bandish + ',' + std::to_string(t.line) + ',' + t.artists[r] + ',' + t.syllables[col] + ',' +
               (cell.value ? text::format_double(*cell.value) : std::string()) + ',' + std::to_string(cell.n) + '\n';
      }
  }
  return csv;
}

inline std::string boxplot_json(const std::vector<AggregateTables>& tables, bool pitch, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["metric"] = pitch ? "mean_nlss" : "timing_sd";
  j["quartiles"] = "linear interpolation, position p*(n-1)";
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& g : tables) {
    const auto d = boxplot_summary(pitch ? g.pitch : g.timing);
    nlohmann::ordered_json e;
    e["bandish"] = g.bandish;
    e["line"] = d.line;
    e["columns"] = nlohmann::ordered_json::array();
    for (const auto& b : d.columns) {
      nlohmann::ordered_json col;
      col["syllable"] = b.syllable;
      col["min"] = b.min;
      col["q1"] = b.q1;
      col["median"] = b.median;
      col["q3"] = b.q3;
      col["max"] = b.max;
      col["mean"] = b.mean;
      col["n"] = b.n;
      e["columns"].push_back(col);
    }
    j["tables"].push_back(e);
  }
  return j.dump(2) + "\n";
}

inline CommandResult cmd_aggregate(const RunConfig& c) {
  const auto ds = detail::load_selected(c);
  const auto timing = read_timing_csv(detail::need_artifact(c, "timing_deviations.csv", "timing"));
  const auto paa = read_paa_csv(detail::need_artifact(c, "paa_strings.csv", "pitch"));
  const auto tables = build_tables(c, ds, timing, paa);
  CommandResult res;
  auto emit = [&](const fs::path& rel, const std::string& content) {
    text::write_file(c.out / rel, content);
    res.written.push_back(c.out / rel);
  };
  emit("expression_table_timing.csv", table_csv(tables, false, c.seed));
  emit("expression_table_pitch.csv", table_csv(tables, true, c.seed));
  emit("boxplot_timing.json", boxplot_json(tables, false, c.seed));
  emit("boxplot_pitch.json", boxplot_json(tables, true, c.seed));
  for (const auto& g : tables) {
    const std::string tag = detail::slug(g.bandish) + "__L" + std::to_string(g.timing.line);
    const std::string title = g.bandish + ", line " + std::to_string(g.timing.line);
    emit(fs::path("figures") / ("heatmap_timing__" + tag + ".svg"), svg_heatmap(g.timing, title + ": timing sd"));
    emit(fs::path("figures") / ("heatmap_pitch__" + tag + ".svg"), svg_heatmap(g.pitch, title + ": mean NLSS"));
    emit(fs::path("figures") / ("boxplot_timing__" + tag + ".svg"),
         svg_boxplot(boxplot_summary(g.timing), title + ": timing sd across artists"));
    emit(fs::path("figures") / ("boxplot_pitch__" + tag + ".svg"),
         svg_boxplot(boxplot_summary(g.pitch), title + ": mean NLSS across artists"));
  }
  return res;
}

inline CommandResult cmd_cluster(const RunConfig& c) {
  const auto ds = detail::load_selected(c);
  std::set<std::string> concerts;
  for (const auto& p : ds.performances) concerts.insert(p.concert_id);
  std::vector<PaaRecord> paa;
  for (auto& r : read_paa_csv(detail::need_artifact(c, "paa_strings.csv", "pitch")))
    if (concerts.count(r.concert) && detail::wanted_line(c, r.line)) paa.push_back(std::move(r));

  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["threshold"] = c.nlss_threshold;
  j["linkage"] = "average";
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& r : nlss_records(paa)) {
    const auto vc = cluster_variations(r.matrix, c.nlss_threshold);
    nlohmann::ordered_json g;
    g["concert"] = r.concert;
    g["artist"] = r.artist;
    g["line"] = r.line;
    g["syllable"] = r.syllable;
    g["repetitions"] = vc.labels;
    g["assignments"] = vc.assignments;
    g["cluster_count"] = vc.cluster_count();
    g["dendrogram"] = nlohmann::ordered_json::array();
    for (const auto& m : vc.dendrogram)
      g["dendrogram"].push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
    j["groups"].push_back(g);
  }
  text::write_file(c.out / "clusters.json", j.dump(2) + "\n");
  return {{c.out / "clusters.json"}, {}};
}

/// Fits one artist's model for one line and renders a sampled rendition and
/// the canonical one.
inline CommandResult cmd_generate(const RunConfig& c) {
  const auto ds = detail::load_selected(c);
  const std::string bandish = c.bandish.value_or(ds.performances.front().bandish_name);
  std::vector<const PerformanceAnnotation*> perfs;
  for (const auto& p : ds.performances)
    if (p.bandish_name == bandish) perfs.push_back(&p);
  if (perfs.empty()) throw NotFoundError("no performance of '" + bandish + "' matches the filters");
  const std::string artist = c.artist.value_or(perfs.front()->artist_id);
  std::erase_if(perfs, [&](const auto* p) { return p->artist_id != artist; });
  const int line = c.line.value_or(1);
  const auto& score = ds.scores.at(bandish);
  const auto& scale = ds.scales.at(bandish);
  canonical_positions(score, line);

  std::set<std::string> concerts;
  TempoRange range{perfs.front()->tempo_range.min, perfs.front()->tempo_range.max};
  for (const auto* p : perfs) {
    concerts.insert(p->concert_id);
    range.min = std::min(range.min, p->tempo_range.min);
    range.max = std::max(range.max, p->tempo_range.max);
  }
  const double tempo = c.tempo.value_or(0.5 * (range.min + range.max));
  if (tempo < range.min || tempo > range.max)
    throw ConfigError("--tempo " + text::format_double(tempo) + " is outside " + artist + "'s range [" +
                      text::format_double(range.min) + ", " + text::format_double(range.max) + "] matra/min");
  const Tonic tonic(c.tonic_hz.value_or(perfs.front()->tonic_hz));

  std::vector<TimingRecord> timing;
  for (auto& r : read_timing_csv(detail::need_artifact(c, "timing_deviations.csv", "timing")))
    if (concerts.count(r.concert)) timing.push_back(std::move(r));
  std::vector<PaaRecord> paa;
  for (auto& r : read_paa_csv(detail::need_artifact(c, "paa_strings.csv", "pitch")))
    if (concerts.count(r.concert)) paa.push_back(std::move(r));

  auto model = fit_artist_model(artist, line, timing, paa);
  model.bandish = bandish;
  model.tonic_hz = tonic.hz();
  model.tempo = range;

  SampleOptions so;
  so.jitter_sigma = c.jitter;
  so.per_beat = c.paa_per_beat;
  const auto schedule = sample_schedule(model, score, line, tempo, tonic, c.seed, so);
  auto canonical = canonical_schedule(score, line, tempo, tonic, c.paa_per_beat);
  canonical.seed = c.seed;
  const auto rendered = synthesize(schedule, scale, c.sample_rate);
  const auto reference = synthesize(canonical, scale, c.sample_rate);

  CommandResult res;
  const auto dir = c.out / "generate";
  auto emit = [&](const std::string& name, const std::string& content) {
    text::write_file(dir / name, content);
    res.written.push_back(dir / name);
  };
  emit("model.json", serialize_model(model, c.seed));
  emit("schedule.json", serialize_schedule(schedule));
  emit("generated.wav", encode_wav(rendered.audio));
  emit("canonical_schedule.json", serialize_schedule(canonical));
  emit("canonical.wav", encode_wav(reference.audio));
  for (const auto& e : schedule.events) {
    if (e.fallback) res.notes.push_back("'" + e.syllable + "' not modeled for " + artist + "; canonical values used");
    if (e.clamped) res.notes.push_back("'" + e.syllable + "' onset clamped after its predecessor");
  }
  for (const auto& f : rendered.flags) res.notes.push_back(f);
  return res;
}

/// validate, timing, pitch, aggregate, cluster, generate.
inline CommandResult cmd_run(const RunConfig& c) {
  const auto v = cmd_validate(c);
  if (!v.report.ok()) throw ValidationError("dataset does not match its manifest:\n" + v.text);
  CommandResult all;
  for (auto* step : {&cmd_timing, &cmd_pitch, &cmd_aggregate, &cmd_cluster, &cmd_generate}) {
    auto r = step(c);
    all.written.insert(all.written.end(), r.written.begin(), r.written.end());
    all.notes.insert(all.notes.end(), r.notes.begin(), r.notes.end());
  }
  return all;
}

}  // namespace khayal

#endif  // KHAYAL_PIPELINE_HPP
