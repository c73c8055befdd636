#ifndef KHAYAL_AGGREGATE_HPP
#define KHAYAL_AGGREGATE_HPP

// Artist x syllable expressiveness tables and their per-syllable spread
// across artists.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "khayal/melody.hpp"
#include "khayal/notation.hpp"
#include "khayal/stats.hpp"

namespace khayal {

enum class Metric { timing_sd, mean_nlss };

inline const char* to_string(Metric m) { return m == Metric::timing_sd ? "timing_sd" : "mean_nlss"; }

/// One row of timing_deviations.csv.
struct TimingRecord {
  std::string concert;
  std::string artist;
  int line = 1;
  int repetition = 1;
  std::string syllable;
  double deviation = 0.0;
  double onset = 0.0;
};

/// One row of paa_strings.csv.
struct PaaRecord {
  std::string concert;
  std::string artist;
  int line = 1;
  int repetition = 1;
  std::string syllable;
  std::vector<SwarSymbol> symbols;
};

/// Pairwise NLSS of one syllable's repetitions within one concert.
struct NlssRecord {
  std::string concert;
  std::string artist;
  int line = 1;
  std::string syllable;
  NlssMatrix matrix;
};

struct TableCell {
  std::optional<double> value;  ///< absent when the artist has no data
  /// Observations behind the value: repetitions for timing_sd, pairs for
  /// mean_nlss.
  std::size_t n = 0;
};

struct ExpressionTable {
  Metric metric = Metric::timing_sd;
  int line = 1;
  std::vector<std::string> artists;    ///< rows, sorted
  std::vector<std::string> syllables;  ///< columns, canonical order
  std::vector<std::vector<TableCell>> cells;

  const TableCell& at(std::size_t row, std::size_t col) const { return cells[row][col]; }
};

namespace detail {

inline ExpressionTable empty_table(Metric metric, int line, std::set<std::string> artists,
                                   const std::vector<CanonicalSyllable>& canon) {
  ExpressionTable t;
  t.metric = metric;
  t.line = line;
  t.artists.assign(artists.begin(), artists.end());
  for (const auto& s : canon) t.syllables.push_back(s.label);
  t.cells.assign(t.artists.size(), std::vector<TableCell>(t.syllables.size()));
  return t;
}

inline std::size_t index_of(const std::vector<std::string>& v, const std::string& x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace detail

/// Sample sd of each artist's deviations per syllable, pooled over that
/// artist's concerts. Single observations give sd 0 with n == 1.
/// `known_artists` adds rows whose cells stay absent.
inline ExpressionTable timing_table(const std::vector<TimingRecord>& records, int line,
                                    const std::vector<CanonicalSyllable>& canon,
                                    const std::vector<std::string>& known_artists = {}) {
  std::set<std::string> artists(known_artists.begin(), known_artists.end());
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.line != line) continue;
    artists.insert(r.artist);
    groups[{r.artist, r.syllable}].push_back(r.deviation);
  }
  auto t = detail::empty_table(Metric::timing_sd, line, artists, canon);
  for (const auto& [key, xs] : groups) {
    const auto row = detail::index_of(t.artists, key.first);
    const auto col = detail::index_of(t.syllables, key.second);
    if (col == t.syllables.size()) continue;
    t.cells[row][col] = {stats::sample_sd(xs), xs.size()};
  }
  return t;
}

/// Mean NLSS over every within-concert pair of an artist's repetitions.
/// `known_artists` adds rows for artists with no matrix (too few
/// repetitions), whose cells stay absent.
inline ExpressionTable pitch_table(const std::vector<NlssRecord>& records, int line,
                                   const std::vector<CanonicalSyllable>& canon,
                                   const std::vector<std::string>& known_artists = {}) {
  std::set<std::string> artists(known_artists.begin(), known_artists.end());
  std::map<std::pair<std::string, std::string>, std::vector<double>> pairs;
  for (const auto& r : records) {
    if (r.line != line) continue;
    artists.insert(r.artist);
    auto& v = pairs[{r.artist, r.syllable}];
    const std::size_t n = r.matrix.values.size;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) v.push_back(r.matrix.values.at(i, j));
  }
  auto t = detail::empty_table(Metric::mean_nlss, line, artists, canon);
  for (const auto& [key, xs] : pairs) {
    const auto row = detail::index_of(t.artists, key.first);
    const auto col = detail::index_of(t.syllables, key.second);
    if (col == t.syllables.size() || xs.empty()) continue;
    t.cells[row][col] = {stats::mean(xs), xs.size()};
  }
  return t;
}

struct BoxStats {
  std::string syllable;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
  std::size_t n = 0;  ///< artists contributing
};

struct DistributionSummary {
  Metric metric = Metric::timing_sd;
  int line = 1;
  std::vector<BoxStats> columns;  ///< canonical order; empty columns omitted
};

/// Five-number summary plus mean of each column across artists. Quartiles
/// interpolate linearly between order statistics. Timing cells backed by a
/// single repetition are left out.
inline DistributionSummary boxplot_summary(const ExpressionTable& t) {
  DistributionSummary out{t.metric, t.line, {}};
  for (std::size_t c = 0; c < t.syllables.size(); ++c) {
    std::vector<double> xs;
    for (std::size_t r = 0; r < t.artists.size(); ++r) {
      const auto& cell = t.cells[r][c];
      if (!cell.value) continue;
      if (t.metric == Metric::timing_sd && cell.n < 2) continue;
      xs.push_back(*cell.value);
    }
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    out.columns.push_back({t.syllables[c], xs.front(), stats::quantile_sorted(xs, 0.25),
                           stats::quantile_sorted(xs, 0.5), stats::quantile_sorted(xs, 0.75), xs.back(),
                           stats::mean(xs), xs.size()});
  }
  return out;
}

}  // namespace khayal

#endif  // KHAYAL_AGGREGATE_HPP
