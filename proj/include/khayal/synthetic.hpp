#ifndef KHAYAL_SYNTHETIC_HPP
#define KHAYAL_SYNTHETIC_HPP

// Generator for the bundled synthetic dataset.
//
// Each concert sings every line of the bandish as one tala cycle, line 1
// most often. Onsets deviate from the canonical instants with a per-syllable
// spread that is large for the first three syllables of a line, small for the
// last two and moderate elsewhere; the melody of each syllable is the notated
// one, sometimes replaced by one of a few artist-specific variants. The pitch
// contour is written directly at the analysis hop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "khayal/annotation_io.hpp"
#include "khayal/generate.hpp"
#include "khayal/notation.hpp"
#include "khayal/raga.hpp"
#include "khayal/rhythm.hpp"
#include "khayal/rng.hpp"
#include "khayal/text.hpp"

namespace khayal {

inline constexpr std::string_view kJaJaReNotation =
    "bandish,raga,tala,beats_per_cycle\n"
    "Ja Ja Re,Bhimpalasi,teentaal,16\n"
    "m,s,P,s,n,(D)P,m,s,g,m,P,s,,g,R,S\n"
    "Jaa,-,Jaa,-,Re,Apne,Man,-,Di,Ra,Va,-,,Sun,Pa,Ne\n"
    "P,s,n,S',s,n,D,P,m,s,P,g,m,s,R,S\n"
    "Ab,-,To,Ko,-,Ri,Ya,Na,Pi,-,Ya,Bi,Na,-,Na,Ri\n"
    "g,m,P,s,n D,P,m,s,,g,m,P,n,S',s,s\n"
    "Ka,Se,Ka,-,Hun Main,Ja,Ee,-,,Ka,Ho,Mo,Re,Pi,-,-\n"
    "S',s,n,D,P,s,m,P,g,s,m,g,R,s,,S\n"
    "Pi,-,Ya,Ke,Dar,-,Sa,Na,Jii,-,Ya,Ra,Sa,-,,Ja\n";

inline constexpr std::string_view kBhimpalasiRaga =
    "# audav-sampoorna; g and n komal\n"
    "name = Bhimpalasi\n"
    "swars = S R g m P D n\n";

inline constexpr std::string_view kYamanRaga =
    "# tivra M\n"
    "name = Yaman\n"
    "swars = S R G M P D N\n";

struct SyntheticArtist {
  std::string concert_id;
  std::string artist_id;
  double tempo = 160.0;       ///< matra per minute
  double tonic_hz = 220.0;
  double spread = 1.0;        ///< scales every timing sd
  double lag = 0.0;           ///< mean deviation of the first syllable group, beats
};

struct SyntheticOptions {
  std::uint64_t seed = 20240611;
  std::vector<SyntheticArtist> artists{
      {"syn01", "artist_a", 140.0, 146.83, 1.0, 0.10},
      {"syn02", "artist_b", 165.0, 220.0, 1.3, 0.20},
      {"syn03", "artist_c", 195.0, 196.0, 0.8, 0.05},
  };
  /// Lines in performance order; every concert uses the same order.
  std::vector<int> order{1, 1, 2, 1, 3, 4, 1, 1, 2, 1, 3, 4, 1, 1, 2, 1, 3, 4, 1};
  double first_group_sd = 0.25;
  double middle_sd = 0.08;
  double boundary_sd = 0.015;
  double variant_prob_first = 0.9;
  double variant_prob_middle = 0.4;
  double half_cycle_drift = 0.02;  ///< uniform relative jitter per half cycle
  double min_gap_beats = 0.15;     ///< minimum onset spacing
  double vibrato_cents = 10.0;
  double vibrato_hz = 5.5;
};

struct SyntheticDataset {
  DatasetManifest manifest;
  CanonicalScore score;
  std::vector<PerformanceAnnotation> performances;
};

namespace detail {

enum class SyllableGroup { first, middle, boundary };

inline SyllableGroup group_of(std::size_t index, std::size_t count) {
  if (index < 3) return SyllableGroup::first;
  if (index + 2 >= count) return SyllableGroup::boundary;
  return SyllableGroup::middle;
}

/// A copy of `base` with one stretch moved a scale step up or down.
inline std::vector<SwarSymbol> make_variant(const std::vector<SwarSymbol>& base, const RagaScale& scale, Rng& rng) {
  auto v = base;
  const std::size_t n = v.size();
  const std::size_t len = std::min<std::size_t>(n, 2 + rng.below(std::max<std::size_t>(1, n / 3)));
  const std::size_t start = rng.below(n - len + 1);
  const bool up = rng.below(2) == 1;
  const auto& grid = scale.grid();
  for (std::size_t i = start; i < start + len; ++i) {
    const auto idx = scale.grid_index(v[i]);
    if (up && idx + 1 < grid.size()) v[i] = grid[idx + 1].swar;
    else if (!up && idx > 0) v[i] = grid[idx - 1].swar;
  }
  return v;
}

inline double round_to(double x, double step) { return std::round(x / step) * step; }

}  // namespace detail

inline SyntheticDataset make_synthetic_dataset(const SyntheticOptions& opts = {}) {
  SyntheticDataset ds;
  ds.score = parse_notation(kJaJaReNotation);
  const auto scale = parse_raga(kBhimpalasiRaga);
  const int bpc = ds.score.beats_per_cycle;
  const int half = bpc / 2;
  Rng rng(opts.seed);

  BandishEntry entry;
  entry.name = ds.score.bandish_name;
  entry.raga = ds.score.raga_name;
  entry.tala = ds.score.tala_name;
  entry.notation_file = "notation/ja_ja_re.csv";
  entry.raga_file = "ragas/bhimpalasi.raga";
  entry.repetitions.assign(ds.score.lines.size(), 0);

  for (const auto& artist : opts.artists) {
    PerformanceAnnotation p;
    p.concert_id = artist.concert_id;
    p.artist_id = artist.artist_id;
    p.bandish_name = ds.score.bandish_name;
    p.tonic_hz = artist.tonic_hz;
    entry.concerts.push_back(artist.concert_id);

    // Marks: a lead-in khali, then sam/khali for every sung cycle, then one
    // more sam and khali so late onsets of the last cycle stay on the grid.
    const double beat = 60.0 / artist.tempo;
    const std::size_t cycles = opts.order.size();
    double t = 1.0;
    p.beat_marks.push_back({t, BeatKind::khali});
    for (std::size_t h = 0; h < 2 * cycles + 2; ++h) {
      const double drift = 1.0 + opts.half_cycle_drift * (2.0 * rng.uniform() - 1.0);
      t = detail::round_to(t + half * beat * drift, 0.001);
      p.beat_marks.push_back({t, h % 2 == 0 ? BeatKind::sam : BeatKind::khali});
    }
    const BeatGrid grid(p.beat_marks, bpc);
    p.tempo_range = tempo_from_marks(p.beat_marks, bpc);

    // Habitual melodic variants, three per syllable.
    std::vector<std::vector<std::vector<std::vector<SwarSymbol>>>> variants(ds.score.lines.size());
    for (std::size_t l = 0; l < ds.score.lines.size(); ++l)
      for (const auto& syl : ds.score.lines[l].syllables) {
        std::vector<std::vector<SwarSymbol>> vs;
        const auto base = canonical_symbols(syl);
        for (int k = 0; k < 3; ++k) vs.push_back(detail::make_variant(base, scale, rng));
        variants[l].push_back(std::move(vs));
      }

    // Per-cycle onsets and intended strings.
    struct Sung {
      double onset;
      std::vector<SwarSymbol> symbols;
    };
    std::vector<std::vector<Sung>> sung(cycles);
    std::vector<int> rep_counter(ds.score.lines.size(), 0);
    double last_onset = grid.begin_time();
    for (std::size_t c = 0; c < cycles; ++c) {
      const int line = opts.order[c];
      const auto& canon = ds.score.lines[static_cast<std::size_t>(line - 1)];
      LineRendition rend;
      rend.line_index = line;
      rend.repetition_index = ++rep_counter[static_cast<std::size_t>(line - 1)];
      const double cycle_pos = static_cast<double>((c + 1) * static_cast<std::size_t>(bpc));
      std::vector<Silence> rests;
      for (std::size_t b = 0; b < canon.cells.size(); ++b) {
        if (canon.cells[b].kind != CellKind::rest) continue;
        const double pos = cycle_pos + static_cast<double>(b);
        const double iv = grid.local_interval_at(pos);
        rests.push_back({detail::round_to(grid.time_at(pos) + 0.1 * iv, 0.001),
                         detail::round_to(grid.time_at(pos) + 0.6 * iv, 0.001)});
      }

      for (std::size_t i = 0; i < canon.syllables.size(); ++i) {
        const auto& syl = canon.syllables[i];
        const auto group = detail::group_of(i, canon.syllables.size());
        const double sd = artist.spread * (group == detail::SyllableGroup::first    ? opts.first_group_sd
                                           : group == detail::SyllableGroup::middle ? opts.middle_sd
                                                                                    : opts.boundary_sd);
        const double mean = group == detail::SyllableGroup::first ? artist.lag : 0.0;
        const double pos = cycle_pos + syl.position;
        const double iv = grid.local_interval_at(pos);
        const double canonical = grid.time_at(pos);
        double floor_time = last_onset + opts.min_gap_beats * iv;
        for (const auto& s : rests)
          if (s.start < canonical) floor_time = std::max(floor_time, s.end + opts.min_gap_beats * iv);
        double onset = 0.0;
        for (int attempt = 0;; ++attempt) {
          onset = detail::round_to(canonical + (mean + sd * rng.normal()) * iv, 0.001);
          if (onset >= floor_time) break;
          if (attempt == 1000) throw DomainError("synthetic onsets cannot be placed; lower the timing spread");
        }
        rend.onsets.push_back({syl.label, onset});
        last_onset = onset;

        const double p_variant = group == detail::SyllableGroup::first    ? opts.variant_prob_first
                                 : group == detail::SyllableGroup::middle ? opts.variant_prob_middle
                                                                          : 0.0;
        auto symbols = canonical_symbols(syl);
        if (rng.uniform() < p_variant) symbols = variants[static_cast<std::size_t>(line - 1)][i][rng.below(3)];
        sung[c].push_back({onset, std::move(symbols)});
      }
      for (const auto& s : rests)
        if (s.start > rend.onsets.front().time) rend.silences.push_back(s);
      p.renditions.push_back(std::move(rend));
    }
    for (std::size_t c = 0; c < cycles; ++c)
      p.renditions[c].end_time = c + 1 < cycles ? p.renditions[c + 1].onsets.front().time : grid.end_time();
    for (std::size_t l = 0; l < rep_counter.size(); ++l) entry.repetitions[l] += rep_counter[l];

    // Contour: every syllable holds its string over [onset, end), with a
    // light vibrato; onset frames and silences are unvoiced.
    PitchContour pc;
    pc.start_time = 0.0;
    pc.frames.assign(static_cast<std::size_t>(std::ceil((grid.end_time() + 0.5) / kPitchHop)), 0.0);
    const Tonic tonic(artist.tonic_hz);
    for (std::size_t c = 0; c < cycles; ++c) {
      const auto durations = syllable_durations(p.renditions[c]);
      for (std::size_t i = 0; i < sung[c].size(); ++i) {
        const auto& s = sung[c][i];
        const double end = s.onset + durations[i].duration;
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        const auto first = static_cast<std::size_t>(std::ceil(s.onset / kPitchHop - 1e-9));
        const auto last = std::min(pc.frames.size(), static_cast<std::size_t>(std::ceil(end / kPitchHop - 1e-9)));
        const double n = static_cast<double>(s.symbols.size());
        for (std::size_t f = first; f < last; ++f) {
          const double ft = pc.time_of(f);
          const auto k = std::min(s.symbols.size() - 1,
                                  static_cast<std::size_t>(std::floor((ft - s.onset) / (end - s.onset) * n)));
          const double cents = scale.cents_of(s.symbols[k]) +
                               opts.vibrato_cents * std::sin(2.0 * std::numbers::pi * opts.vibrato_hz * ft + phase);
          pc.frames[f] = detail::round_to(cents_to_hz(cents, tonic), 0.01);
        }
        if (first < pc.frames.size()) pc.frames[first] = 0.0;
      }
    }
    p.pitch = std::move(pc);
    ds.performances.push_back(std::move(p));
  }
  ds.manifest.name = "synthetic";
  ds.manifest.bandish.push_back(std::move(entry));
  return ds;
}

/// Writes the dataset in the on-disk layout read by load_dataset.
inline void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticDataset& ds) {
  text::write_file(root / "manifest.json", serialize_manifest(ds.manifest));
  text::write_file(root / ds.manifest.bandish.front().notation_file, kJaJaReNotation);
  text::write_file(root / ds.manifest.bandish.front().raga_file, kBhimpalasiRaga);
  for (const auto& p : ds.performances) write_performance(root / "performances" / p.concert_id, p);
}

}  // namespace khayal

#endif  // KHAYAL_SYNTHETIC_HPP
