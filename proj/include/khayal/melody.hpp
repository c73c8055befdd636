#ifndef KHAYAL_MELODY_HPP
#define KHAYAL_MELODY_HPP

// Pitch-shape representation of sung syllables and their dissimilarity.
//
// A syllable's contour (cents above the tonic, 10 ms frames) is quantized
// frame by frame to the nearest raga note, split into per_beat x
// allotted_beats contiguous intervals, and each interval is replaced by its
// most frequent note. Two such strings of the same syllable are compared by
// the share of positions holding different notes (NLSS).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "khayal/clustering.hpp"
#include "khayal/error.hpp"
#include "khayal/levenshtein.hpp"
#include "khayal/pitchtrack.hpp"
#include "khayal/raga.hpp"
#include "khayal/swar.hpp"

namespace khayal {

inline constexpr int kDefaultPaaPerBeat = 10;

struct CentsSeries {
  double start_time = 0.0;
  double hop = kPitchHop;
  std::vector<double> values;

  double time_of(std::size_t i) const { return start_time + static_cast<double>(i) * hop; }
};

/// Frames of `pc` whose time lies in [t0, t1).
inline PitchContour contour_region(const PitchContour& pc, double t0, double t1) {
  PitchContour out;
  out.hop = pc.hop;
  const double first = std::ceil((t0 - pc.start_time) / pc.hop - 1e-9);
  const double last = std::ceil((t1 - pc.start_time) / pc.hop - 1e-9);
  const auto b = static_cast<std::size_t>(std::clamp(first, 0.0, static_cast<double>(pc.frames.size())));
  const auto e = static_cast<std::size_t>(std::clamp(last, 0.0, static_cast<double>(pc.frames.size())));
  out.start_time = pc.time_of(b);
  if (e > b) out.frames.assign(pc.frames.begin() + static_cast<std::ptrdiff_t>(b),
                               pc.frames.begin() + static_cast<std::ptrdiff_t>(e));
  return out;
}

/// Converts a contour to cents, bridging unvoiced frames linearly (in cents)
/// between their voiced neighbours and extending the first/last voiced value
/// over leading/trailing unvoiced frames.
inline CentsSeries continuous_cents(const PitchContour& pc, const Tonic& tonic) {
  CentsSeries out{pc.start_time, pc.hop, std::vector<double>(pc.frames.size(), 0.0)};
  std::vector<std::size_t> voiced;
  for (std::size_t i = 0; i < pc.frames.size(); ++i)
    if (pc.frames[i] > 0.0) {
      voiced.push_back(i);
      out.values[i] = hz_to_cents(pc.frames[i], tonic);
    }
  if (voiced.empty()) throw DomainError("contour region has no voiced frame");
  for (std::size_t i = 0; i < voiced.front(); ++i) out.values[i] = out.values[voiced.front()];
  for (std::size_t i = voiced.back() + 1; i < out.values.size(); ++i) out.values[i] = out.values[voiced.back()];
  for (std::size_t k = 0; k + 1 < voiced.size(); ++k) {
    const std::size_t a = voiced[k], b = voiced[k + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double f = static_cast<double>(i - a) / static_cast<double>(b - a);
      out.values[i] = out.values[a] + f * (out.values[b] - out.values[a]);
    }
  }
  return out;
}

/// Frames with time in [onset, onset + duration).
inline std::vector<double> slice_syllable(const CentsSeries& cs, double onset, double duration) {
  if (!(duration >= cs.hop - 1e-12))
    throw DomainError("syllable at " + text::format_time(onset) + " s is shorter than one frame");
  const double span_end = cs.time_of(cs.values.size());
  if (onset + duration <= cs.start_time || onset >= span_end)
    throw DomainError("syllable [" + text::format_time(onset) + ", " + text::format_time(onset + duration) +
                      ") s lies outside the contour");
  const double first = std::ceil((onset - cs.start_time) / cs.hop - 1e-9);
  const double last = std::ceil((onset + duration - cs.start_time) / cs.hop - 1e-9);
  const auto n = static_cast<double>(cs.values.size());
  const auto b = static_cast<std::size_t>(std::clamp(first, 0.0, n));
  const auto e = static_cast<std::size_t>(std::clamp(last, 0.0, n));
  if (e <= b) throw DomainError("syllable at " + text::format_time(onset) + " s covers no contour frame");
  return {cs.values.begin() + static_cast<std::ptrdiff_t>(b), cs.values.begin() + static_cast<std::ptrdiff_t>(e)};
}

struct PaaString {
  std::string syllable_label;
  int repetition_index = 0;
  std::vector<SwarSymbol> symbols;

  std::string str() const { return render_string(symbols); }
  friend bool operator==(const PaaString&, const PaaString&) = default;
};

/// Modal quantized note per interval. Intervals split the frames as evenly
/// as possible, the first (frames % intervals) intervals taking one extra
/// frame. Ties go to the note that appears first in the interval; an empty
/// interval repeats its predecessor.
inline std::vector<SwarSymbol> paa_symbols(std::span<const double> segment, int allotted_beats,
                                           const RagaScale& scale, int per_beat = kDefaultPaaPerBeat) {
  if (segment.empty()) throw DomainError("PAA of an empty segment");
  if (allotted_beats < 1) throw DomainError("allotted_beats must be at least 1");
  if (per_beat < 1) throw ConfigError("PAA intervals per beat must be at least 1");
  const std::size_t intervals = static_cast<std::size_t>(per_beat) * static_cast<std::size_t>(allotted_beats);

  std::vector<SwarSymbol> q;
  q.reserve(segment.size());
  for (double c : segment) q.push_back(quantize_cents(c, scale));

  const std::size_t base = q.size() / intervals;
  const std::size_t extra = q.size() % intervals;
  std::vector<SwarSymbol> out;
  out.reserve(intervals);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < intervals; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    if (len == 0) {
      if (out.empty()) throw DomainError("first PAA interval is empty");
      out.push_back(out.back());
      continue;
    }
    SwarSymbol best = q[pos];
    std::size_t best_count = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      std::size_t count = 0;
      for (std::size_t j = pos; j < pos + len; ++j) count += q[j] == q[i] ? 1 : 0;
      if (count > best_count) {
        best = q[i];
        best_count = count;
      }
    }
    out.push_back(best);
    pos += len;
  }
  return out;
}

inline PaaString paa_string(std::span<const double> segment, int allotted_beats, const RagaScale& scale,
                            int per_beat = kDefaultPaaPerBeat) {
  return PaaString{{}, 0, paa_symbols(segment, allotted_beats, scale, per_beat)};
}

inline std::size_t hamming(const std::vector<SwarSymbol>& a, const std::vector<SwarSymbol>& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] == b[i] ? 0 : 1;
  return d;
}

/// Normalized substitution score of two strings of the same syllable:
/// differing positions / length.
inline double nlss(const PaaString& a, const PaaString& b) {
  if (a.symbols.size() != b.symbols.size())
    throw ContractError("NLSS needs equal-length strings (" + std::to_string(a.symbols.size()) + " vs " +
                        std::to_string(b.symbols.size()) + ")");
  if (a.symbols.empty()) return 0.0;
  return static_cast<double>(hamming(a.symbols, b.symbols)) / static_cast<double>(a.symbols.size());
}

/// Substitutions of an optimal edit alignment over the longer length; for
/// strings whose lengths may differ.
inline double nlss_general(const std::vector<SwarSymbol>& a, const std::vector<SwarSymbol>& b) {
  const auto len = std::max(a.size(), b.size());
  if (len == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b).substitutions) / static_cast<double>(len);
}

struct NlssMatrix {
  std::vector<int> labels;  ///< repetition indices
  DistanceMatrix values;
  /// Edit distance and substitution count of each pair, alongside the score.
  std::vector<std::size_t> edit_distance;
  std::vector<std::size_t> substitutions;
};

inline NlssMatrix pairwise_nlss(std::span<const PaaString> reps) {
  if (reps.size() < 2) throw InsufficientDataError("pairwise NLSS needs at least two repetitions");
  const std::size_t n = reps.size();
  NlssMatrix m;
  m.values = DistanceMatrix(n);
  m.edit_distance.assign(n * n, 0);
  m.substitutions.assign(n * n, 0);
  for (const auto& r : reps) m.labels.push_back(r.repetition_index);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = nlss(reps[i], reps[j]);
      m.values.at(i, j) = m.values.at(j, i) = s;
      const auto e = levenshtein(reps[i].symbols, reps[j].symbols);
      m.edit_distance[i * n + j] = m.edit_distance[j * n + i] = e.distance;
      m.substitutions[i * n + j] = m.substitutions[j * n + i] = e.substitutions;
    }
  return m;
}

/// Mean over the strict upper triangle.
inline double mean_nlss(const NlssMatrix& m) {
  const std::size_t n = m.values.size;
  if (n < 2) throw InsufficientDataError("mean NLSS needs at least a 2x2 matrix");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += m.values.at(i, j);
  return sum / static_cast<double>(n * (n - 1) / 2);
}

struct VariationClusters {
  double threshold = 0.0;
  std::vector<int> labels;       ///< repetition indices, matrix order
  std::vector<int> assignments;  ///< cluster id per repetition
  std::vector<Merge> dendrogram;
  int cluster_count() const {
    return assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  }
};

inline VariationClusters cluster_variations(const NlssMatrix& m, double threshold) {
  VariationClusters out;
  out.threshold = threshold;
  out.labels = m.labels;
  out.dendrogram = average_linkage(m.values);
  out.assignments = cut_dendrogram(m.values.size, out.dendrogram, threshold);
  return out;
}

}  // namespace khayal

#endif  // KHAYAL_MELODY_HPP
