#ifndef KHAYAL_RHYTHM_HPP
#define KHAYAL_RHYTHM_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "khayal/annotation_io.hpp"
#include "khayal/error.hpp"
#include "khayal/notation.hpp"
#include "khayal/stats.hpp"

namespace khayal {

struct BeatInstant {
  int cycle = 0;
  int beat = 0;  ///< 0 .. beats_per_cycle - 1
  double time = 0.0;
};

/// Beat instants obtained by splitting every half cycle (the span between
/// consecutive sam/khali marks) into equal beats.
///
/// Positions are measured in absolute beats: cycle * beats_per_cycle + beat,
/// with the first mark at position 0 (sam) or beats_per_cycle / 2 (khali).
class BeatGrid {
 public:
  BeatGrid(std::vector<BeatMark> marks, int beats_per_cycle) : marks_(std::move(marks)), bpc_(beats_per_cycle) {
    if (marks_.size() < 2) throw InsufficientDataError("a beat grid needs at least two sam/khali marks");
    if (bpc_ <= 0 || bpc_ % 2 != 0) throw ConfigError("beats_per_cycle must be a positive even number");
    for (std::size_t i = 1; i < marks_.size(); ++i) {
      if (!(marks_[i].time > marks_[i - 1].time))
        throw ValidationError("beat marks must be strictly increasing (mark " + std::to_string(i + 1) + ")");
      if (marks_[i].kind == marks_[i - 1].kind)
        throw ValidationError("beat marks must alternate sam/khali (mark " + std::to_string(i + 1) + ")");
    }
    const int half = bpc_ / 2;
    first_position_ = marks_.front().kind == BeatKind::sam ? 0 : half;
    for (std::size_t h = 0; h + 1 < marks_.size(); ++h) {
      intervals_.push_back((marks_[h + 1].time - marks_[h].time) / half);
      for (int k = 0; k < half; ++k) push_instant(mark_position(h) + k, marks_[h].time + k * intervals_.back());
    }
    push_instant(mark_position(marks_.size() - 1), marks_.back().time);
  }

  int beats_per_cycle() const { return bpc_; }
  const std::vector<BeatMark>& marks() const { return marks_; }
  const std::vector<BeatInstant>& instants() const { return instants_; }
  /// Beat duration of each half cycle, in seconds.
  const std::vector<double>& local_beat_intervals() const { return intervals_; }

  double begin_time() const { return marks_.front().time; }
  double end_time() const { return marks_.back().time; }
  double first_position() const { return first_position_; }
  double last_position() const { return mark_position(marks_.size() - 1); }

  /// Half cycle holding an absolute position; a position exactly on a mark
  /// belongs to the half cycle that starts there (the last mark to the one
  /// ending there).
  std::size_t half_cycle_of(double position) const {
    const double rel = (position - first_position_) / (bpc_ / 2);
    const auto h = static_cast<long long>(std::floor(rel));
    return static_cast<std::size_t>(std::clamp<long long>(h, 0, static_cast<long long>(intervals_.size()) - 1));
  }

  double local_interval_at(double position) const { return intervals_[half_cycle_of(position)]; }

  double time_at(double position) const {
    if (position < first_position_ || position > last_position())
      throw OutOfRangeError("beat position " + text::format_double(position) + " outside the grid");
    const auto h = half_cycle_of(position);
    return marks_[h].time + (position - mark_position(h)) * intervals_[h];
  }

 private:
  double mark_position(std::size_t i) const { return first_position_ + static_cast<double>(i) * (bpc_ / 2); }

  void push_instant(double position, double time) {
    const auto p = static_cast<int>(position);
    instants_.push_back({p / bpc_, p % bpc_, time});
  }

  std::vector<BeatMark> marks_;
  int bpc_;
  double first_position_ = 0.0;
  std::vector<double> intervals_;
  std::vector<BeatInstant> instants_;
};

inline BeatGrid build_beat_grid(const std::vector<BeatMark>& marks, int beats_per_cycle) {
  return BeatGrid(marks, beats_per_cycle);
}

struct TimingDeviation {
  std::string syllable_label;
  int line_index = 1;
  int repetition_index = 1;
  /// Signed offset in local beats; positive means the singer lags.
  double deviation = 0.0;
  double onset_time = 0.0;
  double canonical_time = 0.0;
};

/// Matches every onset to the nearest occurrence (over cycles) of its
/// canonical position and expresses the offset in local beat intervals.
/// Equidistant candidates resolve to the earlier cycle.
inline std::vector<TimingDeviation> assign_and_deviate(const LineRendition& rendition,
                                                       const std::vector<CanonicalSyllable>& canon,
                                                       const BeatGrid& grid) {
  std::vector<TimingDeviation> out;
  const int bpc = grid.beats_per_cycle();
  for (const auto& onset : rendition.onsets) {
    const auto it = std::find_if(canon.begin(), canon.end(),
                                 [&](const CanonicalSyllable& s) { return s.label == onset.label; });
    if (it == canon.end()) throw ValidationError("syllable '" + onset.label + "' not in canonical line");
    if (onset.time < grid.begin_time() || onset.time > grid.end_time())
      throw OutOfRangeError("onset of '" + onset.label + "' at " + text::format_time(onset.time) +
                            " s is outside the beat grid");

    const auto first_cycle = static_cast<long long>(std::floor((grid.first_position() - it->position) / bpc));
    const auto last_cycle = static_cast<long long>(std::ceil((grid.last_position() - it->position) / bpc));
    bool found = false;
    double best_pos = 0.0, best_time = 0.0, best_dist = 0.0;
    for (long long c = first_cycle; c <= last_cycle; ++c) {
      const double pos = static_cast<double>(c * bpc) + it->position;
      if (pos < grid.first_position() || pos > grid.last_position()) continue;
      const double t = grid.time_at(pos);
      const double d = std::abs(onset.time - t);
      if (!found || d < best_dist) {
        found = true;
        best_pos = pos;
        best_time = t;
        best_dist = d;
      }
    }
    if (!found)
      throw OutOfRangeError("beat grid holds no occurrence of the canonical position of '" + onset.label + "'");
    const double dev = (onset.time - best_time) / grid.local_interval_at(best_pos);
    if (!(std::abs(dev) < bpc / 2.0))
      throw DataError("onset of '" + onset.label + "' at " + text::format_time(onset.time) + " s deviates " +
                      text::format_double(dev) + " beats, half a cycle or more");
    out.push_back({onset.label, rendition.line_index, rendition.repetition_index, dev, onset.time, best_time});
  }
  return out;
}

struct SyllableDuration {
  std::string syllable_label;
  int repetition_index = 1;
  double onset_time = 0.0;
  double duration = 0.0;
};

/// Each syllable lasts until the next onset or the start of the next
/// silence, whichever comes first; the last one ends at a following silence
/// or the end of the rendition.
inline std::vector<SyllableDuration> syllable_durations(const LineRendition& r) {
  std::vector<SyllableDuration> out;
  for (std::size_t i = 0; i < r.onsets.size(); ++i) {
    const double onset = r.onsets[i].time;
    double end = i + 1 < r.onsets.size() ? r.onsets[i + 1].time : r.end_time;
    for (const auto& s : r.silences)
      if (s.start >= onset) end = std::min(end, s.start);
    const double d = end - onset;
    if (!(d > 0.0))
      throw DataError("syllable '" + r.onsets[i].label + "' at " + text::format_time(onset) +
                      " s (repetition " + std::to_string(r.repetition_index) + ") has non-positive duration");
    out.push_back({r.onsets[i].label, r.repetition_index, onset, d});
  }
  return out;
}

struct DeviationStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
  /// sd is 0 only because a single observation exists.
  bool single_sample() const { return n == 1; }
};

/// Per-syllable mean and sample sd of deviations, keyed by label.
inline std::map<std::string, DeviationStats> deviation_stats(std::span<const TimingDeviation> devs) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& d : devs) groups[d.syllable_label].push_back(d.deviation);
  std::map<std::string, DeviationStats> out;
  for (const auto& [label, xs] : groups) out[label] = {stats::mean(xs), stats::sample_sd(xs), xs.size()};
  return out;
}

}  // namespace khayal

#endif  // KHAYAL_RHYTHM_HPP
