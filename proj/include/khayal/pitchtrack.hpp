#ifndef KHAYAL_PITCHTRACK_HPP
#define KHAYAL_PITCHTRACK_HPP

// Frame-wise F0 estimation by normalized autocorrelation.
//
// Each frame of frame_length seconds is split into an analysis window of W
// samples and a lag reserve. For every candidate lag the window is
// correlated with its lagged copy and normalized by both energies, so a
// perfectly periodic frame scores 1 at its period and its multiples. The
// smallest local maximum within 85% of the best score is taken as the
// period, refined by a parabola through its neighbours. Frames whose peak
// stays below the voicing threshold are unvoiced (f0 = 0).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "khayal/error.hpp"
#include "khayal/text.hpp"

namespace khayal {

/// Analysis hop of every contour in the toolkit.
inline constexpr double kPitchHop = 0.010;

struct TrackerParams {
  double fmin = 80.0;
  double fmax = 1000.0;
  double frame_length = 0.025;
  double voicing_threshold = 0.45;
};

/// Uniformly sampled F0 series; 0 marks an unvoiced frame.
struct PitchContour {
  double hop = kPitchHop;
  double start_time = 0.0;
  std::vector<double> frames;

  double time_of(std::size_t i) const { return start_time + static_cast<double>(i) * hop; }
  double end_time() const { return start_time + static_cast<double>(frames.size()) * hop; }
};

inline void validate(const TrackerParams& p, int sample_rate) {
  if (sample_rate < 8000) throw ConfigError("sample rate must be at least 8000 Hz, got " + std::to_string(sample_rate));
  if (!(p.fmin > 0.0 && p.fmin < p.fmax))
    throw ConfigError("need 0 < fmin < fmax (fmin " + text::format_double(p.fmin) + ", fmax " +
                      text::format_double(p.fmax) + ")");
  if (!(p.fmax < sample_rate / 2.0))
    throw ConfigError("fmax " + text::format_double(p.fmax) + " Hz is not below the Nyquist frequency");
  if (!(p.frame_length >= 2.0 / p.fmin - 1e-12))
    throw ConfigError("frame_length must cover two periods of fmin (>= " + text::format_double(2.0 / p.fmin) +
                      " s)");
  if (!(p.voicing_threshold > 0.0 && p.voicing_threshold < 1.0))
    throw ConfigError("voicing_threshold must lie in (0, 1)");
}

/// Number of hop-spaced frames that fit in `duration` seconds.
inline std::size_t frame_count(double duration, double frame_length, double hop = kPitchHop) {
  if (duration < frame_length) return 0;
  return static_cast<std::size_t>(std::floor((duration - frame_length) / hop + 1e-9)) + 1;
}

inline PitchContour extract_f0(std::span<const float> audio, int sample_rate, const TrackerParams& params = {}) {
  validate(params, sample_rate);
  if (audio.empty()) throw DomainError("cannot track pitch of empty audio");
  const double sr = sample_rate;
  const double duration = static_cast<double>(audio.size()) / sr;
  const std::size_t frames = frame_count(duration, params.frame_length);
  if (frames == 0) throw DomainError("audio is shorter than one analysis frame");

  const auto frame_len = static_cast<std::size_t>(std::llround(params.frame_length * sr));
  const auto lag_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sr / params.fmax)));
  const auto lag_max = static_cast<std::size_t>(std::ceil(sr / params.fmin));
  if (lag_max + 2 >= frame_len) throw ConfigError("frame too short for the lag range");
  const std::size_t window = frame_len - lag_max - 1;

  PitchContour out;
  out.start_time = params.frame_length / 2.0;
  out.frames.assign(frames, 0.0);

  std::vector<double> x(frame_len);
  std::vector<double> score(lag_max + 2, 0.0);
  const double hop_samples = kPitchHop * sr;

  for (std::size_t f = 0; f < frames; ++f) {
    const auto begin = static_cast<std::size_t>(std::llround(static_cast<double>(f) * hop_samples));
    double dc = 0.0;
    for (std::size_t i = 0; i < frame_len; ++i) {
      x[i] = begin + i < audio.size() ? static_cast<double>(audio[begin + i]) : 0.0;
      dc += x[i];
    }
    dc /= static_cast<double>(frame_len);
    double power = 0.0;
    for (auto& v : x) {
      v -= dc;
      power += v * v;
    }
    if (std::sqrt(power / static_cast<double>(frame_len)) < 1e-4) continue;

    double e0 = 0.0;
    for (std::size_t n = 0; n < window; ++n) e0 += x[n] * x[n];
    double elag = 0.0;
    for (std::size_t n = lag_min - 1; n < lag_min - 1 + window; ++n) elag += x[n] * x[n];

    double best = -1.0;
    for (std::size_t lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      if (lag > lag_min - 1) {
        const double out_v = x[lag - 1];
        const double in_v = x[lag - 1 + window];
        elag += in_v * in_v - out_v * out_v;
      }
      double acc = 0.0;
      for (std::size_t n = 0; n < window; ++n) acc += x[n] * x[n + lag];
      const double denom = std::sqrt(e0 * std::max(elag, 0.0));
      score[lag] = denom > 0.0 ? acc / denom : 0.0;
      if (lag >= lag_min && lag <= lag_max) best = std::max(best, score[lag]);
    }
    if (best < params.voicing_threshold) continue;

    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      if (score[lag] >= score[lag - 1] && score[lag] > score[lag + 1] && score[lag] >= 0.85 * best) {
        pick = lag;
        break;
      }
    }
    if (pick == 0 || score[pick] < params.voicing_threshold) continue;

    const double a = score[pick - 1], b = score[pick], c = score[pick + 1];
    const double curv = a - 2.0 * b + c;
    const double shift = curv != 0.0 ? std::clamp(0.5 * (a - c) / curv, -0.5, 0.5) : 0.0;
    const double f0 = sr / (static_cast<double>(pick) + shift);
    if (f0 >= params.fmin && f0 <= params.fmax) out.frames[f] = f0;
  }
  return out;
}

}  // namespace khayal

#endif  // KHAYAL_PITCHTRACK_HPP
