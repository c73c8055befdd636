#ifndef KHAYAL_GENERATE_HPP
#define KHAYAL_GENERATE_HPP

// Synthetic renditions of a bandish line.
//
// An artist model keeps, per syllable, every observed timing deviation and
// every observed PAA string. A schedule draws one deviation and one string
// per syllable (bootstrap resampling); synthesis renders each string
// interval as a sine at the interval's note.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "khayal/aggregate.hpp"
#include "khayal/annotation_io.hpp"
#include "khayal/error.hpp"
#include "khayal/melody.hpp"
#include "khayal/notation.hpp"
#include "khayal/raga.hpp"
#include "khayal/rng.hpp"
#include "khayal/wav.hpp"

namespace khayal {

struct SyllableModel {
  std::vector<double> deviations;                   ///< empirical multiset, observation order
  std::vector<std::vector<SwarSymbol>> strings;     ///< PAA pool
  std::vector<double> weights;                      ///< per string; empty = uniform
  friend bool operator==(const SyllableModel&, const SyllableModel&) = default;
};

struct ArtistModel {
  std::string artist_id;
  std::string bandish;
  int line_index = 1;
  double tonic_hz = 0.0;
  TempoRange tempo;
  std::map<std::string, SyllableModel> syllables;
  friend bool operator==(const ArtistModel&, const ArtistModel&) = default;
};

struct FitOptions {
  /// When set, strings are weighted so that every NLSS cluster (cut at this
  /// threshold) carries equal probability mass.
  std::optional<double> cluster_threshold;
};

inline ArtistModel fit_artist_model(const std::string& artist, int line, const std::vector<TimingRecord>& timing,
                                    const std::vector<PaaRecord>& paa, const FitOptions& opts = {}) {
  ArtistModel m;
  m.artist_id = artist;
  m.line_index = line;
  for (const auto& r : timing)
    if (r.artist == artist && r.line == line) m.syllables[r.syllable].deviations.push_back(r.deviation);
  for (const auto& r : paa)
    if (r.artist == artist && r.line == line) m.syllables[r.syllable].strings.push_back(r.symbols);

  if (opts.cluster_threshold) {
    for (auto& [label, sm] : m.syllables) {
      const auto& pool = sm.strings;
      if (pool.size() < 2) continue;
      bool same_length = std::all_of(pool.begin(), pool.end(), [&](const auto& s) { return s.size() == pool[0].size(); });
      if (!same_length) continue;
      std::vector<PaaString> reps;
      for (std::size_t i = 0; i < pool.size(); ++i) reps.push_back({label, static_cast<int>(i + 1), pool[i]});
      const auto clusters = cluster_variations(pairwise_nlss(reps), *opts.cluster_threshold);
      const int k = clusters.cluster_count();
      std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
      for (int a : clusters.assignments) ++sizes[static_cast<std::size_t>(a)];
      sm.weights.clear();
      for (int a : clusters.assignments)
        sm.weights.push_back(1.0 / (static_cast<double>(k) * static_cast<double>(sizes[static_cast<std::size_t>(a)])));
    }
  }
  return m;
}

inline std::string serialize_model(const ArtistModel& m, std::optional<std::uint64_t> seed = std::nullopt) {
  nlohmann::ordered_json j;
  if (seed) j["seed"] = *seed;
  j["artist"] = m.artist_id;
  j["bandish"] = m.bandish;
  j["line"] = m.line_index;
  j["tonic_hz"] = m.tonic_hz;
  j["tempo_min"] = m.tempo.min;
  j["tempo_max"] = m.tempo.max;
  j["syllables"] = nlohmann::ordered_json::object();
  for (const auto& [label, s] : m.syllables) {
    nlohmann::ordered_json e;
    e["deviations"] = s.deviations;
    std::vector<std::string> strings;
    for (const auto& v : s.strings) strings.push_back(render_string(v));
    e["strings"] = strings;
    e["weights"] = s.weights;
    j["syllables"][label] = e;
  }
  return j.dump(2) + "\n";
}

inline ArtistModel parse_model(const std::string& content) {
  try {
    const auto j = nlohmann::json::parse(content);
    ArtistModel m;
    m.artist_id = j.at("artist").get<std::string>();
    m.bandish = j.value("bandish", "");
    m.line_index = j.at("line").get<int>();
    m.tonic_hz = j.value("tonic_hz", 0.0);
    m.tempo = {j.value("tempo_min", 0.0), j.value("tempo_max", 0.0)};
    for (const auto& [label, e] : j.at("syllables").items()) {
      SyllableModel s;
      s.deviations = e.at("deviations").get<std::vector<double>>();
      for (const auto& str : e.at("strings").get<std::vector<std::string>>()) s.strings.push_back(parse_string(str));
      s.weights = e.value("weights", std::vector<double>{});
      m.syllables[label] = std::move(s);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

/// The syllable's notated melody spread over per_beat intervals per allotted
/// beat: each beat's notes share that beat's intervals (front-loaded), and a
/// held beat repeats the last note.
inline std::vector<SwarSymbol> canonical_symbols(const CanonicalSyllable& s, int per_beat = kDefaultPaaPerBeat) {
  std::vector<SwarSymbol> out;
  SwarSymbol last = s.swars.empty() ? SwarSymbol{} : s.swars.front();
  for (const auto& beat : s.beat_swars) {
    if (beat.empty()) {
      out.insert(out.end(), static_cast<std::size_t>(per_beat), last);
      continue;
    }
    const std::size_t k = beat.size();
    const std::size_t base = static_cast<std::size_t>(per_beat) / k;
    const std::size_t extra = static_cast<std::size_t>(per_beat) % k;
    for (std::size_t i = 0; i < k; ++i) out.insert(out.end(), base + (i < extra ? 1 : 0), beat[i]);
    last = beat.back();
  }
  return out;
}

struct ScheduleEvent {
  std::string syllable;
  double onset = 0.0;     ///< seconds from the start of the cycle
  double duration = 0.0;  ///< nominal: canonical span at the schedule tempo
  double deviation = 0.0; ///< beats
  std::vector<SwarSymbol> symbols;
  bool fallback = false;  ///< syllable not in the model; canonical values used
  bool clamped = false;   ///< retries exhausted; onset forced after its predecessor
};

struct ExpressiveSchedule {
  int line_index = 1;
  double tempo = 0.0;  ///< matra per minute
  double tonic_hz = 0.0;
  std::uint64_t seed = 0;
  int beats_per_cycle = 16;
  double beat_interval = 0.0;
  double cycle_duration = 0.0;
  std::vector<ScheduleEvent> events;  ///< time ordered
};

struct SampleOptions {
  double jitter_sigma = 0.0;  ///< Gaussian noise added to drawn deviations, in beats
  int max_retries = 16;
  int per_beat = kDefaultPaaPerBeat;
};

inline ExpressiveSchedule canonical_schedule(const CanonicalScore& score, int line, double tempo, const Tonic& tonic,
                                             int per_beat = kDefaultPaaPerBeat) {
  if (!(tempo > 0.0)) throw ConfigError("tempo must be positive");
  ExpressiveSchedule s;
  s.line_index = line;
  s.tempo = tempo;
  s.tonic_hz = tonic.hz();
  s.beats_per_cycle = score.beats_per_cycle;
  s.beat_interval = 60.0 / tempo;
  s.cycle_duration = score.beats_per_cycle * s.beat_interval;
  for (const auto& syl : canonical_positions(score, line))
    s.events.push_back({syl.label, syl.position * s.beat_interval, syl.span_beats * s.beat_interval, 0.0,
                        canonical_symbols(syl, per_beat), false, false});
  return s;
}

/// Draws deviations and strings per syllable, in canonical order, from one
/// seeded stream: deviation first, then string.
inline ExpressiveSchedule sample_schedule(const ArtistModel& model, const CanonicalScore& score, int line,
                                          double tempo, const Tonic& tonic, std::uint64_t seed,
                                          const SampleOptions& opts = {}) {
  auto s = canonical_schedule(score, line, tempo, tonic, opts.per_beat);
  s.seed = seed;
  Rng rng(seed);
  const double frame = kPitchHop;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    auto& ev = s.events[i];
    const double canonical_onset = ev.onset;
    const auto it = model.syllables.find(ev.syllable);
    const SyllableModel* sm = it != model.syllables.end() ? &it->second : nullptr;

    const double prev = i > 0 ? s.events[i - 1].onset : -1.0;
    if (!sm || sm->deviations.empty()) {
      ev.fallback = true;
      if (ev.onset <= prev) {
        ev.onset = prev + frame;
        ev.deviation = (ev.onset - canonical_onset) / s.beat_interval;
        ev.clamped = true;
      }
    } else {
      bool placed = false;
      for (int attempt = 0; attempt <= opts.max_retries && !placed; ++attempt) {
        double dev = sm->deviations[rng.below(sm->deviations.size())];
        if (opts.jitter_sigma > 0.0) dev += opts.jitter_sigma * rng.normal();
        const double onset = canonical_onset + dev * s.beat_interval;
        if (onset > prev && onset >= 0.0) {
          ev.deviation = dev;
          ev.onset = onset;
          placed = true;
        }
      }
      if (!placed) {
        ev.onset = std::max(prev + frame, 0.0);
        ev.deviation = (ev.onset - canonical_onset) / s.beat_interval;
        ev.clamped = true;
      }
    }

    if (sm && !sm->strings.empty()) {
      std::size_t pick = 0;
      if (sm->weights.size() == sm->strings.size()) {
        double total = 0.0;
        for (double w : sm->weights) total += w;
        double u = rng.uniform() * total;
        pick = sm->strings.size() - 1;
        for (std::size_t k = 0; k < sm->weights.size(); ++k) {
          if (u < sm->weights[k]) {
            pick = k;
            break;
          }
          u -= sm->weights[k];
        }
      } else {
        pick = rng.below(sm->strings.size());
      }
      ev.symbols = sm->strings[pick];
    } else {
      ev.fallback = true;
    }
  }
  return s;
}

inline std::string serialize_schedule(const ExpressiveSchedule& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["line"] = s.line_index;
  j["tempo"] = s.tempo;
  j["tonic_hz"] = s.tonic_hz;
  j["beats_per_cycle"] = s.beats_per_cycle;
  j["beat_interval"] = s.beat_interval;
  j["cycle_duration"] = s.cycle_duration;
  j["events"] = nlohmann::ordered_json::array();
  for (const auto& e : s.events) {
    nlohmann::ordered_json o;
    o["syllable"] = e.syllable;
    o["onset_s"] = e.onset;
    o["duration_s"] = e.duration;
    o["deviation"] = e.deviation;
    o["paa"] = render_string(e.symbols);
    o["fallback"] = e.fallback;
    o["clamped"] = e.clamped;
    j["events"].push_back(o);
  }
  return j.dump(2) + "\n";
}

inline ExpressiveSchedule parse_schedule(const std::string& content) {
  try {
    const auto j = nlohmann::json::parse(content);
    ExpressiveSchedule s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.line_index = j.at("line").get<int>();
    s.tempo = j.at("tempo").get<double>();
    s.tonic_hz = j.at("tonic_hz").get<double>();
    s.beats_per_cycle = j.at("beats_per_cycle").get<int>();
    s.beat_interval = j.at("beat_interval").get<double>();
    s.cycle_duration = j.at("cycle_duration").get<double>();
    for (const auto& o : j.at("events"))
      s.events.push_back({o.at("syllable").get<std::string>(), o.at("onset_s").get<double>(),
                          o.at("duration_s").get<double>(), o.at("deviation").get<double>(),
                          parse_string(o.at("paa").get<std::string>()), o.value("fallback", false),
                          o.value("clamped", false)});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("schedule file: ") + e.what());
  }
}

/// Note frequency of the string interval sounding at `t` within an event
/// that lasts `duration` seconds.
inline double event_frequency_at(const ScheduleEvent& e, double duration, double t, const RagaScale& scale,
                                 const Tonic& tonic) {
  if (e.symbols.empty()) throw DomainError("event '" + e.syllable + "' has no symbols");
  const auto n = e.symbols.size();
  const double frac = (t - e.onset) / duration;
  const auto k = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, std::floor(frac * static_cast<double>(n)))));
  return cents_to_hz(scale.cents_of(e.symbols[k]), tonic);
}

struct RenderedAudio {
  MonoAudio audio;
  std::vector<std::string> flags;  ///< e.g. truncated events
};

inline constexpr double kSynthAmplitude = 0.8;
inline constexpr double kSynthFade = 0.005;

/// Sine rendering of a schedule. Within an event the phase runs on across
/// interval boundaries; each event starts and ends with a raised-cosine
/// fade. An event still sounding when the next one starts is cut there.
inline RenderedAudio synthesize(const ExpressiveSchedule& s, const RagaScale& scale, int sample_rate) {
  if (sample_rate < 8000) throw ConfigError("synthesis sample rate must be at least 8000 Hz");
  const Tonic tonic(s.tonic_hz);
  const double sr = sample_rate;
  RenderedAudio out;
  out.audio.sample_rate = sample_rate;

  std::vector<double> ends;
  double total = s.cycle_duration;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (i > 0 && s.events[i].onset < s.events[i - 1].onset)
      throw DomainError("schedule events are not time ordered");
    double end = s.events[i].onset + s.events[i].duration;
    if (i + 1 < s.events.size() && s.events[i + 1].onset < end) {
      end = s.events[i + 1].onset;
      out.flags.push_back("event '" + s.events[i].syllable + "' truncated by '" + s.events[i + 1].syllable + "'");
    }
    ends.push_back(end);
    total = std::max(total, end);
  }
  out.audio.samples.assign(static_cast<std::size_t>(std::ceil(total * sr - 1e-9)), 0.0f);

  const auto fade = std::max<long long>(1, std::llround(kSynthFade * sr));
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    if (e.symbols.empty()) continue;
    const auto s0 = std::llround(e.onset * sr);
    const auto s1 = std::min<long long>(std::llround(ends[i] * sr), static_cast<long long>(out.audio.samples.size()));
    const double nominal = e.duration * sr;
    const auto n_int = static_cast<double>(e.symbols.size());
    std::vector<double> freqs;
    for (const auto& sym : e.symbols) freqs.push_back(cents_to_hz(scale.cents_of(sym), tonic));
    double phase = 0.0;
    for (long long n = s0; n < s1; ++n) {
      const double rel = static_cast<double>(n - s0);
      const auto k = std::min(e.symbols.size() - 1, static_cast<std::size_t>(std::floor(rel * n_int / nominal)));
      const long long from_start = n - s0, to_end = s1 - 1 - n;
      double env = 1.0;
      if (from_start < fade) env = std::min(env, 0.5 * (1.0 - std::cos(std::numbers::pi * from_start / fade)));
      if (to_end < fade) env = std::min(env, 0.5 * (1.0 - std::cos(std::numbers::pi * to_end / fade)));
      out.audio.samples[static_cast<std::size_t>(n)] = static_cast<float>(kSynthAmplitude * env * std::sin(phase));
      phase += 2.0 * std::numbers::pi * freqs[k] / sr;
      if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    }
  }
  return out;
}

inline RenderedAudio render_canonical(const CanonicalScore& score, int line, double tempo, const Tonic& tonic,
                                      const RagaScale& scale, int sample_rate, int per_beat = kDefaultPaaPerBeat) {
  return synthesize(canonical_schedule(score, line, tempo, tonic, per_beat), scale, sample_rate);
}

}  // namespace khayal

#endif  // KHAYAL_GENERATE_HPP
