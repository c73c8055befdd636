#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "khayal/generate.hpp"
#include "khayal/synthetic.hpp"
#include "support.hpp"

using namespace khayal;

namespace {

const char* kTwoLine =
    "bandish,raga,tala,beats_per_cycle\n"
    "Tiny,Bhimpalasi,teentaal,16\n"
    "S R,s,g,m,P,s,D,n,S',s,,n,D,P,m,g\n"
    "Ta,-,Na,Ri,Ma,-,Pa,Dha,Ni,-,,Sa,Re,Ga,Mo,Po\n"
    "S,R,g,m,P,D,n,S',S',n,D,P,m,g,R,S\n"
    "A,B,C,D,E,F,G,H,I,J,K,L,M,N,O,P\n";

CanonicalScore tiny() { return parse_notation(kTwoLine); }

std::vector<SwarSymbol> str(const std::string& s) { return parse_string(s); }

ArtistModel one_syllable_model(const std::string& label, std::vector<double> devs,
                               std::vector<std::vector<SwarSymbol>> strings = {}, std::vector<double> weights = {}) {
  ArtistModel m;
  m.artist_id = "x";
  m.line_index = 1;
  m.syllables[label] = {std::move(devs), std::move(strings), std::move(weights)};
  return m;
}

}  // namespace

TEST(CanonicalSymbols, BeatsAndHolds) {
  const auto score = tiny();
  const auto& l = canonical_positions(score, 1);
  ASSERT_EQ(l[0].label, "Ta");
  EXPECT_EQ(render_string(canonical_symbols(l[0], 10)), "SSSSSRRRRRRRRRRRRRRR");
  EXPECT_EQ(render_string(canonical_symbols(l[0], 3)), "SSRRRR");
  EXPECT_EQ(render_string(canonical_symbols(l[1], 4)), "gggg");
  for (const auto& s : l) EXPECT_EQ(canonical_symbols(s, 7).size(), static_cast<std::size_t>(7 * s.allotted_beats));
}

TEST(FitModel, CollectsByArtistAndLine) {
  std::vector<TimingRecord> t{{"c1", "a", 1, 1, "Ta", 0.1, 0}, {"c1", "a", 1, 2, "Ta", -0.1, 0},
                              {"c2", "b", 1, 1, "Ta", 0.5, 0}, {"c1", "a", 2, 1, "A", 0.3, 0}};
  std::vector<PaaRecord> p{{"c1", "a", 1, 1, "Ta", str("SR")}, {"c1", "a", 1, 2, "Ta", str("SS")},
                           {"c2", "b", 1, 1, "Ta", str("gg")}};
  const auto m = fit_artist_model("a", 1, t, p);
  ASSERT_EQ(m.syllables.size(), 1u);
  EXPECT_EQ(m.syllables.at("Ta").deviations, (std::vector<double>{0.1, -0.1}));
  EXPECT_EQ(m.syllables.at("Ta").strings.size(), 2u);
  EXPECT_TRUE(m.syllables.at("Ta").weights.empty());
}

TEST(FitModel, ClusterWeightsGiveEachClusterEqualMass) {
  std::vector<PaaRecord> p;
  for (const char* s : {"SSSSSSSSSS", "SSSSSSSSSR", "SSSSSSSSRR", "gggggggggg"})
    p.push_back({"c", "a", 1, static_cast<int>(p.size() + 1), "Ta", str(s)});
  const auto m = fit_artist_model("a", 1, {}, p, FitOptions{0.3});
  const auto& w = m.syllables.at("Ta").weights;
  ASSERT_EQ(w.size(), 4u);
  EXPECT_NEAR(w[0], 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(w[3], 0.5, 1e-12);
  double total = 0.0;
  for (double x : w) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ModelIo, RoundTrip) {
  auto m = one_syllable_model("Ta", {0.125, -0.25}, {str("SR'"), str(".nS")}, {0.25, 0.75});
  m.bandish = "Tiny";
  m.tonic_hz = 146.83;
  m.tempo = {130.5, 150.25};
  m.syllables["Na"] = {{0.5}, {}, {}};
  const auto text = serialize_model(m, 9);
  EXPECT_NE(text.find("\"seed\": 9"), std::string::npos);
  EXPECT_TRUE(parse_model(text) == m);
  EXPECT_THROW(parse_model("{\"artist\": 1}"), ValidationError);
  EXPECT_THROW(parse_model("nope"), ValidationError);
}

TEST(Schedule, Canonical) {
  const auto s = canonical_schedule(tiny(), 1, 120.0, Tonic(220.0), 10);
  EXPECT_DOUBLE_EQ(s.beat_interval, 0.5);
  EXPECT_DOUBLE_EQ(s.cycle_duration, 8.0);
  ASSERT_EQ(s.events.size(), 12u);
  EXPECT_DOUBLE_EQ(s.events[3].onset, 2.0);
  EXPECT_DOUBLE_EQ(s.events[3].duration, 1.0);
  EXPECT_DOUBLE_EQ(s.events[7].onset, 5.5);
  EXPECT_THROW(canonical_schedule(tiny(), 1, 0.0, Tonic(220.0)), ConfigError);
  EXPECT_THROW(canonical_schedule(tiny(), 3, 100.0, Tonic(220.0)), NotFoundError);
}

TEST(Schedule, IoRoundTrip) {
  const auto m = one_syllable_model("Na", {0.25}, {str("gmPD")});
  const auto s = sample_schedule(m, tiny(), 1, 100.0, Tonic(200.0), 5, {0.0, 16, 2});
  const auto back = parse_schedule(serialize_schedule(s));
  EXPECT_EQ(back.seed, 5u);
  ASSERT_EQ(back.events.size(), s.events.size());
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    EXPECT_EQ(back.events[i].syllable, s.events[i].syllable);
    EXPECT_EQ(back.events[i].onset, s.events[i].onset);
    EXPECT_EQ(back.events[i].symbols, s.events[i].symbols);
    EXPECT_EQ(back.events[i].fallback, s.events[i].fallback);
  }
  EXPECT_THROW(parse_schedule("{}"), ValidationError);
}

TEST(Sample, UnmodeledSyllablesFallBack) {
  const auto m = one_syllable_model("Na", {0.25}, {str("gmPD")});
  const auto canon = canonical_schedule(tiny(), 1, 120.0, Tonic(220.0), 2);
  const auto s = sample_schedule(m, tiny(), 1, 120.0, Tonic(220.0), 1, {0.0, 16, 2});
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (s.events[i].syllable == "Na") {
      EXPECT_FALSE(s.events[i].fallback);
      EXPECT_DOUBLE_EQ(s.events[i].onset, canon.events[i].onset + 0.125);
      EXPECT_EQ(render_string(s.events[i].symbols), "gmPD");
    } else {
      EXPECT_TRUE(s.events[i].fallback);
      EXPECT_EQ(s.events[i].onset, canon.events[i].onset);
      EXPECT_EQ(s.events[i].symbols, canon.events[i].symbols);
    }
  }
}

TEST(Sample, ClampsAfterRetries) {
  // Every draw would land before the previous onset.
  const auto m = one_syllable_model("Na", {-5.0});
  const auto s = sample_schedule(m, tiny(), 1, 120.0, Tonic(220.0), 1);
  EXPECT_TRUE(s.events[1].clamped);
  EXPECT_DOUBLE_EQ(s.events[1].onset, s.events[0].onset + kPitchHop);
  EXPECT_NEAR(s.events[1].deviation, (kPitchHop - 1.0) / 0.5, 1e-12);
}

// Same seed, same schedule; onsets stay ordered and non-negative; every draw
// comes from the fitted pools.
TEST(SampleProperty, DeterministicOrderedAndFromPool) {
  std::mt19937_64 rng(55);
  const auto score = tiny();
  std::uniform_real_distribution<double> dev(-1.5, 1.5);
  const std::vector<SwarSymbol> abc{{Degree::S, 0}, {Degree::g, 0}, {Degree::P, 0}};
  for (int trial = 0; trial < 200; ++trial) {
    ArtistModel m;
    m.artist_id = "a";
    for (const auto& syl : canonical_positions(score, 1)) {
      if (rng() % 5 == 0) continue;
      SyllableModel sm;
      for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) sm.deviations.push_back(dev(rng));
      for (int k = 0; k < static_cast<int>(rng() % 3); ++k)
        sm.strings.push_back(testkit::random_string(rng, 10 * syl.allotted_beats, abc));
      m.syllables[syl.label] = sm;
    }
    const std::uint64_t seed = rng();
    const auto a = sample_schedule(m, score, 1, 150.0, Tonic(200.0), seed);
    const auto b = sample_schedule(m, score, 1, 150.0, Tonic(200.0), seed);
    ASSERT_EQ(serialize_schedule(a), serialize_schedule(b));
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      const auto& e = a.events[i];
      EXPECT_GE(e.onset, 0.0);
      if (i > 0) {
        EXPECT_GT(e.onset, a.events[i - 1].onset);
      }
      const auto it = m.syllables.find(e.syllable);
      if (it == m.syllables.end()) continue;
      if (!e.clamped) {
        EXPECT_NE(std::find(it->second.deviations.begin(), it->second.deviations.end(), e.deviation),
                  it->second.deviations.end());
      }
      if (!it->second.strings.empty()) {
        EXPECT_NE(std::find(it->second.strings.begin(), it->second.strings.end(), e.symbols),
                  it->second.strings.end());
      }
    }
  }
}

TEST(SampleProperty, BootstrapAndWeightedFrequencies) {
  const auto m = one_syllable_model("Ma", {-0.2, 0.4}, {str("S"), str("R")}, {0.25, 0.75});
  int late = 0, second = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_schedule(m, tiny(), 1, 120.0, Tonic(220.0), static_cast<std::uint64_t>(i), {0.0, 16, 1});
    const auto& e = s.events[3];
    ASSERT_EQ(e.syllable, "Ma");
    late += e.deviation > 0.0 ? 1 : 0;
    second += e.symbols == str("R") ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(late) / n, 0.5, 0.03);
  EXPECT_NEAR(static_cast<double>(second) / n, 0.75, 0.03);
}

TEST(Synthesize, LengthAmplitudeAndFades) {
  const auto scale = bhimpalasi();
  const auto r = render_canonical(tiny(), 1, 120.0, Tonic(220.0), scale, 16000);
  EXPECT_EQ(r.audio.sample_rate, 16000);
  EXPECT_EQ(r.audio.samples.size(), 8u * 16000u);
  float peak = 0.0f;
  for (float x : r.audio.samples) peak = std::max(peak, std::abs(x));
  EXPECT_LE(peak, kSynthAmplitude + 1e-6);
  EXPECT_GT(peak, 0.79f);
  EXPECT_EQ(r.audio.samples[0], 0.0f);
  // The rest at beat 10 (5.0 .. 5.5 s) is silent.
  for (std::size_t i = 5 * 16000 + 10; i < 5 * 16000 + 7990; ++i) ASSERT_EQ(r.audio.samples[i], 0.0f) << i;
  EXPECT_TRUE(r.flags.empty());
  EXPECT_THROW(render_canonical(tiny(), 1, 120.0, Tonic(220.0), scale, 4000), ConfigError);
}

TEST(Synthesize, OverlapTruncatesAndFlags) {
  auto s = canonical_schedule(tiny(), 2, 120.0, Tonic(220.0), 10);
  s.events[1].onset = s.events[0].onset + 0.2;
  const auto r = synthesize(s, bhimpalasi(), 8000);
  ASSERT_EQ(r.flags.size(), 1u);
  EXPECT_NE(r.flags[0].find("'A'"), std::string::npos);
  // The event ending at the last sample of a long tail extends the audio.
  s.events.back().duration = 5.0;
  EXPECT_EQ(synthesize(s, bhimpalasi(), 8000).audio.samples.size(),
            static_cast<std::size_t>(std::ceil((s.events.back().onset + 5.0) * 8000)));
  std::swap(s.events[2], s.events[3]);
  EXPECT_THROW(synthesize(s, bhimpalasi(), 8000), DomainError);
}

// Rendering the canonical line and tracking it back recovers each
// syllable's notated string.
TEST(Synthesize, TrackerRecoversCanonicalNotes) {
  const auto score = tiny();
  const auto scale = bhimpalasi();
  const Tonic tonic(220.0);
  const auto sched = canonical_schedule(score, 2, 120.0, tonic, 10);
  const auto audio = synthesize(sched, scale, 22050).audio;
  const auto cents = continuous_cents(extract_f0(audio.samples, audio.sample_rate), tonic);
  const auto& syl = canonical_positions(score, 2);
  for (std::size_t i = 0; i < syl.size(); ++i) {
    const auto got = paa_symbols(slice_syllable(cents, sched.events[i].onset, sched.events[i].duration),
                                 syl[i].allotted_beats, scale, 10);
    const auto want = canonical_symbols(syl[i], 10);
    ASSERT_EQ(got.size(), want.size());
    EXPECT_LE(hamming(got, want), 1u) << syl[i].label << " " << render_string(got);
  }
}

TEST(Synthetic, DatasetIsDeterministicAndLoadable) {
  const auto a = make_synthetic_dataset();
  const auto b = make_synthetic_dataset();
  ASSERT_EQ(a.performances.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(a.performances[i] == b.performances[i]);
  SyntheticOptions o;
  o.seed = 1;
  EXPECT_FALSE(make_synthetic_dataset(o).performances[0] == a.performances[0]);
}
