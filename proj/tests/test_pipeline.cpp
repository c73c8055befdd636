#include <gtest/gtest.h>

#include <map>
#include <set>

#include "khayal/generate.hpp"
#include "khayal/pipeline.hpp"
#include "support.hpp"

using namespace khayal;
using testkit::TempDir;

namespace {

RunConfig config_for(const TempDir& out) {
  RunConfig c;
  c.dataset = testkit::kSyntheticDir;
  c.out = out.path();
  c.sample_rate = 8000;
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = text::read_file(e.path());
  return files;
}

}  // namespace

TEST(Config, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(validate_config(c));
  auto bad = [&](auto mutate) {
    RunConfig x;
    mutate(x);
    EXPECT_THROW(validate_config(x), ConfigError);
  };
  bad([](RunConfig& x) { x.paa_per_beat = 0; });
  bad([](RunConfig& x) { x.nlss_threshold = 1.5; });
  bad([](RunConfig& x) { x.line = 0; });
  bad([](RunConfig& x) { x.tempo = -1.0; });
  bad([](RunConfig& x) { x.tonic_hz = 0.0; });
  bad([](RunConfig& x) { x.jitter = -0.1; });
  bad([](RunConfig& x) { x.tracker.fmin = 2000.0; });
  bad([](RunConfig& x) { x.tracker.voicing_threshold = 0.0; });
  bad([](RunConfig& x) { x.sample_rate = 100; });
}

TEST(Pipeline, FullRunWritesEveryArtifactAndIsReproducible) {
  TempDir a("run"), b("run");
  auto ca = config_for(a);
  ca.seed = 7;
  auto cb = config_for(b);
  cb.seed = 7;
  const auto r = cmd_run(ca);
  cmd_run(cb);
  for (const char* f : {"timing_deviations.csv", "timing_stats.csv", "syllable_durations.csv", "paa_strings.csv",
                        "expression_table_timing.csv", "expression_table_pitch.csv", "boxplot_timing.json",
                        "boxplot_pitch.json", "clusters.json", "generate/model.json", "generate/schedule.json",
                        "generate/generated.wav", "generate/canonical.wav", "generate/canonical_schedule.json"})
    EXPECT_TRUE(fs::exists(a / f)) << f;
  EXPECT_TRUE(fs::exists(a / "figures" / "heatmap_timing__Ja_Ja_Re__L1.svg"));
  EXPECT_TRUE(fs::exists(a / "nlss" / "syn01__L1__Jaa1.json"));
  EXPECT_EQ(snapshot(a.path()), snapshot(b.path()));
  EXPECT_FALSE(r.written.empty());

  for (const auto& [name, content] : snapshot(a.path())) {
    if (name.ends_with(".csv")) {
      EXPECT_EQ(content.rfind("# seed=7\n", 0), 0u) << name;
    }
    if (name.ends_with(".json")) {
      EXPECT_NE(content.find("\"seed\": 7"), std::string::npos) << name;
    }
  }

  TempDir c("run");
  auto cc = config_for(c);
  cc.seed = 8;
  cmd_run(cc);
  EXPECT_NE(text::read_file(a / "generate/generated.wav"), text::read_file(c / "generate/generated.wav"));
  EXPECT_EQ(text::read_file(a / "generate/canonical.wav"), text::read_file(c / "generate/canonical.wav"));
}

TEST(Pipeline, TimingOutputs) {
  TempDir out("timing");
  const auto c = config_for(out);
  cmd_timing(c);
  const auto recs = read_timing_csv(out / "timing_deviations.csv");
  const auto ds = load_dataset(testkit::kSyntheticDir);
  std::size_t onsets = 0;
  for (const auto& p : ds.performances)
    for (const auto& r : p.renditions) onsets += r.onsets.size();
  EXPECT_EQ(recs.size(), onsets);
  std::set<std::string> artists;
  for (const auto& r : recs) {
    artists.insert(r.artist);
    EXPECT_LT(std::abs(r.deviation), 8.0);
  }
  EXPECT_EQ(artists, (std::set<std::string>{"artist_a", "artist_b", "artist_c"}));

  // Stats rows: first syllable group more variable than the line's close.
  const auto rows = text::parse_csv(text::read_file(out / "timing_stats.csv"));
  EXPECT_EQ(rows[0].cells, (std::vector<std::string>{"artist", "bandish", "line", "syllable", "mean", "sd", "n"}));
  std::map<std::pair<std::string, std::string>, double> sd;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].cells[2] == "1") sd[{rows[i].cells[0], rows[i].cells[3]}] = std::stod(rows[i].cells[5]);
  for (const char* a : {"artist_a", "artist_b", "artist_c"}) {
    EXPECT_GT(sd.at({a, "Jaa1"}), sd.at({a, "Pa"})) << a;
    EXPECT_GT(sd.at({a, "Re"}), sd.at({a, "Ne"})) << a;
  }
}

TEST(Pipeline, PitchOutputs) {
  TempDir out("pitch");
  const auto c = config_for(out);
  const auto res = cmd_pitch(c);
  const auto paa = read_paa_csv(out / "paa_strings.csv");
  const auto ds = load_dataset(testkit::kSyntheticDir);
  const auto& score = ds.scores.at("Ja Ja Re");
  std::size_t n1 = 0;
  for (const auto& r : paa) {
    const auto* syl = score.lines[static_cast<std::size_t>(r.line - 1)].find(r.syllable);
    ASSERT_NE(syl, nullptr);
    EXPECT_EQ(r.symbols.size(), static_cast<std::size_t>(10 * syl->allotted_beats)) << r.syllable;
    n1 += r.line == 1 ? 1 : 0;
  }
  EXPECT_GT(n1, 250u);
  EXPECT_TRUE(fs::exists(out / "nlss" / "syn02__L3__Ka1.json"));
  const auto j = nlohmann::json::parse(text::read_file(out / "nlss" / "syn01__L1__Jaa1.json"));
  EXPECT_EQ(j.at("repetitions").size(), 10u);
  EXPECT_EQ(j.at("nlss").size(), 10u);
  EXPECT_EQ(j.at("nlss")[0][0].get<double>(), 0.0);
  (void)res;
}

TEST(Pipeline, ArtistAndLineFilters) {
  TempDir out("filter");
  auto c = config_for(out);
  c.artist = "artist_b";
  c.line = 2;
  cmd_timing(c);
  cmd_pitch(c);
  cmd_aggregate(c);
  for (const auto& r : read_timing_csv(out / "timing_deviations.csv")) {
    EXPECT_EQ(r.artist, "artist_b");
    EXPECT_EQ(r.line, 2);
  }
  const auto rows = text::parse_csv(text::read_file(out / "expression_table_timing.csv"));
  ASSERT_GT(rows.size(), 1u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].cells[1], "2");
    EXPECT_EQ(rows[i].cells[2], "artist_b");
  }

  c.artist = "nobody";
  EXPECT_THROW(cmd_timing(c), NotFoundError);
  c.artist.reset();
  c.bandish = "Other";
  EXPECT_THROW(cmd_timing(c), NotFoundError);
}

TEST(Pipeline, StagesNeedTheirInputs) {
  TempDir out("order");
  const auto c = config_for(out);
  try {
    cmd_aggregate(c);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("run 'timing' first"), std::string::npos);
  }
  EXPECT_THROW(cmd_cluster(c), IoError);
  EXPECT_THROW(cmd_generate(c), IoError);
}

TEST(Pipeline, GenerateTempoRangeAndDefaults) {
  TempDir out("gen");
  auto c = config_for(out);
  cmd_timing(c);
  cmd_pitch(c);
  c.tempo = 500.0;
  EXPECT_THROW(cmd_generate(c), ConfigError);
  c.tempo.reset();
  c.artist = "artist_c";
  c.line = 2;
  const auto res = cmd_generate(c);
  const auto model = parse_model(text::read_file(out / "generate" / "model.json"));
  EXPECT_EQ(model.artist_id, "artist_c");
  EXPECT_EQ(model.line_index, 2);
  const auto sched = parse_schedule(text::read_file(out / "generate" / "schedule.json"));
  EXPECT_NEAR(sched.tempo, 0.5 * (model.tempo.min + model.tempo.max), 1e-9);
  EXPECT_DOUBLE_EQ(sched.tonic_hz, 196.0);
  const auto wav = read_wav(out / "generate" / "generated.wav");
  EXPECT_EQ(wav.sample_rate, 8000);
  EXPECT_GE(static_cast<double>(wav.samples.size()), sched.cycle_duration * 8000 - 1);
  for (const auto& e : sched.events) EXPECT_FALSE(e.fallback) << e.syllable;
  (void)res;
}

TEST(Pipeline, ExtractPitchFromAudio) {
  TempDir root("audio");
  fs::copy(testkit::kSyntheticDir, root.path(), fs::copy_options::recursive);
  const auto perf = root / "performances/syn03";
  const auto pc = parse_pitch(text::read_file(perf / "pitch.csv"));
  fs::remove(perf / "pitch.csv");
  // Resynthesize the annotated contour as a sine.
  MonoAudio audio{8000, {}};
  double phase = 0.0;
  const auto n = static_cast<std::size_t>(pc.end_time() * 8000);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 8000.0;
    const auto k = static_cast<std::size_t>(std::clamp((t - pc.start_time) / pc.hop, 0.0,
                                                       static_cast<double>(pc.frames.size() - 1)));
    const double f = pc.frames[k];
    audio.samples.push_back(f > 0.0 ? static_cast<float>(0.5 * std::sin(phase)) : 0.0f);
    phase = std::fmod(phase + 2.0 * std::numbers::pi * f / 8000.0, 2.0 * std::numbers::pi);
  }
  write_wav(perf / "audio.wav", audio);

  TempDir out("audio_out");
  RunConfig c;
  c.dataset = root.path();
  c.out = out.path();
  c.artist = "artist_c";
  const auto first = cmd_extract_pitch(c);
  ASSERT_EQ(first.written.size(), 1u);
  const auto tracked = parse_pitch(text::read_file(perf / "pitch.csv"));
  EXPECT_DOUBLE_EQ(tracked.start_time, 0.0125);
  std::size_t close = 0, both = 0;
  for (std::size_t i = 0; i < tracked.frames.size(); ++i) {
    const double t = tracked.time_of(i);
    const auto k = static_cast<std::size_t>(std::llround((t - pc.start_time) / pc.hop));
    if (k >= pc.frames.size() || pc.frames[k] <= 0.0 || tracked.frames[i] <= 0.0) continue;
    ++both;
    close += std::abs(tracked.frames[i] / pc.frames[k] - 1.0) < 0.03 ? 1 : 0;
  }
  EXPECT_GT(static_cast<double>(close), 0.9 * static_cast<double>(both));
  EXPECT_TRUE(cmd_extract_pitch(c).written.empty());
  cmd_pitch(c);
  EXPECT_TRUE(fs::exists(out / "paa_strings.csv"));
}
