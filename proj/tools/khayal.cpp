// khayal: command-line front end for the analysis and generation pipeline.
//
// Exit codes: 0 success, 1 domain error or unexpected failure, 2 invalid
// data, 3 invalid configuration or command line, 4 file I/O.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "khayal/pipeline.hpp"
#include "khayal/synthetic.hpp"

namespace {

int exit_code(khayal::ErrorClass c) {
  switch (c) {
    case khayal::ErrorClass::domain: return 1;
    case khayal::ErrorClass::validation: return 2;
    case khayal::ErrorClass::configuration: return 3;
    case khayal::ErrorClass::io: return 4;
  }
  return 1;
}

void report(const khayal::CommandResult& r) {
  for (const auto& n : r.notes) std::cerr << "note: " << n << '\n';
  for (const auto& p : r.written) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expressive timing and pitch analysis of bandish renditions"};
  app.require_subcommand(1);
  app.fallthrough();

  khayal::RunConfig cfg;
  std::string dataset, out = cfg.out.string();
  std::optional<std::string> bandish, artist;
  std::optional<int> line;
  std::optional<double> tempo, tonic;

  app.add_option("--dataset", dataset, "Dataset root directory")->envname("KHAYAL_DATASET");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--bandish", bandish, "Only this bandish");
  app.add_option("--artist", artist, "Only this artist");
  app.add_option("--line", line, "Only this line (1-based)");
  auto* seed_opt = app.add_option("--seed", cfg.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--paa-per-beat", cfg.paa_per_beat, "PAA intervals per allotted beat")->capture_default_str();
  app.add_option("--nlss-threshold", cfg.nlss_threshold, "Cluster cut height")->capture_default_str();
  app.add_option("--tempo", tempo, "Generation tempo, matra per minute");
  app.add_option("--tonic-hz", tonic, "Generation tonic in Hz");
  app.add_option("--jitter", cfg.jitter, "Gaussian jitter on sampled deviations, beats")->capture_default_str();
  app.add_option("--sample-rate", cfg.sample_rate, "Synthesis sample rate")->capture_default_str();
  app.add_option("--fmin", cfg.tracker.fmin, "Pitch tracker lowest F0, Hz")->capture_default_str();
  app.add_option("--fmax", cfg.tracker.fmax, "Pitch tracker highest F0, Hz")->capture_default_str();
  app.add_option("--voicing-threshold", cfg.tracker.voicing_threshold, "Pitch tracker voicing threshold")
      ->capture_default_str();
  app.add_option("--frame-length", cfg.tracker.frame_length, "Pitch tracker frame length, s")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Load the dataset and print its summary");
  auto* extract = app.add_subcommand("extract-pitch", "Write pitch.csv for performances that only have audio");
  auto* timing = app.add_subcommand("timing", "Timing deviations per syllable");
  auto* pitch = app.add_subcommand("pitch", "PAA strings and pairwise NLSS");
  auto* aggregate = app.add_subcommand("aggregate", "Artist x syllable tables and box plots");
  auto* cluster = app.add_subcommand("cluster", "Cluster repetitions by NLSS");
  auto* generate = app.add_subcommand("generate", "Sample and synthesize a new rendition");
  auto* run = app.add_subcommand("run", "validate, timing, pitch, aggregate, cluster, generate");
  auto* make = app.add_subcommand("make-dataset", "Write the synthetic dataset to --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  cfg.dataset = dataset;
  cfg.out = out;
  cfg.bandish = bandish;
  cfg.artist = artist;
  cfg.line = line;
  cfg.tempo = tempo;
  cfg.tonic_hz = tonic;

  try {
    if (*make) {
      khayal::SyntheticOptions opts;
      if (seed_opt->count() > 0) opts.seed = cfg.seed;
      khayal::write_synthetic_dataset(cfg.out, khayal::make_synthetic_dataset(opts));
      std::cout << cfg.out.string() << '\n';
      return 0;
    }
    if (dataset.empty()) throw khayal::ConfigError("--dataset (or KHAYAL_DATASET) is required");
    if (*validate) {
      const auto r = khayal::cmd_validate(cfg);
      std::cout << r.text;
      return r.report.ok() ? 0 : 2;
    }
    if (*extract) report(khayal::cmd_extract_pitch(cfg));
    if (*timing) report(khayal::cmd_timing(cfg));
    if (*pitch) report(khayal::cmd_pitch(cfg));
    if (*aggregate) report(khayal::cmd_aggregate(cfg));
    if (*cluster) report(khayal::cmd_cluster(cfg));
    if (*generate) report(khayal::cmd_generate(cfg));
    if (*run) report(khayal::cmd_run(cfg));
  } catch (const khayal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
