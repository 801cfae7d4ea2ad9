#pragma once

// Command-line front end shared by tools/motseg.cpp and the tests.
//   track <detections>... [--config f] [--out dir] [--no-str] [--no-reid]
//   eval <results> <ground-truth>
//   synth <scenario> [--out dir]        scenario: A, B, C, C-static or a JSON file
//   overlay <results> [--out dir]
//   ablate <scenario>                  full, --no-str, --no-reid and both off

#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "motseg/config_io.hpp"
#include "motseg/error.hpp"
#include "motseg/eval.hpp"
#include "motseg/io.hpp"
#include "motseg/pipeline.hpp"
#include "motseg/synth.hpp"

namespace motseg {

inline constexpr std::string_view kConfigEchoName = "effective_config.txt";

struct TrackOptions {
  std::vector<std::string> inputs;
  std::string config_path;
  std::string out_dir = ".";
  bool no_str = false;
  bool no_reid = false;
};

inline PipelineConfig resolve_config(const TrackOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  if (o.no_str) cfg.tracker.enable_str = false;
  if (o.no_reid) cfg.reid.enabled = false;
  return cfg;
}

/// Tracks every input sequence (in parallel, one task per file) and writes
/// <out>/<sequence name>.txt plus the effective config. Returns the result
/// paths in input order.
inline std::vector<std::string> run_track(const TrackOptions& o) {
  const PipelineConfig cfg = resolve_config(o);
  std::filesystem::create_directories(o.out_dir);
  {
    const auto echo = (std::filesystem::path(o.out_dir) / kConfigEchoName).string();
    std::ofstream out(echo, std::ios::binary);
    if (!out) fail(ErrorCode::kIoError, "cannot write " + echo);
    out << config_to_string(cfg);
  }
  std::vector<std::future<std::string>> jobs;
  for (const auto& input : o.inputs) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &o, input] {
      const DetectionSet set = load_detections(input);
      const PipelineResult r = run_pipeline(set, cfg);
      const auto path = (std::filesystem::path(o.out_dir) / (set.meta.name + ".txt")).string();
      write_results(r.records, path);
      return path;
    }));
  }
  std::vector<std::string> paths;
  for (auto& j : jobs) paths.push_back(j.get());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (paths[i] == paths[k]) fail(ErrorCode::kInvalidArgument, "two inputs share the sequence name of " + paths[i]);
    }
  }
  return paths;
}

/// Writes <out>/<name>.jsonl and <out>/<name>_gt.txt.
inline std::pair<std::string, std::string> run_synth(const std::string& scenario, const std::string& out_dir) {
  const ScenarioSpec spec = load_scenario(scenario);
  const GeneratedScenario data = generate(spec);
  std::filesystem::create_directories(out_dir);
  const auto base = std::filesystem::path(out_dir);
  const auto det_path = (base / (spec.name + ".jsonl")).string();
  const auto gt_path = (base / (spec.name + "_gt.txt")).string();
  std::ofstream det(det_path, std::ios::binary);
  if (!det) fail(ErrorCode::kIoError, "cannot write " + det_path);
  write_detections(data.detections, det);
  write_results(data.ground_truth, gt_path);
  return {det_path, gt_path};
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-object tracking and segmentation on precomputed detections"};
  app.require_subcommand(1);

  TrackOptions track;
  auto* track_cmd = app.add_subcommand("track", "Track detection files into MOTS result files");
  track_cmd->add_option("detections", track.inputs, "JSON-lines detection files")->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--config", track.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  track_cmd->add_option("--out", track.out_dir, "Output directory");
  track_cmd->add_flag("--no-str", track.no_str, "Disable short-term retrieval");
  track_cmd->add_flag("--no-reid", track.no_reid, "Disable offline re-identification");

  std::string results_path, gt_path;
  auto* eval_cmd = app.add_subcommand("eval", "Score a result file against ground truth");
  eval_cmd->add_option("results", results_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("ground-truth", gt_path)->required()->check(CLI::ExistingFile);

  std::string scenario, synth_out = ".";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
  synth_cmd->add_option("scenario", scenario, "A, B, C, C-static or a JSON scenario file")->required();
  synth_cmd->add_option("--out", synth_out, "Output directory");

  std::string overlay_in, overlay_out = "overlays";
  auto* overlay_cmd = app.add_subcommand("overlay", "Render result masks to PPM images");
  overlay_cmd->add_option("results", overlay_in)->required()->check(CLI::ExistingFile);
  overlay_cmd->add_option("--out", overlay_out, "Output directory");

  std::string ablate_scenario;
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare runs with and without STR and ReID on a scenario");
  ablate_cmd->add_option("scenario", ablate_scenario)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*track_cmd) {
      for (const auto& p : run_track(track)) out << p << '\n';
    } else if (*eval_cmd) {
      print_report(evaluate(read_results(results_path), read_results(gt_path)), out);
    } else if (*synth_cmd) {
      const auto [det, gt] = run_synth(scenario, synth_out);
      out << det << '\n' << gt << '\n';
    } else if (*overlay_cmd) {
      out << write_overlays(read_results(overlay_in), overlay_out).size() << " frames written to "
          << overlay_out << '\n';
    } else if (*ablate_cmd) {
      PipelineConfig no_str, no_reid, neither;
      no_str.tracker.enable_str = false;
      no_reid.reid.enabled = false;
      neither.tracker.enable_str = false;
      neither.reid.enabled = false;
      const std::vector<std::pair<std::string, PipelineConfig>> configs{
          {"full", PipelineConfig{}}, {"no-str", no_str}, {"no-reid", no_reid}, {"no-str+no-reid", neither}};
      print_ablation(ablation_compare(load_scenario(ablate_scenario), configs), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace motseg
