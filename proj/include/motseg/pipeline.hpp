#pragma once

// Whole-sequence tracking: detection filters, the online tracker over every
// frame, optional offline ReID merging, then track pruning and dedup.

#include <span>
#include <string>
#include <vector>

#include "motseg/config.hpp"
#include "motseg/eval.hpp"
#include "motseg/io.hpp"
#include "motseg/postfilter.hpp"
#include "motseg/reid.hpp"
#include "motseg/synth.hpp"
#include "motseg/tracker.hpp"

namespace motseg {

struct PipelineResult {
  std::vector<Tracklet> tracks;  // final tracks, ordered by id
  std::vector<ResultRecord> records;
  std::size_t tracklets_before_reid = 0;
};

/// Header values fill the config fields left on "auto".
inline double effective_fps(const PipelineConfig& cfg, const SequenceMeta& meta) {
  return cfg.tracker.fps > 0.0 ? cfg.tracker.fps : meta.fps;
}

inline CameraMode effective_camera_mode(const PipelineConfig& cfg, const SequenceMeta& meta) {
  return cfg.reid.camera_mode.value_or(meta.camera_mode);
}

inline PipelineResult run_pipeline(const DetectionSet& set, const PipelineConfig& cfg) {
  validate(cfg);
  const double fps = effective_fps(cfg, set.meta);
  Tracker tracker(cfg.tracker, fps);
  for (const auto& frame : set.frames) {
    const auto kept = filter_detections(frame.detections, cfg.filter);
    tracker.step(frame.frame, kept);
  }

  PipelineResult out;
  std::vector<Tracklet> tracks = tracker.tracklets();
  out.tracklets_before_reid = tracks.size();
  if (cfg.reid.enabled) {
    const ReidParams params{cfg.reid, effective_camera_mode(cfg, set.meta), fps,
                            cfg.tracker.huber_delta, cfg.tracker.huber_window};
    tracks = merge_pass(std::move(tracks), params);
  }
  tracks = dedup_tracks(prune_tracks(std::move(tracks), cfg.filter), cfg.filter);
  std::stable_sort(tracks.begin(), tracks.end(),
                   [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  out.records = results_from_tracks(tracks, set.meta);
  out.tracks = std::move(tracks);
  return out;
}

struct AblationRow {
  std::string label;
  EvalReport report;
  std::size_t track_count = 0;
};

/// Runs every config on the same generated data and evaluates against the
/// scenario's ground truth.
inline std::vector<AblationRow> ablation_compare(
    const ScenarioSpec& scenario, std::span<const std::pair<std::string, PipelineConfig>> configs) {
  if (configs.size() < 2) fail(ErrorCode::kInvalidArgument, "ablation needs at least two configs");
  const GeneratedScenario data = generate(scenario);
  std::vector<AblationRow> rows;
  for (const auto& [label, cfg] : configs) {
    const PipelineResult r = run_pipeline(data.detections, cfg);
    rows.push_back({label, evaluate(r.records, data.ground_truth), r.tracks.size()});
  }
  return rows;
}

inline void print_ablation(std::span<const AblationRow> rows, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %7s %5s %5s %5s %8s %8s\n", "config", "tracks", "FP", "FN",
                "IDS", "MOTSA", "sMOTSA");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-16.16s %7zu %5zu %5zu %5zu %8.4f %8.4f\n", r.label.c_str(),
                  r.track_count, r.report.total.fp, r.report.total.fn, r.report.total.ids,
                  r.report.total.motsa(), r.report.total.smotsa());
    out << line;
  }
}

}  // namespace motseg
