#pragma once

// Synthetic sequences with exact ground truth: axis-aligned rectangles moving
// linearly, a simple detector model (dropout, score range, box jitter) and
// identity embeddings built from orthogonal prototypes plus gaussian noise.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "motseg/config.hpp"
#include "motseg/embedding.hpp"
#include "motseg/error.hpp"
#include "motseg/io.hpp"
#include "motseg/mask.hpp"
#include "motseg/tracklet.hpp"

namespace motseg {

struct ObjectSpec {
  ClassId class_id = ClassId::kPedestrian;
  double x0 = 0.0;  // top-left at the birth frame
  double y0 = 0.0;
  int w = 16;
  int h = 40;
  double vx = 0.0;  // px / frame
  double vy = 0.0;
  FrameIndex birth = 1;
  FrameIndex death = 0;  // inclusive; 0 means "last frame"
};

struct OcclusionEvent {
  std::size_t object = 0;
  FrameIndex start = 0;
  FrameIndex length = 0;
};

struct DetectorModel {
  double dropout = 0.0;
  double score_min = 0.9;
  double score_max = 1.0;
  double box_jitter = 0.0;  // gaussian sigma, px
};

struct EmbeddingModel {
  int dim = 16;
  double noise = 0.0;  // gaussian sigma per component before normalization
};

struct ScenarioSpec {
  std::string name = "synthetic";
  FrameIndex frames = 100;  // frames are numbered 1..frames
  int img_h = 240;
  int img_w = 640;
  double fps = 30.0;
  CameraMode camera_mode = CameraMode::kMoving;
  std::vector<ObjectSpec> objects;
  std::vector<OcclusionEvent> occlusions;
  DetectorModel detector;
  EmbeddingModel embedding;
  std::uint64_t seed = 1;
};

struct GeneratedScenario {
  DetectionSet detections;
  std::vector<ResultRecord> ground_truth;
};

namespace detail {

inline FrameIndex death_frame(const ObjectSpec& o, const ScenarioSpec& s) {
  return o.death == 0 ? s.frames : o.death;
}

inline BBox object_box(const ObjectSpec& o, FrameIndex frame) {
  const double k = static_cast<double>(frame - o.birth);
  return {std::round(o.x0 + o.vx * k), std::round(o.y0 + o.vy * k), static_cast<double>(o.w),
          static_cast<double>(o.h)};
}

inline void validate_spec(const ScenarioSpec& s) {
  auto bad = [](const std::string& what) { fail(ErrorCode::kSpecOutOfBounds, what); };
  if (s.frames <= 0 || s.img_h <= 0 || s.img_w <= 0 || !(s.fps > 0.0)) bad("frames, image size and fps must be positive");
  if (s.embedding.dim < static_cast<int>(s.objects.size())) {
    bad("embedding dim must be at least the number of objects for orthogonal prototypes");
  }
  if (s.detector.dropout < 0.0 || s.detector.dropout > 1.0) bad("dropout outside [0, 1]");
  if (s.detector.score_min < 0.0 || s.detector.score_max > 1.0 || s.detector.score_min > s.detector.score_max) {
    bad("score range must satisfy 0 <= min <= max <= 1");
  }
  if (s.detector.box_jitter < 0.0 || s.embedding.noise < 0.0) bad("noise levels must be >= 0");
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    const FrameIndex death = death_frame(o, s);
    if (o.w <= 0 || o.h <= 0) bad("object " + std::to_string(i) + " has an empty rectangle");
    if (o.birth < 1 || death > s.frames || o.birth > death) {
      bad("object " + std::to_string(i) + " lifetime outside 1.." + std::to_string(s.frames));
    }
    // Motion is linear, so the extreme positions occur at birth or death.
    for (FrameIndex f : {o.birth, death}) {
      const BBox b = object_box(o, f);
      if (b.x < 0 || b.y < 0 || b.right() > s.img_w || b.bottom() > s.img_h) {
        bad("object " + std::to_string(i) + " leaves the image at frame " + std::to_string(f));
      }
    }
  }
  for (const auto& e : s.occlusions) {
    if (e.object >= s.objects.size() || e.length < 0) bad("occlusion refers to an unknown object");
  }
}

inline bool occluded(const ScenarioSpec& s, std::size_t object, FrameIndex frame) {
  for (const auto& e : s.occlusions) {
    if (e.object == object && frame >= e.start && frame < e.start + e.length) return true;
  }
  return false;
}

}  // namespace detail

/// Ground-truth track id of each object: class * 1000 + per-class serial in
/// object order.
inline std::vector<int> ground_truth_ids(const ScenarioSpec& s) {
  PerClass<int> serial{1, 1};
  std::vector<int> ids;
  for (const auto& o : s.objects) ids.push_back(static_cast<int>(o.class_id) * 1000 + serial[o.class_id]++);
  return ids;
}

inline GeneratedScenario generate(const ScenarioSpec& s) {
  detail::validate_spec(s);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GeneratedScenario out;
  out.detections.meta = {s.name, s.fps, s.img_h, s.img_w, s.camera_mode};
  const std::vector<int> ids = ground_truth_ids(s);
  std::vector<Tracklet> truth(s.objects.size());
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    truth[i].id = ids[i];
    truth[i].class_id = s.objects[i].class_id;
  }

  for (FrameIndex f = 1; f <= s.frames; ++f) {
    FrameDetections frame{f, {}};
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      const ObjectSpec& o = s.objects[i];
      if (f < o.birth || f > detail::death_frame(o, s)) continue;
      const BBox box = detail::object_box(o, f);
      truth[i].observations.push_back({f, box, rect_mask(s.img_h, s.img_w, box), 1.0});

      // Fixed draw order per visible object keeps output stable when a
      // parameter such as dropout changes.
      const double drop_draw = unit(rng);
      const double score_draw = unit(rng);
      const double jx = gauss(rng), jy = gauss(rng);
      std::vector<double> emb(static_cast<std::size_t>(s.embedding.dim), 0.0);
      emb[i] = 1.0;
      for (double& v : emb) v += s.embedding.noise * gauss(rng);

      if (detail::occluded(s, i, f) || drop_draw < s.detector.dropout) continue;
      BBox det_box = box;
      det_box.x = std::round(box.x + s.detector.box_jitter * jx);
      det_box.y = std::round(box.y + s.detector.box_jitter * jy);
      const double score = s.detector.score_min + (s.detector.score_max - s.detector.score_min) * score_draw;
      frame.detections.push_back(Detection{f, o.class_id, score, det_box,
                                           rect_mask(s.img_h, s.img_w, det_box),
                                           l2_normalize(std::move(emb))});
    }
    if (!frame.detections.empty()) out.detections.frames.push_back(std::move(frame));
  }
  std::erase_if(truth, [](const Tracklet& t) { return t.observations.empty(); });
  out.ground_truth = results_from_tracks(truth, out.detections.meta);
  return out;
}

/// Five pedestrians in separate horizontal lanes over 100 frames at 30 fps;
/// objects 0-2 move horizontally, 3 is static, 4 moves slowly.
inline ScenarioSpec base_scenario() {
  ScenarioSpec s;
  s.frames = 100;
  s.img_h = 240;
  s.img_w = 640;
  s.fps = 30.0;
  const double lanes[5] = {5, 52, 99, 146, 193};
  s.objects = {
      {ClassId::kPedestrian, 20, lanes[0], 16, 40, 2.0, 0.0, 1, 0},
      {ClassId::kPedestrian, 600, lanes[1], 16, 40, -2.0, 0.0, 1, 0},
      {ClassId::kPedestrian, 100, lanes[2], 16, 40, 1.5, 0.0, 1, 0},
      {ClassId::kPedestrian, 300, lanes[3], 16, 40, 0.0, 0.0, 1, 0},
      {ClassId::kPedestrian, 450, lanes[4], 16, 40, 1.0, 0.0, 1, 0},
  };
  s.embedding = {16, 0.0};
  s.seed = 20200614;
  return s;
}

/// Clean sequence: no dropout, noise or occlusion.
inline ScenarioSpec scenario_a() {
  ScenarioSpec s = base_scenario();
  s.name = "scenario_a";
  return s;
}

/// Short detection gaps on three objects, each no longer than the
/// pedestrian termination memory (round(0.2 s * 30 fps) = 6 frames).
inline ScenarioSpec scenario_b() {
  ScenarioSpec s = base_scenario();
  s.name = "scenario_b";
  s.embedding.noise = 0.05;
  s.occlusions = {{0, 20, 3}, {1, 40, 5}, {2, 60, 6}};
  return s;
}

/// Long occlusions on three moving objects, longer than the termination
/// memory (6 frames) and within the ReID gap (round(1 s * 30 fps) = 30).
inline ScenarioSpec scenario_c(CameraMode mode = CameraMode::kMoving) {
  ScenarioSpec s = base_scenario();
  s.name = mode == CameraMode::kStatic ? "scenario_c_static" : "scenario_c";
  s.camera_mode = mode;
  s.embedding.noise = 0.05;
  s.occlusions = {{0, 20, 10}, {1, 40, 15}, {2, 55, 25}};
  return s;
}

/// Reads a scenario from JSON. Missing fields keep the defaults of
/// ScenarioSpec; "preset" ("A", "B", "C", "C-static") starts from a preset.
inline ScenarioSpec parse_scenario(const nlohmann::json& j) {
  ScenarioSpec s;
  try {
    if (j.contains("preset")) {
      const auto p = j["preset"].get<std::string>();
      if (p == "A") s = scenario_a();
      else if (p == "B") s = scenario_b();
      else if (p == "C") s = scenario_c();
      else if (p == "C-static") s = scenario_c(CameraMode::kStatic);
      else fail(ErrorCode::kParseError, "unknown preset " + p);
    }
    s.name = j.value("name", s.name);
    s.frames = j.value("frames", s.frames);
    s.img_h = j.value("img_h", s.img_h);
    s.img_w = j.value("img_w", s.img_w);
    s.fps = j.value("fps", s.fps);
    if (j.contains("camera_mode")) s.camera_mode = detail::parse_camera_mode(j["camera_mode"].get<std::string>(), 1);
    s.seed = j.value("seed", s.seed);
    if (j.contains("objects")) {
      s.objects.clear();
      for (const auto& o : j["objects"]) {
        ObjectSpec spec;
        const auto cls = class_from_int(o.value("class_id", 2));
        if (!cls) fail(ErrorCode::kParseError, "object class_id must be 1 or 2");
        spec.class_id = *cls;
        spec.x0 = o.at("x0").get<double>();
        spec.y0 = o.at("y0").get<double>();
        spec.w = o.value("w", spec.w);
        spec.h = o.value("h", spec.h);
        spec.vx = o.value("vx", 0.0);
        spec.vy = o.value("vy", 0.0);
        spec.birth = o.value("birth", FrameIndex{1});
        spec.death = o.value("death", FrameIndex{0});
        s.objects.push_back(spec);
      }
    }
    if (j.contains("occlusions")) {
      s.occlusions.clear();
      for (const auto& e : j["occlusions"]) {
        s.occlusions.push_back({e.at("object").get<std::size_t>(), e.at("start").get<FrameIndex>(),
                                e.at("length").get<FrameIndex>()});
      }
    }
    if (j.contains("detector")) {
      const auto& d = j["detector"];
      s.detector.dropout = d.value("dropout", s.detector.dropout);
      s.detector.score_min = d.value("score_min", s.detector.score_min);
      s.detector.score_max = d.value("score_max", s.detector.score_max);
      s.detector.box_jitter = d.value("box_jitter", s.detector.box_jitter);
    }
    if (j.contains("embedding")) {
      const auto& e = j["embedding"];
      s.embedding.dim = e.value("dim", s.embedding.dim);
      s.embedding.noise = e.value("noise", s.embedding.noise);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("scenario: ") + e.what());
  }
  return s;
}

/// Accepts a preset name (A, B, C, C-static) or a path to a JSON scenario.
inline ScenarioSpec load_scenario(const std::string& name_or_path) {
  if (name_or_path == "A") return scenario_a();
  if (name_or_path == "B") return scenario_b();
  if (name_or_path == "C") return scenario_c();
  if (name_or_path == "C-static") return scenario_c(CameraMode::kStatic);
  std::ifstream in(name_or_path);
  if (!in) fail(ErrorCode::kIoError, "cannot open scenario " + name_or_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kParseError, std::string("scenario: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace motseg
