#pragma once

// File formats:
//  * detections: JSON lines. The first record is a header
//      {"sequence": {"name", "fps", "img_h", "img_w", "camera_mode"}}
//    followed by one detection per line
//      {"frame", "class_id", "score", "bbox": [x, y, w, h],
//       "mask": {"h", "w", "counts": "<rle token>"},
//       "embedding": [...]  or  "feature_map": {"gh", "gw", "c", "values"}}
//  * results: MOTS text, one mask per line
//      frame track_id class_id img_h img_w rle
//  * overlays: binary PPM (P6), one image per frame.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "motseg/config.hpp"
#include "motseg/config_io.hpp"
#include "motseg/error.hpp"
#include "motseg/mask.hpp"
#include "motseg/tracker.hpp"
#include "motseg/tracklet.hpp"

namespace motseg {

struct SequenceMeta {
  std::string name = "sequence";
  double fps = 30.0;
  int img_h = 0;
  int img_w = 0;
  CameraMode camera_mode = CameraMode::kMoving;

  friend bool operator==(const SequenceMeta&, const SequenceMeta&) = default;
};

struct FrameDetections {
  FrameIndex frame = 0;
  std::vector<Detection> detections;
};

struct DetectionSet {
  SequenceMeta meta;
  std::vector<FrameDetections> frames;  // ascending frame order

  std::size_t detection_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.detections.size();
    return n;
  }
};

namespace detail {

[[noreturn]] inline void parse_fail(ErrorCode code, int line, const std::string& what) {
  fail(code, "line " + std::to_string(line) + ": " + what);
}

inline CameraMode parse_camera_mode(const std::string& s, int line) {
  if (s == "static") return CameraMode::kStatic;
  if (s == "moving") return CameraMode::kMoving;
  parse_fail(ErrorCode::kParseError, line, "camera_mode must be static or moving");
}

inline SequenceMeta parse_header(const nlohmann::json& j, int line) {
  if (!j.is_object() || !j.contains("sequence") || !j["sequence"].is_object()) {
    parse_fail(ErrorCode::kParseError, line, "first record must be a {\"sequence\": {...}} header");
  }
  const auto& s = j["sequence"];
  SequenceMeta meta;
  try {
    meta.name = s.value("name", std::string("sequence"));
    meta.fps = s.at("fps").get<double>();
    meta.img_h = s.at("img_h").get<int>();
    meta.img_w = s.at("img_w").get<int>();
    meta.camera_mode = parse_camera_mode(s.value("camera_mode", std::string("moving")), line);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(ErrorCode::kParseError, line, std::string("header: ") + e.what());
  }
  if (!(meta.fps > 0.0)) parse_fail(ErrorCode::kParseError, line, "fps must be > 0");
  if (meta.img_h <= 0 || meta.img_w <= 0) {
    parse_fail(ErrorCode::kParseError, line, "image dimensions must be positive");
  }
  return meta;
}

inline Detection parse_detection(const nlohmann::json& j, const SequenceMeta& meta, int line) {
  try {
    const auto frame = j.at("frame").get<FrameIndex>();
    const auto cls = class_from_int(j.at("class_id").get<long long>());
    if (!cls) parse_fail(ErrorCode::kParseError, line, "class_id must be 1 (car) or 2 (pedestrian)");
    const double score = j.at("score").get<double>();
    if (!(score >= 0.0 && score <= 1.0)) parse_fail(ErrorCode::kParseError, line, "score outside [0, 1]");
    const auto& bb = j.at("bbox");
    if (!bb.is_array() || bb.size() != 4) parse_fail(ErrorCode::kParseError, line, "bbox must be [x, y, w, h]");
    const BBox box{bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>()};
    if (!(box.w >= 0.0) || !(box.h >= 0.0) || !std::isfinite(box.x) || !std::isfinite(box.y)) {
      parse_fail(ErrorCode::kParseError, line, "bbox must be finite with w, h >= 0");
    }

    const auto& m = j.at("mask");
    const int mh = m.at("h").get<int>(), mw = m.at("w").get<int>();
    if (mh != meta.img_h || mw != meta.img_w) {
      parse_fail(ErrorCode::kMaskDimMismatch, line,
                 "mask " + std::to_string(mh) + "x" + std::to_string(mw) + " but image is " +
                     std::to_string(meta.img_h) + "x" + std::to_string(meta.img_w));
    }
    std::optional<BinaryMask> mask;
    try {
      mask = rle_from_string(m.at("counts").get<std::string>(), mh, mw);
    } catch (const Error& e) {
      const ErrorCode code =
          e.code() == ErrorCode::kCountsSumMismatch ? ErrorCode::kMaskDimMismatch : ErrorCode::kParseError;
      parse_fail(code, line, e.what());
    }

    std::variant<Embedding, FeatureMap> features;
    if (j.contains("embedding")) {
      features = Embedding{j["embedding"].get<std::vector<double>>(), false};
      if (std::get<Embedding>(features).values.empty()) {
        parse_fail(ErrorCode::kMissingFeatures, line, "empty embedding");
      }
    } else if (j.contains("feature_map")) {
      const auto& f = j["feature_map"];
      FeatureMap fmap{f.at("gh").get<int>(), f.at("gw").get<int>(), f.at("c").get<int>(),
                      f.at("values").get<std::vector<double>>()};
      try {
        fmap.validate();
      } catch (const Error& e) {
        parse_fail(ErrorCode::kParseError, line, e.what());
      }
      features = std::move(fmap);
    } else {
      parse_fail(ErrorCode::kMissingFeatures, line, "neither embedding nor feature_map given");
    }
    return Detection{frame, *cls, score, box, std::move(*mask), std::move(features)};
  } catch (const nlohmann::json::exception& e) {
    parse_fail(ErrorCode::kParseError, line, e.what());
  }
}

}  // namespace detail

inline DetectionSet parse_detections(std::istream& in) {
  DetectionSet set;
  std::map<FrameIndex, std::vector<Detection>> by_frame;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      detail::parse_fail(ErrorCode::kParseError, line_no, e.what());
    }
    if (!have_header) {
      set.meta = detail::parse_header(j, line_no);
      have_header = true;
      continue;
    }
    Detection det = detail::parse_detection(j, set.meta, line_no);
    by_frame[det.frame].push_back(std::move(det));
  }
  if (!have_header) detail::parse_fail(ErrorCode::kParseError, 1, "missing sequence header");
  for (auto& [frame, dets] : by_frame) set.frames.push_back({frame, std::move(dets)});
  return set;
}

inline DetectionSet load_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open detections " + path);
  return parse_detections(in);
}

inline nlohmann::json header_json(const SequenceMeta& meta) {
  return {{"sequence",
           {{"name", meta.name},
            {"fps", meta.fps},
            {"img_h", meta.img_h},
            {"img_w", meta.img_w},
            {"camera_mode", std::string(camera_mode_name(meta.camera_mode))}}}};
}

inline nlohmann::json detection_json(const Detection& d) {
  nlohmann::json j = {{"frame", d.frame},
                      {"class_id", static_cast<int>(d.class_id)},
                      {"score", d.score},
                      {"bbox", {d.box.x, d.box.y, d.box.w, d.box.h}},
                      {"mask", {{"h", d.mask.height()}, {"w", d.mask.width()}, {"counts", rle_to_string(d.mask)}}}};
  if (const auto* e = std::get_if<Embedding>(&d.features)) {
    j["embedding"] = e->values;
  } else {
    const auto& f = std::get<FeatureMap>(d.features);
    j["feature_map"] = {{"gh", f.grid_h}, {"gw", f.grid_w}, {"c", f.channels}, {"values", f.values}};
  }
  return j;
}

inline void write_detections(const DetectionSet& set, std::ostream& out) {
  out << header_json(set.meta).dump() << '\n';
  for (const auto& f : set.frames) {
    for (const auto& d : f.detections) out << detection_json(d).dump() << '\n';
  }
}

struct ResultRecord {
  FrameIndex frame = 0;
  int track_id = 0;
  int class_id = 0;
  int img_h = 0;
  int img_w = 0;
  std::string rle;

  BinaryMask mask() const { return rle_from_string(rle, img_h, img_w); }

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Converts finished tracks into result records sorted by (frame, track id).
/// Overlapping pixels go to the lower track id; masks emptied by that are
/// omitted.
inline std::vector<ResultRecord> results_from_tracks(std::span<const Tracklet> tracks,
                                                     const SequenceMeta& meta) {
  struct Entry {
    int id;
    ClassId cls;
    const BinaryMask* mask;
  };
  std::map<FrameIndex, std::vector<Entry>> by_frame;
  for (const auto& t : tracks) {
    for (const auto& o : t.observations) {
      if (o.mask.height() != meta.img_h || o.mask.width() != meta.img_w) {
        fail(ErrorCode::kMaskDimMismatch, "track " + std::to_string(t.id) + " frame " +
                                              std::to_string(o.frame) + " has a mask of the wrong size");
      }
      by_frame[o.frame].push_back({t.id, t.class_id, &o.mask});
    }
  }
  std::vector<ResultRecord> out;
  for (auto& [frame, entries] : by_frame) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.id < b.id; });
    BinaryMask claimed = BinaryMask::empty(meta.img_h, meta.img_w);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i > 0 && entries[i].id == entries[i - 1].id) {
        fail(ErrorCode::kInvalidArgument,
             "track id " + std::to_string(entries[i].id) + " appears twice in frame " + std::to_string(frame));
      }
      const BinaryMask own = mask_difference(*entries[i].mask, claimed);
      if (own.is_empty()) continue;
      if (mask_overlap(own, claimed).intersection != 0) {
        fail(ErrorCode::kOverlapAfterResolution, "frame " + std::to_string(frame));
      }
      claimed = mask_union(claimed, own);
      out.push_back({frame, entries[i].id, static_cast<int>(entries[i].cls), meta.img_h, meta.img_w,
                     rle_to_string(own)});
    }
  }
  return out;
}

inline constexpr std::string_view kResultsHeader = "# frame track_id class_id img_h img_w rle";

inline void write_results(std::span<const ResultRecord> records, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << r.frame << ' ' << r.track_id << ' ' << r.class_id << ' ' << r.img_h << ' ' << r.img_w
        << ' ' << r.rle << '\n';
  }
}

inline void write_results(std::span<const ResultRecord> records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write results " + path);
  write_results(records, out);
}

inline void write_results(std::span<const Tracklet> tracks, const SequenceMeta& meta,
                          const std::string& path) {
  write_results(results_from_tracks(tracks, meta), path);
}

/// Parses a MOTS result file. Lines starting with '#' are comments. Every
/// mask token must decode to the declared image size and (frame, track_id)
/// must be unique.
inline std::vector<ResultRecord> parse_results(std::istream& in) {
  std::vector<ResultRecord> out;
  std::set<std::pair<FrameIndex, int>> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    std::istringstream fields{std::string(text)};
    ResultRecord r;
    if (!(fields >> r.frame >> r.track_id >> r.class_id >> r.img_h >> r.img_w >> r.rle)) {
      detail::parse_fail(ErrorCode::kParseError, line_no, "expected 'frame track_id class_id img_h img_w rle'");
    }
    std::string extra;
    if (fields >> extra) detail::parse_fail(ErrorCode::kParseError, line_no, "trailing fields");
    if (!class_from_int(r.class_id)) detail::parse_fail(ErrorCode::kParseError, line_no, "unknown class_id");
    if (r.img_h <= 0 || r.img_w <= 0) detail::parse_fail(ErrorCode::kParseError, line_no, "bad image size");
    try {
      (void)r.mask();
    } catch (const Error& e) {
      detail::parse_fail(ErrorCode::kParseError, line_no, e.what());
    }
    if (!seen.insert({r.frame, r.track_id}).second) {
      detail::parse_fail(ErrorCode::kParseError, line_no,
                         "duplicate (frame, track_id) = (" + std::to_string(r.frame) + ", " +
                             std::to_string(r.track_id) + ")");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ResultRecord> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open results " + path);
  return parse_results(in);
}

// Deterministic, well-spread color per track id.
inline std::array<std::uint8_t, 3> track_color(int id) {
  std::uint32_t h = static_cast<std::uint32_t>(id) * 2654435761u;
  h ^= h >> 15;
  return {static_cast<std::uint8_t>(64 + (h & 0xbf)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0xbf)),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0xbf))};
}

/// Renders each frame's masks as flat colors on black into
/// <dir>/frame_NNNNNN.ppm. Returns the written paths.
inline std::vector<std::string> write_overlays(std::span<const ResultRecord> records,
                                               const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::map<FrameIndex, std::vector<const ResultRecord*>> by_frame;
  for (const auto& r : records) by_frame[r.frame].push_back(&r);
  std::vector<std::string> paths;
  for (const auto& [frame, recs] : by_frame) {
    const int h = recs.front()->img_h, w = recs.front()->img_w;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(h) * w * 3, 0);
    for (const ResultRecord* r : recs) {
      if (r->img_h != h || r->img_w != w) fail(ErrorCode::kDimMismatch, "frame " + std::to_string(frame));
      const auto color = track_color(r->track_id);
      const BinaryMask m = r->mask();
      std::uint64_t pos = 0;
      bool fg = false;
      for (std::uint64_t run : m.counts()) {
        if (fg) {
          for (std::uint64_t k = pos; k < pos + run; ++k) {
            const std::size_t row = k % h, col = k / h;
            std::copy(color.begin(), color.end(), rgb.begin() + (row * w + col) * 3);
          }
        }
        pos += run;
        fg = !fg;
      }
    }
    std::ostringstream name;
    name << "frame_" << std::setw(6) << std::setfill('0') << frame << ".ppm";
    const std::string path = (std::filesystem::path(dir) / name.str()).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
    out << "P6\n" << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace motseg
