#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "motseg/error.hpp"

namespace motseg {

enum class ClassId : int { kCar = 1, kPedestrian = 2 };

inline constexpr std::array<ClassId, 2> kAllClasses{ClassId::kCar, ClassId::kPedestrian};

constexpr std::string_view class_name(ClassId c) {
  return c == ClassId::kCar ? "car" : "pedestrian";
}

inline std::optional<ClassId> class_from_int(long long value) {
  if (value == 1) return ClassId::kCar;
  if (value == 2) return ClassId::kPedestrian;
  return std::nullopt;
}

template <class T>
struct PerClass {
  T car{};
  T pedestrian{};

  T& operator[](ClassId c) { return c == ClassId::kCar ? car : pedestrian; }
  const T& operator[](ClassId c) const { return c == ClassId::kCar ? car : pedestrian; }
  friend bool operator==(const PerClass&, const PerClass&) = default;
};

enum class CameraMode { kStatic, kMoving };

constexpr std::string_view camera_mode_name(CameraMode m) {
  return m == CameraMode::kStatic ? "static" : "moving";
}

/// Converts a duration in seconds to a whole number of frames.
inline int seconds_to_frames(double seconds, double fps) {
  return static_cast<int>(std::lround(seconds * fps));
}

struct TrackerConfig {
  // 0 means "take the frame rate from the sequence header".
  double fps = 0.0;
  PerClass<double> n1_seconds{0.1, 0.2};
  PerClass<double> gate_cost{1.7, 1.7};
  double huber_delta = 4.0;
  int huber_window = 10;
  double str_distance_factor = 2.0;
  int bank_size = 5;
  bool enable_str = true;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

struct ReidConfig {
  bool enabled = true;
  PerClass<double> n2_seconds{0.5, 1.0};
  int n3_frames = 5;
  double beta1 = 0.6;
  double beta2 = 0.5;
  double beta3 = 0.8;
  // Unset means "take the camera mode from the sequence header".
  std::optional<CameraMode> camera_mode;

  friend bool operator==(const ReidConfig&, const ReidConfig&) = default;
};

struct AspectRange {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const AspectRange&, const AspectRange&) = default;
};

struct FilterConfig {
  double min_score = 0.5;
  double min_box_area = 100.0;
  PerClass<AspectRange> aspect_range{{0.2, 2.0}, {1.0, 5.0}};  // h / w
  int min_track_len = 5;
  double min_track_avg_score = 0.5;
  double traj_iou_threshold = 0.75;

  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

struct PipelineConfig {
  TrackerConfig tracker;
  ReidConfig reid;
  FilterConfig filter;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

namespace detail {

inline void require(bool ok, std::string_view key, std::string_view what) {
  if (!ok) fail(ErrorCode::kRangeError, std::string(key) + " " + std::string(what));
}

}  // namespace detail

/// Throws RangeError naming the first offending key.
inline void validate(const PipelineConfig& cfg) {
  using detail::require;
  const auto& t = cfg.tracker;
  require(t.fps >= 0.0 && std::isfinite(t.fps), "tracker.fps", "must be >= 0 (0 = from sequence)");
  for (ClassId c : kAllClasses) {
    const std::string prefix = "tracker." + std::string(class_name(c));
    require(t.n1_seconds[c] > 0.0, prefix + ".n1_seconds", "must be > 0");
    require(t.gate_cost[c] > 0.0 && t.gate_cost[c] <= 3.0, prefix + ".gate_cost",
            "must lie in (0, 3]");
  }
  require(t.huber_delta > 0.0, "tracker.huber_delta", "must be > 0");
  require(t.huber_window >= 2, "tracker.huber_window", "must be >= 2");
  require(t.str_distance_factor > 0.0, "tracker.str_distance_factor", "must be > 0");
  require(t.bank_size > 0, "tracker.bank_size", "must be > 0");

  const auto& r = cfg.reid;
  for (ClassId c : kAllClasses) {
    require(r.n2_seconds[c] > 0.0, "reid." + std::string(class_name(c)) + ".n2_seconds",
            "must be > 0");
  }
  require(r.n3_frames >= 2, "reid.n3_frames", "must be >= 2");
  require(r.beta1 > 0.0 && r.beta1 < 1.0, "reid.beta1", "must lie in (0, 1)");
  require(r.beta2 > 0.0 && r.beta2 < 1.0, "reid.beta2", "must lie in (0, 1)");
  require(r.beta3 > 0.0 && r.beta3 < 1.0, "reid.beta3", "must lie in (0, 1)");

  const auto& f = cfg.filter;
  require(f.min_score >= 0.0 && f.min_score <= 1.0, "filter.min_score", "must lie in [0, 1]");
  require(f.min_box_area >= 0.0, "filter.min_box_area", "must be >= 0");
  for (ClassId c : kAllClasses) {
    const std::string prefix = "filter." + std::string(class_name(c));
    require(f.aspect_range[c].lo >= 0.0, prefix + ".aspect_min", "must be >= 0");
    require(f.aspect_range[c].lo < f.aspect_range[c].hi, prefix + ".aspect_max",
            "must exceed aspect_min");
  }
  require(f.min_track_len >= 1, "filter.min_track_len", "must be >= 1");
  require(f.min_track_avg_score >= 0.0 && f.min_track_avg_score <= 1.0,
          "filter.min_track_avg_score", "must lie in [0, 1]");
  require(f.traj_iou_threshold > 0.0 && f.traj_iou_threshold <= 1.0, "filter.traj_iou_threshold",
          "must lie in (0, 1]");
}

}  // namespace motseg
