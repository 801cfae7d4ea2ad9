#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "motseg/config.hpp"
#include "motseg/embedding.hpp"
#include "motseg/huber.hpp"
#include "motseg/mask.hpp"

namespace motseg {

struct Observation {
  FrameIndex frame = 0;
  BBox box;
  BinaryMask mask;
  double score = 0.0;
};

/// A track segment: observations in strictly increasing frame order plus its
/// feature bank. Output of the online tracker and the unit of offline merging.
struct Tracklet {
  int id = 0;
  ClassId class_id = ClassId::kPedestrian;
  std::vector<Observation> observations;
  FeatureBank bank;

  FrameIndex first_frame() const { return observations.front().frame; }
  FrameIndex last_frame() const { return observations.back().frame; }
  std::size_t length() const { return observations.size(); }

  double mean_score() const {
    if (observations.empty()) return 0.0;
    double s = 0.0;
    for (const auto& o : observations) s += o.score;
    return s / static_cast<double>(observations.size());
  }

  const Observation* at_frame(FrameIndex frame) const {
    const auto it = std::lower_bound(
        observations.begin(), observations.end(), frame,
        [](const Observation& o, FrameIndex f) { return o.frame < f; });
    return (it != observations.end() && it->frame == frame) ? &*it : nullptr;
  }
};

struct ExtrapolatedBox {
  BBox box;
  // Set when fewer than two observations were available and the nearest
  // observed box was repeated instead.
  bool fallback = false;
};

/// Robust-fits the top-left x and y of `window` against frame index and
/// evaluates both at `target`. Width and height are copied from the
/// observation nearest in time to the target.
inline ExtrapolatedBox extrapolate_box(std::span<const Observation> window, FrameIndex target,
                                       double huber_delta) {
  if (window.empty()) fail(ErrorCode::kInvalidArgument, "extrapolation from no observations");
  const Observation& anchor =
      target >= window.back().frame
          ? window.back()
          : (target <= window.front().frame
                 ? window.front()
                 : *std::min_element(window.begin(), window.end(),
                                     [&](const Observation& a, const Observation& b) {
                                       return std::abs(a.frame - target) <
                                              std::abs(b.frame - target);
                                     }));
  if (window.size() < 2) return {anchor.box, true};

  std::vector<TimedValue> xs, ys;
  xs.reserve(window.size());
  ys.reserve(window.size());
  for (const auto& o : window) {
    xs.push_back({static_cast<double>(o.frame), o.box.x});
    ys.push_back({static_cast<double>(o.frame), o.box.y});
  }
  const HuberOptions opts{huber_delta};
  const double t = static_cast<double>(target);
  BBox box = anchor.box;
  box.x = huber_fit(xs, opts)(t);
  box.y = huber_fit(ys, opts)(t);
  return {box, false};
}

/// Last `window` observations of a tracklet.
inline std::span<const Observation> tail_window(const Tracklet& t, std::size_t window) {
  const std::size_t n = std::min(window, t.observations.size());
  return std::span<const Observation>(t.observations).last(n);
}

/// First `window` observations of a tracklet.
inline std::span<const Observation> head_window(const Tracklet& t, std::size_t window) {
  const std::size_t n = std::min(window, t.observations.size());
  return std::span<const Observation>(t.observations).first(n);
}

}  // namespace motseg
