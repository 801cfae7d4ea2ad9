#pragma once

// Offline re-identification: reconnect tracklets split by long occlusions
// when appearance agrees and, depending on the camera, either extrapolated
// boxes overlap across the gap (static) or motion directions agree (moving).

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "motseg/config.hpp"
#include "motseg/embedding.hpp"
#include "motseg/mask.hpp"
#include "motseg/tracklet.hpp"

namespace motseg {

struct MotionVector {
  double mx = 0.0;
  double my = 0.0;
  // Set when the window held a single observation and no motion is defined.
  bool low_confidence = false;
};

enum class TrackletEnd { kHead, kTail };

/// Resolved ReID parameters for one sequence.
struct ReidParams {
  ReidConfig config;
  CameraMode camera_mode = CameraMode::kMoving;
  double fps = 0.0;
  double huber_delta = 4.0;
  int huber_window = 10;

  int gap_frames(ClassId c) const { return seconds_to_frames(config.n2_seconds[c], fps); }
};

/// Mean displacement of consecutive top-left corners over the first or last
/// min(n3, length) observations.
inline MotionVector motion_vector(const Tracklet& tr, TrackletEnd end, int n3) {
  const auto window = end == TrackletEnd::kTail
                          ? tail_window(tr, static_cast<std::size_t>(n3))
                          : head_window(tr, static_cast<std::size_t>(n3));
  if (window.size() < 2) return {0.0, 0.0, true};
  double sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j + 1 < window.size(); ++j) {
    sx += window[j + 1].box.x - window[j].box.x;
    sy += window[j + 1].box.y - window[j].box.y;
  }
  const double steps = static_cast<double>(window.size() - 1);
  return {sx / steps, sy / steps, false};
}

struct CandidatePair {
  std::size_t u = 0;  // earlier tracklet
  std::size_t v = 0;  // later tracklet
  double similarity = 0.0;
};

/// Ordered pairs (u, v) of same-class tracklets where u ends before v
/// starts, at most gap_frames(class) frames are missing in between, and the
/// best pairwise bank similarity exceeds beta1.
inline std::vector<CandidatePair> candidate_pairs(std::span<const Tracklet> tracklets,
                                                  const ReidParams& params) {
  std::vector<CandidatePair> out;
  for (std::size_t u = 0; u < tracklets.size(); ++u) {
    for (std::size_t v = 0; v < tracklets.size(); ++v) {
      const Tracklet& a = tracklets[u];
      const Tracklet& b = tracklets[v];
      if (u == v || a.class_id != b.class_id) continue;
      if (a.last_frame() >= b.first_frame()) continue;
      const FrameIndex missing = b.first_frame() - a.last_frame() - 1;
      if (missing > params.gap_frames(a.class_id)) continue;
      const double sim = bank_similarity(a.bank, b.bank);
      if (sim > params.config.beta1) out.push_back({u, v, sim});
    }
  }
  return out;
}

/// Mean IOU between u extrapolated forward and v extrapolated backward over
/// the frames strictly between them. Adjacent tracklets compare u's last box
/// with v's first box.
inline double gap_extrapolation_iou(const Tracklet& u, const Tracklet& v, const ReidParams& params) {
  const FrameIndex begin = u.last_frame() + 1, end = v.first_frame();
  if (begin >= end) return bbox_iou(u.observations.back().box, v.observations.front().box);
  const auto window = static_cast<std::size_t>(params.huber_window);
  const auto u_win = tail_window(u, window);
  const auto v_win = head_window(v, window);
  double sum = 0.0;
  for (FrameIndex f = begin; f < end; ++f) {
    sum += bbox_iou(extrapolate_box(u_win, f, params.huber_delta).box,
                    extrapolate_box(v_win, f, params.huber_delta).box);
  }
  return sum / static_cast<double>(end - begin);
}

inline bool static_merge_test(const Tracklet& u, const Tracklet& v, const ReidParams& params) {
  return gap_extrapolation_iou(u, v, params) > params.config.beta2;
}

inline double motion_cosine(const MotionVector& a, const MotionVector& b) {
  const double na = std::hypot(a.mx, a.my), nb = std::hypot(b.mx, b.my);
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::clamp((a.mx * b.mx + a.my * b.my) / (na * nb), -1.0, 1.0);
}

/// Motion directions must agree: cosine positive and above beta3. A zero
/// motion vector on either side has no direction and is rejected.
inline bool moving_merge_test(const MotionVector& mu, const MotionVector& mv, double beta3) {
  if (mu.low_confidence || mv.low_confidence) return false;
  if (!(std::hypot(mu.mx, mu.my) > 0.0) || !(std::hypot(mv.mx, mv.my) > 0.0)) return false;
  return motion_cosine(mu, mv) > std::max(0.0, beta3);
}

inline bool moving_merge_test(const Tracklet& u, const Tracklet& v, const ReidParams& params) {
  return moving_merge_test(motion_vector(u, TrackletEnd::kTail, params.config.n3_frames),
                           motion_vector(v, TrackletEnd::kHead, params.config.n3_frames),
                           params.config.beta3);
}

inline bool merge_test(const Tracklet& u, const Tracklet& v, const ReidParams& params) {
  return params.camera_mode == CameraMode::kStatic ? static_merge_test(u, v, params)
                                                   : moving_merge_test(u, v, params);
}

/// Joins u (earlier) and v (later) into one tracklet carrying u's id.
inline Tracklet concatenate(const Tracklet& u, const Tracklet& v) {
  Tracklet out;
  out.id = u.id;
  out.class_id = u.class_id;
  out.observations = u.observations;
  out.observations.insert(out.observations.end(), v.observations.begin(), v.observations.end());
  out.bank = FeatureBank::concatenate(u.bank, v.bank);
  return out;
}

/// Greedy merging, repeated until a pass accepts nothing. Within a pass,
/// candidates are visited by descending similarity (ties: shorter gap, then
/// index) and each
/// tracklet may be joined at most once as the earlier side and once as the
/// later side; accepted links form chains that collapse into one tracklet
/// keeping the id of the chain's first member. Output is ordered by id.
inline std::vector<Tracklet> merge_pass(std::vector<Tracklet> tracklets, const ReidParams& params) {
  for (;;) {
    auto pairs = candidate_pairs(tracklets, params);
    auto gap = [&](const CandidatePair& p) {
      return tracklets[p.v].first_frame() - tracklets[p.u].last_frame();
    };
    std::stable_sort(pairs.begin(), pairs.end(), [&](const CandidatePair& a, const CandidatePair& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return gap(a) < gap(b);
    });
    std::vector<std::ptrdiff_t> next(tracklets.size(), -1), prev(tracklets.size(), -1);
    bool accepted = false;
    for (const auto& p : pairs) {
      if (next[p.u] >= 0 || prev[p.v] >= 0) continue;
      if (!merge_test(tracklets[p.u], tracklets[p.v], params)) continue;
      next[p.u] = static_cast<std::ptrdiff_t>(p.v);
      prev[p.v] = static_cast<std::ptrdiff_t>(p.u);
      accepted = true;
    }
    if (!accepted) break;

    std::vector<Tracklet> merged;
    for (std::size_t i = 0; i < tracklets.size(); ++i) {
      if (prev[i] >= 0) continue;
      Tracklet chain = tracklets[i];
      for (std::ptrdiff_t j = next[i]; j >= 0; j = next[static_cast<std::size_t>(j)]) {
        chain = concatenate(chain, tracklets[static_cast<std::size_t>(j)]);
      }
      merged.push_back(std::move(chain));
    }
    tracklets = std::move(merged);
  }
  std::stable_sort(tracklets.begin(), tracklets.end(),
                   [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  return tracklets;
}

}  // namespace motseg
