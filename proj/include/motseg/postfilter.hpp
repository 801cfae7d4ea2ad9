#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "motseg/config.hpp"
#include "motseg/mask.hpp"
#include "motseg/tracker.hpp"
#include "motseg/tracklet.hpp"

namespace motseg {

inline bool passes_detection_filters(const Detection& d, const FilterConfig& cfg) {
  if (d.score < cfg.min_score) return false;
  if (d.box.area() < cfg.min_box_area) return false;
  if (!(d.box.w > 0.0)) return false;
  const double aspect = d.box.h / d.box.w;
  const AspectRange& range = cfg.aspect_range[d.class_id];
  return aspect >= range.lo && aspect <= range.hi;
}

/// Keeps detections passing the score, area and h/w aspect filters, in order.
inline std::vector<Detection> filter_detections(std::span<const Detection> dets,
                                                const FilterConfig& cfg) {
  std::vector<Detection> kept;
  for (const auto& d : dets) {
    if (passes_detection_filters(d, cfg)) kept.push_back(d);
  }
  return kept;
}

/// Drops tracks shorter than min_track_len or with mean score below
/// min_track_avg_score.
inline std::vector<Tracklet> prune_tracks(std::vector<Tracklet> tracks, const FilterConfig& cfg) {
  std::erase_if(tracks, [&](const Tracklet& t) {
    return t.length() < static_cast<std::size_t>(cfg.min_track_len) ||
           t.mean_score() < cfg.min_track_avg_score;
  });
  return tracks;
}

/// Mean mask IOU over the frames both tracks cover; 0 without common frames.
inline double trajectory_iou(const Tracklet& a, const Tracklet& b) {
  double sum = 0.0;
  std::size_t common = 0;
  auto ia = a.observations.begin(), ib = b.observations.begin();
  while (ia != a.observations.end() && ib != b.observations.end()) {
    if (ia->frame < ib->frame) {
      ++ia;
    } else if (ib->frame < ia->frame) {
      ++ib;
    } else {
      sum += mask_iou(ia->mask, ib->mask);
      ++common;
      ++ia;
      ++ib;
    }
  }
  return common == 0 ? 0.0 : sum / static_cast<double>(common);
}

/// Removes duplicate trajectories. Tracks are visited longest first (equal
/// lengths: lower id first) and kept unless their trajectory IOU with an
/// already kept same-class track exceeds the threshold, so every removed
/// track has a longer (or equal-length, lower-id) surviving duplicate.
/// Surviving tracks keep their input order.
inline std::vector<Tracklet> dedup_tracks(std::vector<Tracklet> tracks, const FilterConfig& cfg) {
  std::vector<std::size_t> order(tracks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tracks[a].length() != tracks[b].length()) return tracks[a].length() > tracks[b].length();
    return tracks[a].id < tracks[b].id;
  });
  std::vector<char> keep(tracks.size(), 0);
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return tracks[k].class_id == tracks[i].class_id &&
             trajectory_iou(tracks[k], tracks[i]) > cfg.traj_iou_threshold;
    });
    if (duplicate) continue;
    keep[i] = 1;
    kept.push_back(i);
  }
  std::vector<Tracklet> out;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (keep[i]) out.push_back(std::move(tracks[i]));
  }
  return out;
}

}  // namespace motseg
