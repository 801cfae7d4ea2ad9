#pragma once

// Online frame-by-frame association: Hungarian matching of active tracks on
// mask IOU plus appearance, short-term retrieval of lost tracks through
// robust box extrapolation, and the track lifecycle.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "motseg/assignment.hpp"
#include "motseg/config.hpp"
#include "motseg/embedding.hpp"
#include "motseg/error.hpp"
#include "motseg/mask.hpp"
#include "motseg/tracklet.hpp"

namespace motseg {

/// One frame-level hypothesis. Features are either a spatial ROI feature map
/// (pooled with the instance mask on entry) or an already pooled vector.
struct Detection {
  FrameIndex frame = 0;
  ClassId class_id = ClassId::kPedestrian;
  double score = 0.0;
  BBox box;
  BinaryMask mask;
  std::variant<Embedding, FeatureMap> features;
};

/// Mask-weighted embedding of a detection, L2-normalized.
inline Embedding embed(const Detection& det) {
  if (const auto* e = std::get_if<Embedding>(&det.features)) return l2_normalize(e->values);
  const auto& fmap = std::get<FeatureMap>(det.features);
  fmap.validate();
  return instance_aware_pool(fmap, spatial_attention(det.mask, det.box, fmap.grid_h, fmap.grid_w));
}

enum class TrackState { kActive, kLost, kTerminated };

struct Track : Tracklet {
  TrackState state = TrackState::kActive;

  FrameIndex last_matched_frame() const { return last_frame(); }
};

/// 2 - maskIOU(last mask of the track, detection mask) - bank similarity.
/// Cross-class pairs are infeasible.
inline double assignment_cost(const Track& track, const Detection& det,
                              const Embedding& det_embedding) {
  if (track.class_id != det.class_id) return kInfeasible;
  return 2.0 - mask_iou(track.observations.back().mask, det.mask) -
         bank_similarity(track.bank, det_embedding);
}

/// Box of `track` extrapolated to `target` from its last huber_window
/// observations.
inline ExtrapolatedBox extrapolate_track(const Track& track, FrameIndex target,
                                         const TrackerConfig& cfg) {
  return extrapolate_box(tail_window(track, static_cast<std::size_t>(cfg.huber_window)), target,
                         cfg.huber_delta);
}

/// Short-term retrieval costs between lost tracks (rows) and unassigned
/// detections (columns): 2 - bank similarity - IOU(extrapolated box, det box).
/// A pair is infeasible across classes or when the detection's top-left lies
/// farther than str_distance_factor track widths from the extrapolated one.
inline CostMatrix str_costs(std::span<const Track* const> lost, std::span<const Detection* const> dets,
                            std::span<const Embedding* const> embeddings, FrameIndex frame,
                            const TrackerConfig& cfg) {
  CostMatrix costs(lost.size(), dets.size());
  for (std::size_t r = 0; r < lost.size(); ++r) {
    const Track& track = *lost[r];
    const BBox predicted = extrapolate_track(track, frame, cfg).box;
    const double reach = cfg.str_distance_factor * track.observations.back().box.w;
    for (std::size_t c = 0; c < dets.size(); ++c) {
      const Detection& det = *dets[c];
      if (det.class_id != track.class_id) continue;
      const double dist = std::hypot(det.box.x - predicted.x, det.box.y - predicted.y);
      if (dist > reach) continue;
      costs(r, c) = 2.0 - bank_similarity(track.bank, *embeddings[c]) - bbox_iou(predicted, det.box);
    }
  }
  return costs;
}

/// Matches lost tracks to unassigned detections, gating each pair with the
/// track class's gate_cost.
inline Matching str_match(std::span<const Track* const> lost, std::span<const Detection* const> dets,
                          std::span<const Embedding* const> embeddings, FrameIndex frame,
                          const TrackerConfig& cfg) {
  const CostMatrix costs = str_costs(lost, dets, embeddings, frame, cfg);
  Matching solved = solve_assignment(costs);
  Matching gated;
  for (const auto& [r, c] : solved.pairs) {
    if (costs(r, c) > cfg.gate_cost[lost[r]->class_id]) continue;
    gated.pairs.emplace_back(r, c);
    gated.total_cost += costs(r, c);
  }
  return gated;
}

enum class MatchStage { kPrimary, kShortTermRetrieval, kSpawned };

struct FrameAssignment {
  int track_id = 0;
  std::size_t detection = 0;
  MatchStage stage = MatchStage::kPrimary;
};

struct FrameOutput {
  FrameIndex frame = 0;
  std::vector<FrameAssignment> assignments;  // in detection order
};

class Tracker {
 public:
  /// `fps` converts the per-class termination memory from seconds to frames.
  Tracker(TrackerConfig cfg, double fps) : cfg_(std::move(cfg)), fps_(fps) {
    if (!(fps > 0.0)) fail(ErrorCode::kRangeError, "tracker fps must be > 0");
  }

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Track>& tracks() const { return tracks_; }

  /// Frames after which an unmatched track of class `c` is terminated.
  int termination_frames(ClassId c) const { return seconds_to_frames(cfg_.n1_seconds[c], fps_); }

  FrameOutput step(FrameIndex frame, std::span<const Detection> dets) {
    if (last_frame_ && frame <= *last_frame_) {
      fail(ErrorCode::kOutOfOrderFrame, "frame " + std::to_string(frame) +
                                            " does not follow frame " +
                                            std::to_string(*last_frame_));
    }
    last_frame_ = frame;
    refresh_states(frame);

    std::vector<Embedding> embeddings;
    embeddings.reserve(dets.size());
    for (const auto& d : dets) embeddings.push_back(embed(d));

    FrameOutput out{frame, {}};
    std::vector<int> det_owner(dets.size(), -1);  // index into tracks_
    std::vector<MatchStage> det_stage(dets.size(), MatchStage::kSpawned);

    // Primary association over tracks matched in the previous frame.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      if (tracks_[i].state == TrackState::kActive) active.push_back(i);
    }
    CostMatrix costs(active.size(), dets.size());
    for (std::size_t r = 0; r < active.size(); ++r) {
      for (std::size_t c = 0; c < dets.size(); ++c) {
        costs(r, c) = assignment_cost(tracks_[active[r]], dets[c], embeddings[c]);
      }
    }
    for (const auto& [r, c] : solve_assignment(costs).pairs) {
      if (costs(r, c) > cfg_.gate_cost[tracks_[active[r]].class_id]) continue;
      det_owner[c] = static_cast<int>(active[r]);
      det_stage[c] = MatchStage::kPrimary;
    }

    if (cfg_.enable_str) {
      std::vector<std::size_t> lost_idx;
      std::vector<const Track*> lost;
      for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (tracks_[i].state == TrackState::kLost) {
          lost_idx.push_back(i);
          lost.push_back(&tracks_[i]);
        }
      }
      std::vector<std::size_t> left_idx;
      std::vector<const Detection*> left;
      std::vector<const Embedding*> left_emb;
      for (std::size_t c = 0; c < dets.size(); ++c) {
        if (det_owner[c] >= 0) continue;
        left_idx.push_back(c);
        left.push_back(&dets[c]);
        left_emb.push_back(&embeddings[c]);
      }
      if (!lost.empty() && !left.empty()) {
        for (const auto& [r, c] : str_match(lost, left, left_emb, frame, cfg_).pairs) {
          det_owner[left_idx[c]] = static_cast<int>(lost_idx[r]);
          det_stage[left_idx[c]] = MatchStage::kShortTermRetrieval;
        }
      }
    }

    std::vector<char> matched(tracks_.size(), 0);
    for (std::size_t c = 0; c < dets.size(); ++c) {
      if (det_owner[c] >= 0) {
        Track& t = tracks_[static_cast<std::size_t>(det_owner[c])];
        append(t, frame, dets[c], embeddings[c]);
        matched[static_cast<std::size_t>(det_owner[c])] = 1;
        out.assignments.push_back({t.id, c, det_stage[c]});
      } else {
        Track& t = spawn(frame, dets[c], embeddings[c]);
        out.assignments.push_back({t.id, c, MatchStage::kSpawned});
      }
    }

    for (std::size_t i = 0; i < matched.size(); ++i) {
      Track& t = tracks_[i];
      if (matched[i] || t.state == TrackState::kTerminated) continue;
      t.state = (frame - t.last_matched_frame() > termination_frames(t.class_id))
                    ? TrackState::kTerminated
                    : TrackState::kLost;
    }
    return out;
  }

  /// Every track ever created, as tracklets in creation order.
  std::vector<Tracklet> tracklets() const {
    return std::vector<Tracklet>(tracks_.begin(), tracks_.end());
  }

 private:
  void refresh_states(FrameIndex frame) {
    for (Track& t : tracks_) {
      if (t.state == TrackState::kTerminated) continue;
      const FrameIndex missed = frame - 1 - t.last_matched_frame();
      if (missed > termination_frames(t.class_id)) {
        t.state = TrackState::kTerminated;
      } else {
        t.state = missed == 0 ? TrackState::kActive : TrackState::kLost;
      }
    }
  }

  void append(Track& t, FrameIndex frame, const Detection& det, const Embedding& emb) {
    t.observations.push_back({frame, det.box, det.mask, det.score});
    t.bank.push(frame, emb);
    t.state = TrackState::kActive;
  }

  Track& spawn(FrameIndex frame, const Detection& det, const Embedding& emb) {
    int& serial = next_serial_[det.class_id];
    if (serial > 999) {
      fail(ErrorCode::kRangeError,
           "more than 999 tracks of class " + std::string(class_name(det.class_id)));
    }
    Track t;
    t.id = static_cast<int>(det.class_id) * 1000 + serial++;
    t.class_id = det.class_id;
    t.bank = FeatureBank(static_cast<std::size_t>(cfg_.bank_size));
    tracks_.push_back(std::move(t));
    append(tracks_.back(), frame, det, emb);
    return tracks_.back();
  }

  TrackerConfig cfg_;
  double fps_;
  std::vector<Track> tracks_;
  PerClass<int> next_serial_{1, 1};
  std::optional<FrameIndex> last_frame_;
};

}  // namespace motseg
