#pragma once

// MOTS accuracy metrics. Per frame and class, a hypothesis mask matches a
// ground-truth mask when their IOU exceeds 0.5; since both sides are
// pairwise disjoint such matches are unique.

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "motseg/config.hpp"
#include "motseg/error.hpp"
#include "motseg/io.hpp"
#include "motseg/mask.hpp"

namespace motseg {

inline constexpr double kMatchIou = 0.5;

struct ClassMetrics {
  std::size_t gt = 0;  // ground-truth masks
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ids = 0;
  double soft_tp = 0.0;  // sum of IOU over true positives

  // With no ground truth the score is 1 when nothing was hypothesised and 0
  // otherwise.
  double motsa() const {
    if (gt == 0) return fp == 0 ? 1.0 : 0.0;
    return (static_cast<double>(tp) - static_cast<double>(fp) - static_cast<double>(ids)) /
           static_cast<double>(gt);
  }
  double smotsa() const {
    if (gt == 0) return fp == 0 ? 1.0 : 0.0;
    return (soft_tp - static_cast<double>(fp) - static_cast<double>(ids)) / static_cast<double>(gt);
  }

  ClassMetrics& operator+=(const ClassMetrics& o) {
    gt += o.gt;
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    ids += o.ids;
    soft_tp += o.soft_tp;
    return *this;
  }

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct EvalReport {
  PerClass<ClassMetrics> per_class;
  ClassMetrics total;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

namespace detail {

struct DecodedRecord {
  const ResultRecord* record;
  BinaryMask mask;
};

inline std::map<FrameIndex, std::vector<DecodedRecord>> decode_by_frame(
    std::span<const ResultRecord> records, int& img_h, int& img_w, const char* side) {
  std::map<FrameIndex, std::vector<DecodedRecord>> out;
  for (const auto& r : records) {
    if (img_h == 0) {
      img_h = r.img_h;
      img_w = r.img_w;
    } else if (r.img_h != img_h || r.img_w != img_w) {
      fail(ErrorCode::kDimMismatch, std::string(side) + " frame " + std::to_string(r.frame) + " is " +
                                        std::to_string(r.img_h) + "x" + std::to_string(r.img_w) +
                                        ", expected " + std::to_string(img_h) + "x" + std::to_string(img_w));
    }
    out[r.frame].push_back({&r, r.mask()});
  }
  for (const auto& [frame, recs] : out) {
    BinaryMask seen = BinaryMask::empty(img_h, img_w);
    for (const auto& d : recs) {
      if (mask_overlap(seen, d.mask).intersection != 0) {
        fail(ErrorCode::kOverlappingMasksInInput,
             std::string(side) + " frame " + std::to_string(frame) + " track " +
                 std::to_string(d.record->track_id));
      }
      seen = mask_union(seen, d.mask);
    }
  }
  return out;
}

}  // namespace detail

inline EvalReport evaluate(std::span<const ResultRecord> results,
                           std::span<const ResultRecord> ground_truth) {
  int img_h = 0, img_w = 0;
  const auto gt_frames = detail::decode_by_frame(ground_truth, img_h, img_w, "ground truth");
  const auto hyp_frames = detail::decode_by_frame(results, img_h, img_w, "results");

  EvalReport report;
  std::map<int, int> last_hyp_for_gt;
  std::vector<FrameIndex> frames;
  for (const auto& [f, _] : gt_frames) frames.push_back(f);
  for (const auto& [f, _] : hyp_frames) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

  static const std::vector<detail::DecodedRecord> kNone;
  for (FrameIndex f : frames) {
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const auto& gts = git == gt_frames.end() ? kNone : git->second;
    const auto& hyps = hit == hyp_frames.end() ? kNone : hit->second;
    std::vector<char> hyp_used(hyps.size(), 0);

    for (const auto& g : gts) {
      const auto cls = *class_from_int(g.record->class_id);
      ClassMetrics& m = report.per_class[cls];
      ++m.gt;
      std::ptrdiff_t match = -1;
      double match_iou = 0.0;
      for (std::size_t h = 0; h < hyps.size(); ++h) {
        if (hyps[h].record->class_id != g.record->class_id) continue;
        const double iou = mask_iou(g.mask, hyps[h].mask);
        if (iou <= kMatchIou) continue;
        if (match >= 0 || hyp_used[h]) {
          throw std::logic_error("non-unique IOU>0.5 match despite disjoint masks");
        }
        match = static_cast<std::ptrdiff_t>(h);
        match_iou = iou;
      }
      if (match < 0) {
        ++m.fn;
        continue;
      }
      hyp_used[static_cast<std::size_t>(match)] = 1;
      ++m.tp;
      m.soft_tp += match_iou;
      const int hyp_id = hyps[static_cast<std::size_t>(match)].record->track_id;
      const auto prev = last_hyp_for_gt.find(g.record->track_id);
      if (prev != last_hyp_for_gt.end() && prev->second != hyp_id) ++m.ids;
      last_hyp_for_gt[g.record->track_id] = hyp_id;
    }
    for (std::size_t h = 0; h < hyps.size(); ++h) {
      if (!hyp_used[h]) ++report.per_class[*class_from_int(hyps[h].record->class_id)].fp;
    }
  }
  for (ClassId c : kAllClasses) report.total += report.per_class[c];
  return report;
}

inline void print_report(const EvalReport& r, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-11s %7s %7s %7s %7s %5s %8s %8s\n", "class", "GT", "TP", "FP",
                "FN", "IDS", "MOTSA", "sMOTSA");
  out << line;
  auto row = [&](std::string_view name, const ClassMetrics& m) {
    std::snprintf(line, sizeof(line), "%-11.*s %7zu %7zu %7zu %7zu %5zu %8.4f %8.4f\n",
                  static_cast<int>(name.size()), name.data(), m.gt, m.tp, m.fp, m.fn, m.ids, m.motsa(),
                  m.smotsa());
    out << line;
  };
  for (ClassId c : kAllClasses) {
    const auto& m = r.per_class[c];
    if (m.gt == 0 && m.tp == 0 && m.fp == 0) continue;
    row(class_name(c), m);
  }
  row("total", r.total);
}

}  // namespace motseg
