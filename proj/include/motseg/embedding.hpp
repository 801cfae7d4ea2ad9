#pragma once

// Mask-aware embeddings: spatial attention from the instance mask,
// attention-weighted pooling of ROI feature maps, and per-track feature banks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "motseg/error.hpp"
#include "motseg/mask.hpp"

namespace motseg {

using FrameIndex = std::int64_t;

inline constexpr int kDefaultChannels = 1024;
inline constexpr int kDefaultGridSize = 7;
inline constexpr double kForegroundWeight = 1.0;
inline constexpr double kBackgroundWeight = 0.5;

/// ROI feature map aligned with a detection box, laid out row-major as
/// (row, col, channel).
struct FeatureMap {
  int grid_h = 0;
  int grid_w = 0;
  int channels = 0;
  std::vector<double> values;

  double at(int row, int col, int channel) const {
    return values[(static_cast<std::size_t>(row) * grid_w + col) * channels + channel];
  }

  void validate() const {
    if (grid_h <= 0 || grid_w <= 0 || channels <= 0) {
      fail(ErrorCode::kInvalidArgument, "feature map dimensions must be positive");
    }
    if (values.size() != static_cast<std::size_t>(grid_h) * grid_w * channels) {
      fail(ErrorCode::kShapeMismatch, "feature map holds " + std::to_string(values.size()) +
                                          " values, expected gh*gw*c");
    }
    for (double v : values) {
      if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "non-finite feature value");
    }
  }
};

struct Embedding {
  std::vector<double> values;
  // False for the zero vector, which has no direction to normalize.
  bool normalized = false;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

struct AttentionMap {
  int grid_h = 0;
  int grid_w = 0;
  std::vector<double> weights;  // row-major

  double at(int row, int col) const {
    return weights[static_cast<std::size_t>(row) * grid_w + col];
  }
};

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline Embedding l2_normalize(std::vector<double> values) {
  const double n = l2_norm(values);
  if (!(n > 0.0)) return {std::move(values), false};
  for (double& x : values) x /= n;
  return {std::move(values), true};
}

/// Samples the mask under `box` at the center of each grid cell (nearest
/// neighbour) and weights foreground cells 1.0, background cells 0.5.
inline AttentionMap spatial_attention(const BinaryMask& mask, const BBox& box, int grid_h,
                                      int grid_w) {
  if (grid_h <= 0 || grid_w <= 0) {
    fail(ErrorCode::kInvalidArgument, "attention grid dimensions must be positive");
  }
  if (box.degenerate()) fail(ErrorCode::kEmptyBox, "detection box has zero area");

  // Prefix run starts once, then binary search per sample.
  std::vector<std::uint64_t> ends;
  ends.reserve(mask.counts().size());
  std::uint64_t acc = 0;
  for (std::uint64_t c : mask.counts()) ends.push_back(acc += c);
  auto foreground = [&](int row, int col) {
    if (row < 0 || col < 0 || row >= mask.height() || col >= mask.width()) return false;
    const std::uint64_t idx = static_cast<std::uint64_t>(col) * mask.height() + row;
    const auto it = std::upper_bound(ends.begin(), ends.end(), idx);
    return (it - ends.begin()) % 2 == 1;
  };

  AttentionMap attn{grid_h, grid_w, {}};
  attn.weights.reserve(static_cast<std::size_t>(grid_h) * grid_w);
  for (int i = 0; i < grid_h; ++i) {
    const int row = static_cast<int>(std::floor(box.y + (i + 0.5) * box.h / grid_h));
    for (int j = 0; j < grid_w; ++j) {
      const int col = static_cast<int>(std::floor(box.x + (j + 0.5) * box.w / grid_w));
      attn.weights.push_back(foreground(row, col) ? kForegroundWeight : kBackgroundWeight);
    }
  }
  return attn;
}

/// Per-channel attention-weighted mean of the feature map, before
/// normalization.
inline std::vector<double> attention_weighted_mean(const FeatureMap& fmap,
                                                   const AttentionMap& attn) {
  if (fmap.grid_h != attn.grid_h || fmap.grid_w != attn.grid_w) {
    fail(ErrorCode::kShapeMismatch, "feature map grid " + std::to_string(fmap.grid_h) + "x" +
                                        std::to_string(fmap.grid_w) + " vs attention " +
                                        std::to_string(attn.grid_h) + "x" +
                                        std::to_string(attn.grid_w));
  }
  std::vector<double> out(static_cast<std::size_t>(fmap.channels), 0.0);
  double total = 0.0;
  for (int i = 0; i < fmap.grid_h; ++i) {
    for (int j = 0; j < fmap.grid_w; ++j) {
      const double w = attn.at(i, j);
      total += w;
      for (int c = 0; c < fmap.channels; ++c) out[c] += w * fmap.at(i, j, c);
    }
  }
  for (double& x : out) x /= total;
  return out;
}

inline Embedding instance_aware_pool(const FeatureMap& fmap, const AttentionMap& attn) {
  return l2_normalize(attention_weighted_mean(fmap, attn));
}

/// Cosine similarity clamped to [-1, 1]; 0 when either side is the zero
/// vector.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kDimensionMismatch,
         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double cosine_similarity(const Embedding& a, const Embedding& b) {
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

struct BankEntry {
  FrameIndex frame = 0;
  Embedding embedding;
};

/// Embeddings of a track's first `capacity` and most recent `capacity`
/// matched frames, kept separate. Short tracks hold the same entries in both
/// halves.
class FeatureBank {
 public:
  static constexpr std::size_t kDefaultCapacity = 5;

  explicit FeatureBank(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {
    if (capacity == 0) fail(ErrorCode::kInvalidArgument, "bank capacity must be positive");
  }

  std::size_t capacity() const { return capacity_; }
  const std::vector<BankEntry>& head() const { return head_; }
  const std::vector<BankEntry>& tail() const { return tail_; }
  bool empty() const { return tail_.empty(); }

  void push(FrameIndex frame, Embedding embedding) {
    if (!tail_.empty() && frame <= tail_.back().frame) {
      fail(ErrorCode::kNonMonotonicFrame, "bank update at frame " + std::to_string(frame) +
                                              " after frame " +
                                              std::to_string(tail_.back().frame));
    }
    if (head_.size() < capacity_) head_.push_back({frame, embedding});
    tail_.push_back({frame, std::move(embedding)});
    if (tail_.size() > capacity_) tail_.erase(tail_.begin());
  }

  /// Distinct entries in frame order (head and tail may share frames).
  std::vector<BankEntry> entries() const {
    std::vector<BankEntry> out = head_;
    for (const auto& e : tail_) {
      if (out.empty() || e.frame > out.back().frame) out.push_back(e);
    }
    return out;
  }

  /// Bank of a track formed by appending `later` after `earlier`.
  static FeatureBank concatenate(const FeatureBank& earlier, const FeatureBank& later) {
    FeatureBank out(earlier.capacity_);
    for (const auto& e : earlier.entries()) out.push(e.frame, e.embedding);
    for (const auto& e : later.entries()) out.push(e.frame, e.embedding);
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<BankEntry> head_;
  std::vector<BankEntry> tail_;
};

inline FeatureBank bank_update(FeatureBank bank, Embedding embedding, FrameIndex frame) {
  bank.push(frame, std::move(embedding));
  return bank;
}

/// Pairwise maximum of cosine similarity between the query and every entry.
inline double bank_similarity(const FeatureBank& bank, const Embedding& query) {
  if (bank.empty()) fail(ErrorCode::kEmptyBank, "similarity against an empty feature bank");
  double best = -1.0;
  for (const auto& e : bank.head()) best = std::max(best, cosine_similarity(e.embedding, query));
  for (const auto& e : bank.tail()) best = std::max(best, cosine_similarity(e.embedding, query));
  return best;
}

/// Maximum pairwise similarity between two banks.
inline double bank_similarity(const FeatureBank& a, const FeatureBank& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::kEmptyBank, "similarity against an empty feature bank");
  double best = -1.0;
  for (const auto& e : b.entries()) best = std::max(best, bank_similarity(a, e.embedding));
  return best;
}

}  // namespace motseg
