#pragma once

// Run-length encoded binary masks in the MOTS / COCO layout: column-major
// pixel order, runs alternating background-first.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "motseg/error.hpp"

namespace motseg {

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  bool degenerate() const { return !(w > 0.0) || !(h > 0.0); }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline double bbox_iou(const BBox& a, const BBox& b) {
  if (a.degenerate() || b.degenerate()) return 0.0;
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

/// Dense binary image stored column-major, the same order RLE runs walk.
class PixelGrid {
 public:
  PixelGrid(int height, int width, std::uint8_t fill = 0)
      : height_(height), width_(width) {
    if (height <= 0 || width <= 0) {
      fail(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
  }

  int height() const { return height_; }
  int width() const { return width_; }

  std::uint8_t operator()(int row, int col) const { return data_[index(row, col)]; }
  void set(int row, int col, bool value) { data_[index(row, col)] = value ? 1 : 0; }

  std::span<const std::uint8_t> column_major() const { return data_; }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(col) * height_ + row;
  }

  int height_;
  int width_;
  std::vector<std::uint8_t> data_;
};

namespace detail {

// Accumulates (value, length) segments into canonical background-first counts.
class CountsBuilder {
 public:
  void push(bool value, std::uint64_t length) {
    if (length == 0) return;
    if (counts_.empty()) {
      if (value) counts_.push_back(0);
      counts_.push_back(length);
      value_ = value;
      return;
    }
    if (value == value_) {
      counts_.back() += length;
    } else {
      counts_.push_back(length);
      value_ = value;
    }
  }

  std::vector<std::uint64_t> take() { return std::move(counts_); }

 private:
  std::vector<std::uint64_t> counts_;
  bool value_ = false;
};

}  // namespace detail

/// Immutable RLE mask. Counts are always held in canonical form: the first
/// run is background (possibly empty) and no later run has zero length.
class BinaryMask {
 public:
  BinaryMask(int height, int width, std::vector<std::uint64_t> counts)
      : height_(height), width_(width) {
    if (height <= 0 || width <= 0) {
      fail(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
    }
    std::uint64_t sum = 0;
    detail::CountsBuilder builder;
    bool value = false;
    for (std::uint64_t c : counts) {
      sum += c;
      builder.push(value, c);
      value = !value;
    }
    if (sum != pixel_count()) {
      fail(ErrorCode::kCountsSumMismatch,
           "sum(counts)=" + std::to_string(sum) + " but h*w=" +
               std::to_string(pixel_count()));
    }
    counts_ = builder.take();
  }

  /// Validating entry point for counts coming from untrusted sources.
  static BinaryMask from_counts(int height, int width,
                                std::span<const std::int64_t> counts) {
    std::vector<std::uint64_t> runs;
    runs.reserve(counts.size());
    for (std::int64_t c : counts) {
      if (c < 0) fail(ErrorCode::kNegativeRun, "negative run length " + std::to_string(c));
      runs.push_back(static_cast<std::uint64_t>(c));
    }
    return BinaryMask(height, width, std::move(runs));
  }

  static BinaryMask empty(int height, int width) {
    return BinaryMask(height, width,
                      {static_cast<std::uint64_t>(height) * static_cast<std::uint64_t>(width)});
  }

  static BinaryMask full(int height, int width) {
    return BinaryMask(height, width,
                      {0, static_cast<std::uint64_t>(height) * static_cast<std::uint64_t>(width)});
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::uint64_t pixel_count() const {
    return static_cast<std::uint64_t>(height_) * static_cast<std::uint64_t>(width_);
  }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  std::uint64_t area() const {
    std::uint64_t a = 0;
    for (std::size_t i = 1; i < counts_.size(); i += 2) a += counts_[i];
    return a;
  }
  bool is_empty() const { return area() == 0; }

  /// Pixel lookup by run scan; out-of-image coordinates read as background.
  bool contains(int row, int col) const {
    if (row < 0 || col < 0 || row >= height_ || col >= width_) return false;
    const std::uint64_t target = static_cast<std::uint64_t>(col) * height_ + row;
    std::uint64_t start = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      start += counts_[i];
      if (target < start) return (i % 2) == 1;
    }
    return false;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int height_;
  int width_;
  std::vector<std::uint64_t> counts_;
};

inline PixelGrid rle_decode(const BinaryMask& mask) {
  PixelGrid grid(mask.height(), mask.width());
  std::uint64_t pos = 0;
  bool value = false;
  for (std::uint64_t run : mask.counts()) {
    if (value) {
      for (std::uint64_t k = pos; k < pos + run; ++k) {
        grid.set(static_cast<int>(k % mask.height()), static_cast<int>(k / mask.height()), true);
      }
    }
    pos += run;
    value = !value;
  }
  return grid;
}

inline BinaryMask rle_encode(const PixelGrid& grid) {
  detail::CountsBuilder builder;
  for (std::uint8_t px : grid.column_major()) builder.push(px != 0, 1);
  return BinaryMask(grid.height(), grid.width(), builder.take());
}

/// COCO compressed RLE string: LEB128-like, 5 payload bits per character
/// offset by 48, bit 0x20 marks continuation. From the fourth count on, the
/// value stored is the difference to the count two positions earlier.
inline std::string rle_to_string(const BinaryMask& mask) {
  const auto& counts = mask.counts();
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t x = static_cast<std::int64_t>(counts[i]);
    if (i > 2) x -= static_cast<std::int64_t>(counts[i - 2]);
    bool more = true;
    while (more) {
      std::int64_t c = x & 0x1f;
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      out.push_back(static_cast<char>(c + 48));
    }
  }
  return out;
}

inline BinaryMask rle_from_string(std::string_view token, int height, int width) {
  std::vector<std::int64_t> counts;
  std::size_t k = 0;
  while (k < token.size()) {
    std::int64_t x = 0;
    int groups = 0;
    bool more = true;
    while (more) {
      if (k >= token.size()) fail(ErrorCode::kMalformedToken, "truncated continuation sequence");
      const int c = static_cast<unsigned char>(token[k]) - 48;
      if (c < 0 || c > 0x3f) {
        fail(ErrorCode::kMalformedToken,
             "character outside RLE alphabet at offset " + std::to_string(k));
      }
      if (groups >= 12) fail(ErrorCode::kMalformedToken, "run value overflows 60 bits");
      x |= static_cast<std::int64_t>(c & 0x1f) << (5 * groups);
      more = (c & 0x20) != 0;
      ++k;
      ++groups;
      if (!more && (c & 0x10)) x |= ~((std::int64_t{1} << (5 * groups)) - 1);
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    counts.push_back(x);
  }
  return BinaryMask::from_counts(height, width, counts);
}

namespace detail {

// Walks the aligned run boundaries of two same-shape masks, calling
// fn(a_value, b_value, length) for each maximal common segment.
template <class Fn>
void walk_runs(const BinaryMask& a, const BinaryMask& b, Fn&& fn) {
  if (a.height() != b.height() || a.width() != b.width()) {
    fail(ErrorCode::kShapeMismatch,
         std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
             std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
  const auto& ca = a.counts();
  const auto& cb = b.counts();
  std::size_t ia = 0, ib = 0;
  std::uint64_t ra = ca[0], rb = cb[0];
  bool va = false, vb = false;
  auto advance = [](const std::vector<std::uint64_t>& c, std::size_t& i, std::uint64_t& r,
                    bool& v) {
    while (r == 0 && i + 1 < c.size()) {
      r = c[++i];
      v = !v;
    }
  };
  advance(ca, ia, ra, va);
  advance(cb, ib, rb, vb);
  while (ra > 0 && rb > 0) {
    const std::uint64_t len = std::min(ra, rb);
    fn(va, vb, len);
    ra -= len;
    rb -= len;
    advance(ca, ia, ra, va);
    advance(cb, ib, rb, vb);
  }
}

template <class Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, Op op) {
  CountsBuilder builder;
  walk_runs(a, b, [&](bool va, bool vb, std::uint64_t len) { builder.push(op(va, vb), len); });
  return BinaryMask(a.height(), a.width(), builder.take());
}

}  // namespace detail

inline BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  return detail::combine(a, b, [](bool x, bool y) { return x || y; });
}
inline BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  return detail::combine(a, b, [](bool x, bool y) { return x && y; });
}
inline BinaryMask mask_difference(const BinaryMask& a, const BinaryMask& b) {
  return detail::combine(a, b, [](bool x, bool y) { return x && !y; });
}

struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t uni = 0;
};

inline OverlapCounts mask_overlap(const BinaryMask& a, const BinaryMask& b) {
  OverlapCounts out;
  detail::walk_runs(a, b, [&](bool va, bool vb, std::uint64_t len) {
    if (va || vb) out.uni += len;
    if (va && vb) out.intersection += len;
  });
  return out;
}

/// |a ∩ b| / |a ∪ b| over runs; an empty union yields 0.
inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  const OverlapCounts o = mask_overlap(a, b);
  if (o.uni == 0) return 0.0;
  return static_cast<double>(o.intersection) / static_cast<double>(o.uni);
}

struct MaskExtent {
  BBox box;
  bool empty = true;
};

inline MaskExtent mask_to_bbox(const BinaryMask& mask) {
  const std::uint64_t h = static_cast<std::uint64_t>(mask.height());
  std::uint64_t pos = 0;
  std::uint64_t min_row = h, max_row = 0, min_col = UINT64_MAX, max_col = 0;
  bool any = false;
  const auto& counts = mask.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::uint64_t run = counts[i];
    if (i % 2 == 1 && run > 0) {
      const std::uint64_t first = pos, last = pos + run - 1;
      const std::uint64_t c0 = first / h, c1 = last / h;
      any = true;
      min_col = std::min(min_col, c0);
      max_col = std::max(max_col, c1);
      if (c0 == c1) {
        min_row = std::min(min_row, first % h);
        max_row = std::max(max_row, last % h);
      } else {
        // Crossing a column boundary reaches both the last row of one column
        // and the first row of the next.
        min_row = 0;
        max_row = h - 1;
      }
    }
    pos += run;
  }
  if (!any) return {};
  return {BBox{static_cast<double>(min_col), static_cast<double>(min_row),
               static_cast<double>(max_col - min_col + 1),
               static_cast<double>(max_row - min_row + 1)},
          false};
}

/// Axis-aligned rectangle mask; the rectangle is clipped to the image.
inline BinaryMask rect_mask(int height, int width, int x, int y, int rect_w, int rect_h) {
  const int x0 = std::clamp(x, 0, width), x1 = std::clamp(x + rect_w, 0, width);
  const int y0 = std::clamp(y, 0, height), y1 = std::clamp(y + rect_h, 0, height);
  detail::CountsBuilder builder;
  if (x0 >= x1 || y0 >= y1) {
    builder.push(false, static_cast<std::uint64_t>(height) * width);
    return BinaryMask(height, width, builder.take());
  }
  builder.push(false, static_cast<std::uint64_t>(x0) * height);
  for (int c = x0; c < x1; ++c) {
    builder.push(false, static_cast<std::uint64_t>(y0));
    builder.push(true, static_cast<std::uint64_t>(y1 - y0));
    builder.push(false, static_cast<std::uint64_t>(height - y1));
  }
  builder.push(false, static_cast<std::uint64_t>(width - x1) * height);
  return BinaryMask(height, width, builder.take());
}

inline BinaryMask rect_mask(int height, int width, const BBox& box) {
  const int x0 = static_cast<int>(std::lround(box.x));
  const int y0 = static_cast<int>(std::lround(box.y));
  const int x1 = static_cast<int>(std::lround(box.x + box.w));
  const int y1 = static_cast<int>(std::lround(box.y + box.h));
  return rect_mask(height, width, x0, y0, x1 - x0, y1 - y0);
}

}  // namespace motseg
