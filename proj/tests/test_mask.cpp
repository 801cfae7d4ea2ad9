#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace motseg;

namespace {

PixelGrid grid_of(int h, int w, std::initializer_list<std::pair<int, int>> on) {
  PixelGrid g(h, w);
  for (auto [r, c] : on) g.set(r, c, true);
  return g;
}

}  // namespace

TEST(RleDecode, AllBackground) {
  EXPECT_EQ(rle_decode(BinaryMask(2, 2, {4})), PixelGrid(2, 2, 0));
}

TEST(RleDecode, AllForeground) {
  EXPECT_EQ(rle_decode(BinaryMask(2, 2, {0, 4})), PixelGrid(2, 2, 1));
}

TEST(RleDecode, SinglePixelColumnMajor) {
  EXPECT_EQ(rle_decode(BinaryMask(2, 2, {0, 1, 3})), grid_of(2, 2, {{0, 0}}));
  // Second run position is (row 1, col 0) in column-major order.
  EXPECT_EQ(rle_decode(BinaryMask(2, 2, {1, 1, 2})), grid_of(2, 2, {{1, 0}}));
}

TEST(RleDecode, RejectsBadCounts) {
  try {
    BinaryMask(2, 2, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCountsSumMismatch);
  }
  const std::vector<std::int64_t> neg{5, -1};
  try {
    BinaryMask::from_counts(2, 2, neg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeRun);
  }
}

TEST(RleEncode, Canonical) {
  EXPECT_EQ(rle_encode(PixelGrid(3, 3, 0)).counts(), (std::vector<std::uint64_t>{9}));
  EXPECT_EQ(rle_encode(PixelGrid(3, 3, 1)).counts(), (std::vector<std::uint64_t>{0, 9}));
  EXPECT_EQ(rle_encode(grid_of(2, 2, {{0, 0}})).counts(), (std::vector<std::uint64_t>{0, 1, 3}));
  // Zero-length interior runs merge their neighbours.
  EXPECT_EQ(BinaryMask(2, 2, {1, 0, 1, 2}).counts(), (std::vector<std::uint64_t>{2, 2}));
}

TEST(RleString, HandTracedTokens) {
  EXPECT_EQ(rle_to_string(BinaryMask(2, 2, {4})), "4");
  EXPECT_EQ(rle_to_string(BinaryMask(2, 2, {0, 1, 3})), "013");
  EXPECT_EQ(rle_to_string(BinaryMask(3, 6, {5, 10, 3})), "5:3");  // third count stored as is
  EXPECT_EQ(rle_to_string(BinaryMask(4, 5, {5, 10, 3, 2})), "5:3H");  // delta 2-10 = -8
  EXPECT_EQ(rle_to_string(BinaryMask(10, 10, {100})), "T3");     // 100 = 4 + 3*32
}

TEST(RleString, RoundTripSmall) {
  for (const auto& m : {BinaryMask(2, 2, {4}), BinaryMask(2, 2, {0, 1, 3}), BinaryMask(2, 2, {0, 4})}) {
    EXPECT_EQ(rle_from_string(rle_to_string(m), 2, 2), m);
  }
}

TEST(RleString, MalformedTokens) {
  auto code_of = [](std::string_view tok, int h, int w) {
    try {
      rle_from_string(tok, h, w);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code_of("T", 10, 10), ErrorCode::kMalformedToken);  // continuation never ends
  EXPECT_EQ(code_of("4 ", 2, 2), ErrorCode::kMalformedToken);
  EXPECT_EQ(code_of("5", 2, 2), ErrorCode::kCountsSumMismatch);
}

TEST(RleString, RandomAgainstReferenceReader) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int i = 0; i < 300; ++i) {
    const int h = dim(rng), w = dim(rng);
    const BinaryMask m = rle_encode(oracle::random_grid(rng, h, w));
    const std::string tok = rle_to_string(m);
    const auto ref = oracle::coco_string_to_counts(tok);
    ASSERT_EQ(ref.size(), m.counts().size());
    for (std::size_t k = 0; k < ref.size(); ++k) ASSERT_EQ(static_cast<std::uint64_t>(ref[k]), m.counts()[k]);
    ASSERT_EQ(rle_from_string(tok, h, w), m);
    ASSERT_EQ(rle_encode(rle_decode(m)), m);
  }
}

TEST(MaskIou, Examples) {
  const BinaryMask a = rle_encode(grid_of(2, 2, {{0, 0}, {0, 1}}));
  const BinaryMask b = rle_encode(grid_of(2, 2, {{0, 1}, {1, 1}}));
  EXPECT_DOUBLE_EQ(mask_iou(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(mask_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(mask_iou(rle_encode(grid_of(2, 2, {{0, 0}})), rle_encode(grid_of(2, 2, {{1, 1}}))), 0.0);
  EXPECT_DOUBLE_EQ(mask_iou(BinaryMask::empty(3, 3), BinaryMask::empty(3, 3)), 0.0);
  try {
    mask_iou(BinaryMask::empty(2, 3), BinaryMask::empty(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(MaskIou, RandomAgainstPixels) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int i = 0; i < 200; ++i) {
    const int h = dim(rng), w = dim(rng);
    const PixelGrid ga = oracle::random_grid(rng, h, w), gb = oracle::random_grid(rng, h, w);
    const BinaryMask a = rle_encode(ga), b = rle_encode(gb);
    ASSERT_NEAR(mask_iou(a, b), oracle::pixel_iou(ga, gb), 1e-12);
    ASSERT_DOUBLE_EQ(mask_iou(a, b), mask_iou(b, a));
    PixelGrid gu(h, w), gi(h, w), gd(h, w);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        gu.set(r, c, ga(r, c) || gb(r, c));
        gi.set(r, c, ga(r, c) && gb(r, c));
        gd.set(r, c, ga(r, c) && !gb(r, c));
      }
    }
    ASSERT_EQ(mask_union(a, b), rle_encode(gu));
    ASSERT_EQ(mask_intersection(a, b), rle_encode(gi));
    ASSERT_EQ(mask_difference(a, b), rle_encode(gd));
  }
}

TEST(BBoxIou, Examples) {
  EXPECT_DOUBLE_EQ(bbox_iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(bbox_iou({0, 0, 10, 10}, {20, 0, 10, 10}), 0.0);
  EXPECT_DOUBLE_EQ(bbox_iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(bbox_iou({0, 0, 0, 10}, {0, 0, 10, 10}), 0.0);
}

TEST(MaskToBBox, Examples) {
  EXPECT_EQ(mask_to_bbox(BinaryMask::full(4, 6)).box, (BBox{0, 0, 6, 4}));
  EXPECT_EQ(mask_to_bbox(rle_encode(grid_of(4, 6, {{2, 3}}))).box, (BBox{3, 2, 1, 1}));
  const auto l_shape = rle_encode(grid_of(5, 5, {{1, 0}, {2, 0}, {3, 0}, {3, 1}, {3, 2}}));
  EXPECT_EQ(mask_to_bbox(l_shape).box, (BBox{0, 1, 3, 3}));
  const MaskExtent e = mask_to_bbox(BinaryMask::empty(3, 3));
  EXPECT_TRUE(e.empty);
  EXPECT_EQ(e.box, (BBox{0, 0, 0, 0}));
}

TEST(MaskToBBox, RandomAgainstPixels) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const PixelGrid g = oracle::random_grid(rng, 1 + static_cast<int>(rng() % 30), 1 + static_cast<int>(rng() % 30));
    int r0 = g.height(), r1 = -1, c0 = g.width(), c1 = -1;
    for (int r = 0; r < g.height(); ++r) {
      for (int c = 0; c < g.width(); ++c) {
        if (!g(r, c)) continue;
        r0 = std::min(r0, r), r1 = std::max(r1, r), c0 = std::min(c0, c), c1 = std::max(c1, c);
      }
    }
    const MaskExtent e = mask_to_bbox(rle_encode(g));
    ASSERT_EQ(e.empty, r1 < 0);
    if (r1 >= 0) {
      ASSERT_EQ(e.box, (BBox{double(c0), double(r0), double(c1 - c0 + 1), double(r1 - r0 + 1)}));
    }
  }
}

TEST(RectMask, ClipsToImage) {
  const BinaryMask m = rect_mask(10, 10, 8, 8, 5, 5);
  EXPECT_EQ(m.area(), 4u);
  EXPECT_TRUE(m.contains(9, 9));
  EXPECT_FALSE(m.contains(7, 8));
}
