#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace motseg;

namespace {

Tracklet make(int id, std::vector<std::pair<FrameIndex, std::pair<double, double>>> pts,
              std::vector<double> emb, double w = 10, double h = 20) {
  Tracklet t;
  t.id = id;
  t.class_id = ClassId::kPedestrian;
  for (auto [f, p] : pts) {
    t.observations.push_back(oracle::obs(f, p.first, p.second, w, h));
    t.bank.push(f, oracle::unit(emb));
  }
  return t;
}

Tracklet linear(int id, FrameIndex first, FrameIndex last, double x0, double vx, std::vector<double> emb,
                double y = 10) {
  std::vector<std::pair<FrameIndex, std::pair<double, double>>> pts;
  for (FrameIndex f = first; f <= last; ++f) pts.push_back({f, {x0 + vx * (f - first), y}});
  return make(id, pts, std::move(emb));
}

ReidParams params(CameraMode mode) {
  return {ReidConfig{}, mode, 30.0, 4.0, 10};
}

}  // namespace

TEST(MotionVectorTest, Examples) {
  EXPECT_EQ(motion_vector(make(1, {{1, {0, 0}}, {2, {1, 0}}, {3, {2, 0}}, {4, {3, 0}}, {5, {4, 0}}}, {1}),
                          TrackletEnd::kTail, 5).mx,
            1.0);
  const MotionVector still = motion_vector(linear(1, 1, 6, 3, 0, {1}), TrackletEnd::kHead, 5);
  EXPECT_EQ(still.mx, 0.0);
  EXPECT_EQ(still.my, 0.0);
  const MotionVector m =
      motion_vector(make(1, {{1, {0, 0}}, {2, {5, 2}}, {3, {6, 3}}, {4, {7, 4}}, {5, {8, 4}}}, {1}),
                    TrackletEnd::kTail, 5);
  EXPECT_EQ(m.mx, 2.0);
  EXPECT_EQ(m.my, 1.0);
  EXPECT_TRUE(motion_vector(make(1, {{1, {0, 0}}}, {1}), TrackletEnd::kTail, 5).low_confidence);
}

TEST(MotionVectorTest, WindowsPickTheRightEnd) {
  // Slow start, fast finish.
  Tracklet t = make(1, {{1, {0, 0}}, {2, {1, 0}}, {3, {2, 0}}, {4, {12, 0}}, {5, {22, 0}}}, {1});
  EXPECT_EQ(motion_vector(t, TrackletEnd::kHead, 3).mx, 1.0);
  EXPECT_EQ(motion_vector(t, TrackletEnd::kTail, 3).mx, 10.0);
}

TEST(Candidates, Rules) {
  const auto p = params(CameraMode::kMoving);
  const int gap = p.gap_frames(ClassId::kPedestrian);
  ASSERT_EQ(gap, 30);
  std::vector<Tracklet> ts{linear(2001, 1, 17, 0, 1, {1, 0}), linear(2002, 17, 30, 20, 1, {1, 0})};
  EXPECT_TRUE(candidate_pairs(ts, p).empty());  // share frame 17

  ts = {linear(2001, 1, 10, 0, 1, {1, 0}), linear(2002, 10 + gap + 2, 60, 20, 1, {1, 0})};
  EXPECT_TRUE(candidate_pairs(ts, p).empty());  // gap + 1 missing frames
  ts[1] = linear(2002, 10 + gap + 1, 60, 20, 1, {1, 0});
  EXPECT_EQ(candidate_pairs(ts, p).size(), 1u);  // exactly gap missing frames

  ts = {linear(2001, 1, 10, 0, 1, {1, 0}), linear(2002, 14, 20, 20, 1, {1, 0})};
  const auto c = candidate_pairs(ts, p);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].u, 0u);
  EXPECT_EQ(c[0].v, 1u);
  EXPECT_DOUBLE_EQ(c[0].similarity, 1.0);

  ts[1] = linear(2002, 14, 20, 20, 1, {0, 1});
  EXPECT_TRUE(candidate_pairs(ts, p).empty());  // similarity 0 <= beta1
}

TEST(StaticTest, Examples) {
  const auto p = params(CameraMode::kStatic);
  EXPECT_TRUE(static_merge_test(linear(1, 1, 5, 30, 0, {1}), linear(2, 12, 20, 30, 0, {1}), p));
  EXPECT_FALSE(static_merge_test(linear(1, 1, 5, 30, 0, {1}), linear(2, 12, 20, 80, 0, {1}), p));
  // Adjacent tracklets compare boxes directly.
  EXPECT_DOUBLE_EQ(gap_extrapolation_iou(linear(1, 1, 5, 30, 0, {1}), linear(2, 6, 9, 35, 0, {1}), p),
                   1.0 / 3.0);
}

TEST(StaticTest, DriftingMeetsMidGap) {
  // u drifts +1 px/frame and stops at x=10 on frame 5; v is stationary at
  // x=16 from frame 11. Over gap frames 6..10 u's extrapolation sits at
  // 11..15, so IOU with v's box is (10-|x-16|)/(10+|x-16|) per frame.
  const auto p = params(CameraMode::kStatic);
  const Tracklet u = linear(1, 1, 5, 6, 1, {1});
  const Tracklet v = linear(2, 11, 20, 16, 0, {1});
  double expected = 0.0;
  for (int f = 6; f <= 10; ++f) {
    const double d = std::abs((10.0 + (f - 5)) - 16.0);
    expected += (10 - d) / (10 + d);
  }
  expected /= 5.0;
  EXPECT_NEAR(gap_extrapolation_iou(u, v, p), expected, 1e-9);
  EXPECT_GT(expected, 0.5);
  EXPECT_TRUE(static_merge_test(u, v, p));
}

TEST(MovingTest, Examples) {
  EXPECT_TRUE(moving_merge_test({1, 0}, {1, 0}, 0.8));
  EXPECT_FALSE(moving_merge_test({1, 0}, {-1, 0}, 0.8));
  EXPECT_FALSE(moving_merge_test({1, 0}, {1, 1}, 0.8));
  EXPECT_TRUE(moving_merge_test({1, 0}, {1, 1}, 0.7));
  EXPECT_FALSE(moving_merge_test({0, 0}, {1, 0}, 0.1));
  // beta3 below zero still demands a positive cosine.
  EXPECT_FALSE(moving_merge_test({1, 0}, {-1, 0.01}, -0.5));
}

TEST(MovingTest, TelescopingAndScaling) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 100; ++i) {
    Tracklet t;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int f = 1; f <= n; ++f) t.observations.push_back(oracle::obs(f, std::round(u(rng)), std::round(u(rng))));
    const MotionVector m = motion_vector(t, TrackletEnd::kTail, n);
    const auto& first = t.observations.front().box;
    const auto& last = t.observations.back().box;
    EXPECT_EQ(m.mx, (last.x - first.x) / (n - 1));
    EXPECT_EQ(m.my, (last.y - first.y) / (n - 1));
    const MotionVector a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double s = std::exp2(static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(moving_merge_test(a, b, 0.3), moving_merge_test({a.mx * s, a.my * s}, {b.mx * s, b.my * s}, 0.3));
  }
}

TEST(MergePass, SplitObjectJoins) {
  const auto p = params(CameraMode::kMoving);
  std::vector<Tracklet> ts{linear(2001, 1, 20, 0, 2, {1, 0}), linear(2002, 36, 60, 70, 2, {1, 0})};
  const auto out = merge_pass(ts, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 2001);
  EXPECT_EQ(out[0].length(), 45u);
}

TEST(MergePass, DistinctStationaryObjectsStay) {
  const auto p = params(CameraMode::kStatic);
  std::vector<Tracklet> ts{linear(2001, 1, 20, 0, 0, {1, 0}), linear(2002, 25, 40, 120, 0, {1, 0})};
  const auto out = merge_pass(ts, p);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, 2001);
  EXPECT_EQ(out[1].id, 2002);
}

TEST(MergePass, ChainOfThree) {
  const auto p = params(CameraMode::kMoving);
  std::vector<Tracklet> ts{linear(2003, 41, 60, 80, 2, {1, 0}), linear(2001, 1, 15, 0, 2, {1, 0}),
                           linear(2002, 21, 35, 40, 2, {1, 0})};
  const auto out = merge_pass(ts, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 2001);
  EXPECT_EQ(out[0].length(), 50u);
  for (std::size_t k = 1; k < out[0].length(); ++k) {
    EXPECT_LT(out[0].observations[k - 1].frame, out[0].observations[k].frame);
  }
}

TEST(MergePass, ConservesObservationsAndNeverGrows) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Tracklet> ts;
    std::size_t total = 0;
    for (int k = 0; k < 6; ++k) {
      const FrameIndex first = 1 + static_cast<FrameIndex>(rng() % 60);
      const FrameIndex last = first + 2 + static_cast<FrameIndex>(rng() % 20);
      ts.push_back(linear(2001 + k, first, last, double(rng() % 100), double(rng() % 3) - 1.0,
                          {1.0, double(rng() % 2) * 0.3}));
      total += ts.back().length();
    }
    for (CameraMode mode : {CameraMode::kStatic, CameraMode::kMoving}) {
      const auto out = merge_pass(ts, params(mode));
      EXPECT_LE(out.size(), ts.size());
      std::size_t sum = 0;
      for (const auto& t : out) {
        sum += t.length();
        for (std::size_t k = 1; k < t.length(); ++k) ASSERT_LT(t.observations[k - 1].frame, t.observations[k].frame);
      }
      EXPECT_EQ(sum, total);
      EXPECT_EQ(out.size(), merge_pass(ts, params(mode)).size());
    }
  }
}
