#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace motseg;

namespace {

constexpr int kH = 100, kW = 200;

Detection det(FrameIndex f, BBox box, std::vector<double> emb, ClassId cls = ClassId::kPedestrian,
              double score = 0.9) {
  return {f, cls, score, box, rect_mask(kH, kW, box), Embedding{std::move(emb)}};
}

Track track_with(std::initializer_list<Observation> obs, std::vector<double> emb,
                 ClassId cls = ClassId::kPedestrian) {
  Track t;
  t.id = 2001;
  t.class_id = cls;
  for (const auto& o : obs) {
    t.observations.push_back(o);
    t.bank.push(o.frame, oracle::unit(emb));
  }
  return t;
}

TrackerConfig cfg() { return TrackerConfig{}; }

}  // namespace

TEST(AssignmentCost, Examples) {
  const BBox box{0, 0, 12, 24};
  Track t = track_with({oracle::obs(1, 0, 0, 12, 24)}, {1, 0});
  EXPECT_DOUBLE_EQ(assignment_cost(t, det(2, box, {1, 0}), oracle::unit({1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(assignment_cost(t, det(2, {50, 50, 12, 24}, {0, 1}), oracle::unit({0, 1})), 2.0);
  // Shift by a third of the width: 8*24 / (16*24) = 0.5.
  const Embedding e07 = oracle::unit({0.7, std::sqrt(1 - 0.49)});
  EXPECT_NEAR(assignment_cost(t, det(2, {4, 0, 12, 24}, e07.values), e07), 0.8, 1e-12);
  EXPECT_EQ(assignment_cost(t, det(2, box, {1, 0}, ClassId::kCar), oracle::unit({1, 0})), kInfeasible);
}

TEST(Extrapolate, Stationary) {
  const Track t = track_with({oracle::obs(1, 30, 40), oracle::obs(2, 30, 40), oracle::obs(3, 30, 40)}, {1});
  const auto e = extrapolate_track(t, 9, cfg());
  EXPECT_FALSE(e.fallback);
  EXPECT_NEAR(e.box.x, 30, 1e-9);
  EXPECT_NEAR(e.box.y, 40, 1e-9);
}

TEST(Extrapolate, LinearMotion) {
  Track t;
  for (int f = 1; f <= 5; ++f) t.observations.push_back(oracle::obs(f, 10 + 2 * f, 5));
  const auto e = extrapolate_track(t, 8, cfg());
  EXPECT_NEAR(e.box.x, 20 + 6, 1e-9);
  EXPECT_NEAR(e.box.y, 5, 1e-9);
  EXPECT_EQ(e.box.w, 10);
  EXPECT_EQ(e.box.h, 20);
}

TEST(Extrapolate, SingleObservationFallsBack) {
  const Track t = track_with({oracle::obs(4, 7, 8)}, {1});
  const auto e = extrapolate_track(t, 10, cfg());
  EXPECT_TRUE(e.fallback);
  EXPECT_EQ(e.box, t.observations.back().box);
}

TEST(ShortTermRetrieval, ExactMatchAndDistanceGate) {
  Track t;
  t.class_id = ClassId::kPedestrian;
  for (int f = 1; f <= 5; ++f) {
    t.observations.push_back(oracle::obs(f, 10 + 2 * f, 5));
    t.bank.push(f, oracle::unit({1, 0}));
  }
  const std::vector<const Track*> lost{&t};
  const Embedding same = oracle::unit({1, 0});
  const std::vector<const Embedding*> embs{&same};

  const Detection at = det(7, {24, 5, 10, 20}, {1, 0});
  const std::vector<const Detection*> d1{&at};
  EXPECT_EQ(str_match(lost, d1, embs, 7, cfg()).pairs.size(), 1u);

  const Detection far = det(7, {24 + 30, 5, 10, 20}, {1, 0});
  const std::vector<const Detection*> d2{&far};
  EXPECT_EQ(str_costs(lost, d2, embs, 7, cfg())(0, 0), kInfeasible);
  EXPECT_TRUE(str_match(lost, d2, embs, 7, cfg()).pairs.empty());
}

TEST(ShortTermRetrieval, HigherSimilarityWins) {
  Track a, b;
  for (Track* t : {&a, &b}) t->class_id = ClassId::kPedestrian;
  for (int f = 1; f <= 3; ++f) {
    a.observations.push_back(oracle::obs(f, 40, 5));
    b.observations.push_back(oracle::obs(f, 60, 5));
    a.bank.push(f, oracle::unit({0.6, 0.8}));
    b.bank.push(f, oracle::unit({0.9, std::sqrt(1 - 0.81)}));
  }
  const Detection d = det(5, {50, 5, 10, 20}, {1, 0});
  const Embedding e = oracle::unit({1, 0});
  const std::vector<const Track*> lost{&a, &b};
  const std::vector<const Detection*> dets{&d};
  const std::vector<const Embedding*> embs{&e};
  const CostMatrix c = str_costs(lost, dets, embs, 5, cfg());
  EXPECT_NEAR(c(0, 0), 2.0 - 0.6, 1e-12);
  EXPECT_NEAR(c(1, 0), 2.0 - 0.9, 1e-12);
  const Matching m = str_match(lost, dets, embs, 5, cfg());
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].first, 1u);
}

TEST(TrackerStep, ExtendsMatchingTrack) {
  Tracker tr(cfg(), 30);
  const std::vector<Detection> f1{det(1, {10, 10, 10, 20}, {1, 0})};
  const std::vector<Detection> f2{det(2, {11, 10, 10, 20}, {1, 0})};
  tr.step(1, f1);
  const FrameOutput out = tr.step(2, f2);
  ASSERT_EQ(tr.tracks().size(), 1u);
  EXPECT_EQ(tr.tracks()[0].id, 2001);
  EXPECT_EQ(tr.tracks()[0].length(), 2u);
  EXPECT_EQ(out.assignments[0].stage, MatchStage::kPrimary);
}

TEST(TrackerStep, TerminationAfterMemory) {
  Tracker tr(cfg(), 30);
  EXPECT_EQ(tr.termination_frames(ClassId::kPedestrian), 6);
  EXPECT_EQ(tr.termination_frames(ClassId::kCar), 3);
  const std::vector<Detection> none;
  tr.step(1, std::vector<Detection>{det(1, {10, 10, 10, 20}, {1, 0})});
  for (FrameIndex f = 2; f <= 7; ++f) {
    tr.step(f, none);
    EXPECT_EQ(tr.tracks()[0].state, TrackState::kLost) << f;
  }
  tr.step(8, none);
  EXPECT_EQ(tr.tracks()[0].state, TrackState::kTerminated);
  // The same object coming back gets a fresh id.
  tr.step(9, std::vector<Detection>{det(9, {10, 10, 10, 20}, {1, 0})});
  ASSERT_EQ(tr.tracks().size(), 2u);
  EXPECT_EQ(tr.tracks()[1].id, 2002);
  EXPECT_EQ(tr.tracks()[0].length(), 1u);
}

TEST(TrackerStep, ShortTermRetrievalWithinMemory) {
  Tracker tr(cfg(), 30);
  for (FrameIndex f = 1; f <= 5; ++f) tr.step(f, std::vector<Detection>{det(f, {10.0 + 2 * f, 10, 10, 20}, {1, 0})});
  // Four frames without detections, then the object reappears further on.
  const FrameOutput out = tr.step(10, std::vector<Detection>{det(10, {30, 10, 10, 20}, {1, 0})});
  ASSERT_EQ(tr.tracks().size(), 1u);
  EXPECT_EQ(out.assignments[0].stage, MatchStage::kShortTermRetrieval);
  EXPECT_EQ(tr.tracks()[0].state, TrackState::kActive);

  TrackerConfig off = cfg();
  off.enable_str = false;
  Tracker plain(off, 30);
  for (FrameIndex f = 1; f <= 5; ++f) plain.step(f, std::vector<Detection>{det(f, {10.0 + 2 * f, 10, 10, 20}, {1, 0})});
  plain.step(10, std::vector<Detection>{det(10, {30, 10, 10, 20}, {1, 0})});
  EXPECT_EQ(plain.tracks().size(), 2u);
}

TEST(TrackerStep, CrossingObjectsKeepIdentity) {
  Tracker tr(cfg(), 30);
  for (FrameIndex f = 0; f <= 12; ++f) {
    // Same row; they overlap completely at f = 6.
    std::vector<Detection> dets{det(f + 1, {5.0 * f, 30, 10, 20}, {1, 0}),
                                det(f + 1, {60.0 - 5.0 * f, 30, 10, 20}, {0, 1})};
    if (f % 2) std::swap(dets[0], dets[1]);
    tr.step(f + 1, dets);
  }
  ASSERT_EQ(tr.tracks().size(), 2u);
  for (const Track& t : tr.tracks()) {
    ASSERT_EQ(t.length(), 13u);
    const double dir = t.id == 2001 ? 1.0 : -1.0;
    for (std::size_t k = 1; k < t.length(); ++k) {
      EXPECT_EQ(t.observations[k].box.x - t.observations[k - 1].box.x, 5.0 * dir);
    }
  }
}

TEST(TrackerStep, OneToOnePerFrame) {
  Tracker tr(cfg(), 30);
  for (FrameIndex f = 1; f <= 10; ++f) {
    std::vector<Detection> dets;
    for (int k = 0; k < 4; ++k) dets.push_back(det(f, {20.0 * k + f, 10, 10, 20}, {double(k == 0), double(k == 1), double(k == 2), double(k == 3)}));
    const FrameOutput out = tr.step(f, dets);
    std::set<int> ids;
    for (const auto& a : out.assignments) EXPECT_TRUE(ids.insert(a.track_id).second);
    EXPECT_EQ(out.assignments.size(), dets.size());
  }
  EXPECT_EQ(tr.tracks().size(), 4u);
  for (const Track& t : tr.tracks()) {
    for (std::size_t k = 1; k < t.length(); ++k) EXPECT_LT(t.observations[k - 1].frame, t.observations[k].frame);
  }
}

TEST(TrackerStep, ClassesNeverMix) {
  Tracker tr(cfg(), 30);
  tr.step(1, std::vector<Detection>{det(1, {10, 10, 20, 20}, {1, 0}, ClassId::kCar)});
  tr.step(2, std::vector<Detection>{det(2, {10, 10, 20, 20}, {1, 0}, ClassId::kPedestrian)});
  ASSERT_EQ(tr.tracks().size(), 2u);
  EXPECT_EQ(tr.tracks()[0].id, 1001);
  EXPECT_EQ(tr.tracks()[1].id, 2001);
}

TEST(TrackerStep, OutOfOrderFrame) {
  Tracker tr(cfg(), 30);
  tr.step(5, std::vector<Detection>{});
  try {
    tr.step(5, std::vector<Detection>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfOrderFrame);
  }
}

TEST(TrackerStep, PoolsFeatureMaps) {
  // Two detections with equal boxes but different masks pool to different
  // embeddings: the foreground cell carries twice the weight.
  FeatureMap fmap{1, 2, 2, {1, 0, 0, 1}};
  Detection a{1, ClassId::kPedestrian, 0.9, {0, 0, 2, 1}, rect_mask(1, 2, 0, 0, 1, 1), fmap};
  const Embedding e = embed(a);
  EXPECT_NEAR(e.values[0], 1.0 / std::sqrt(1.25), 1e-12);
  EXPECT_NEAR(e.values[1], 0.5 / std::sqrt(1.25), 1e-12);
}
