#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "scenkit/errors.hpp"
#include "scenkit/geometry.hpp"
#include "scenkit/synth.hpp"

using namespace scenkit;

namespace
{

ReferencePath straight_path()
{
  return ReferencePath::from_points({{0.0, 0.0}, {100.0, 0.0}});
}

ReferencePath corner_path()
{
  return ReferencePath::from_points({{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}});
}

// brute-force projection oracle: densely sample the polyline and take the
// closest sample, independent of the segment-wise implementation
FrenetPose brute_force_frenet(
  const std::vector<CartesianPoint> & pts, const CartesianPoint & p, std::size_t samples)
{
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum.push_back(cum.back() + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y));
  }
  const double total = cum.back();
  double best_d2 = 1e300;
  double best_s = 0.0;
  double best_cross = 0.0;
  for (std::size_t k = 0; k <= samples; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(samples);
    std::size_t seg = 0;
    while (seg + 2 < pts.size() && cum[seg + 1] < s) {
      ++seg;
    }
    const double seg_len = cum[seg + 1] - cum[seg];
    const double u = (s - cum[seg]) / seg_len;
    const double x = pts[seg].x + u * (pts[seg + 1].x - pts[seg].x);
    const double y = pts[seg].y + u * (pts[seg + 1].y - pts[seg].y);
    const double d2 = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = s;
      const double dx = (pts[seg + 1].x - pts[seg].x) / seg_len;
      const double dy = (pts[seg + 1].y - pts[seg].y) / seg_len;
      best_cross = dx * (p.y - y) - dy * (p.x - x);
    }
  }
  return {best_s, std::copysign(std::sqrt(best_d2), best_cross)};
}

}  // namespace

TEST(ReferencePathTest, RejectsDegenerateInput)
{
  EXPECT_THROW(ReferencePath::from_points({}), ValidationError);
  EXPECT_THROW(ReferencePath::from_points({{1.0, 1.0}}), ValidationError);
  EXPECT_THROW(ReferencePath::from_points({{1.0, 1.0}, {1.0, 1.0}}), ValidationError);
}

TEST(ReferencePathTest, DropsConsecutiveDuplicates)
{
  const auto path =
    ReferencePath::from_points({{0.0, 0.0}, {0.0, 0.0}, {5.0, 0.0}, {5.0, 0.0}, {9.0, 0.0}});
  EXPECT_EQ(path.points().size(), 3u);
  EXPECT_DOUBLE_EQ(path.length(), 9.0);
}

TEST(ToFrenetTest, AxisAlignedProjection)
{
  const auto path = straight_path();
  const FrenetPose f = path.to_frenet({5.0, 2.0});
  EXPECT_NEAR(f.s, 5.0, 1e-12);
  EXPECT_NEAR(f.t, 2.0, 1e-12);
}

TEST(ToFrenetTest, OnPathPoint)
{
  const auto path = straight_path();
  const FrenetPose f = path.to_frenet({5.0, 0.0});
  EXPECT_NEAR(f.s, 5.0, 1e-12);
  EXPECT_NEAR(f.t, 0.0, 1e-12);
}

TEST(ToFrenetTest, CornerPolylineMatchesBruteForce)
{
  const std::vector<CartesianPoint> pts{{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}};
  const auto path = ReferencePath::from_points(pts);
  const FrenetPose f = path.to_frenet({11.0, 5.0});
  // oracle over one million sampled path points
  const FrenetPose oracle = brute_force_frenet(pts, {11.0, 5.0}, 1000000);
  EXPECT_NEAR(f.s, 15.0, 1e-9);
  EXPECT_NEAR(f.t, -1.0, 1e-9);
  EXPECT_NEAR(f.s, oracle.s, 2e-5);
  EXPECT_NEAR(f.t, oracle.t, 2e-5);
}

TEST(ToFrenetTest, BeyondEndsClampsAndExtends)
{
  const auto path = straight_path();
  const FrenetPose before = path.to_frenet({-5.0, 3.0});
  EXPECT_NEAR(before.s, 0.0, 1e-12);
  EXPECT_NEAR(before.t, 3.0, 1e-12);
  const FrenetPose after = path.to_frenet({112.0, -4.0});
  EXPECT_NEAR(after.s, 100.0, 1e-12);
  EXPECT_NEAR(after.t, -4.0, 1e-12);
}

TEST(ToCartesianTest, StraightPathExamples)
{
  const auto path = straight_path();
  const CartesianPoint a = path.to_cartesian({5.0, 2.0});
  EXPECT_NEAR(a.x, 5.0, 1e-12);
  EXPECT_NEAR(a.y, 2.0, 1e-12);
  const CartesianPoint start = path.to_cartesian({0.0, 0.0});
  EXPECT_NEAR(start.x, 0.0, 1e-12);
  EXPECT_NEAR(start.y, 0.0, 1e-12);
}

TEST(ToCartesianTest, CornerInverse)
{
  const auto path = corner_path();
  const CartesianPoint p = path.to_cartesian({15.0, -1.0});
  EXPECT_NEAR(p.x, 11.0, 1e-12);
  EXPECT_NEAR(p.y, 5.0, 1e-12);
}

TEST(ToCartesianTest, RejectsOutOfRange)
{
  const auto path = straight_path();
  EXPECT_THROW(path.to_cartesian({-1.0, 0.0}), ValidationError);
  EXPECT_THROW(path.to_cartesian({101.0, 0.0}), ValidationError);
}

TEST(FrenetRoundTripTest, RandomPosesOnZigzagPath)
{
  const auto path = ReferencePath::from_points(
    {{0.0, 0.0}, {40.0, 5.0}, {80.0, -3.0}, {120.0, 10.0}, {160.0, 8.0}});
  // inside the corner wedge (|s - s_corner| < |t| tan(deflection/2)) the
  // polyline frame is not invertible, so poses there are excluded
  const auto & cum = path.cumulative_arclength();
  auto in_wedge = [&](const FrenetPose & f) {
    for (std::size_t i = 1; i + 1 < cum.size(); ++i) {
      if (std::abs(f.s - cum[i]) < std::abs(f.t) * 0.35 + 0.05) {
        return true;
      }
    }
    return false;
  };
  Rng rng(7);
  int checked = 0;
  for (int i = 0; i < 1000 && checked < 400; ++i) {
    const FrenetPose f{rng.uniform(0.5, path.length() - 0.5), rng.uniform(-2.0, 2.0)};
    if (in_wedge(f)) {
      continue;
    }
    ++checked;
    const FrenetPose back = path.to_frenet(path.to_cartesian(f));
    EXPECT_NEAR(back.s, f.s, 1e-3);
    EXPECT_NEAR(back.t, f.t, 1e-3);
  }
  EXPECT_GE(checked, 300);
  // away from corners the round trip is tight
  for (int i = 0; i < 500; ++i) {
    const FrenetPose f{rng.uniform(1.0, 35.0), rng.uniform(-2.0, 2.0)};
    const FrenetPose back = path.to_frenet(path.to_cartesian(f));
    EXPECT_NEAR(back.s, f.s, 1e-6);
    EXPECT_NEAR(back.t, f.t, 1e-6);
  }
}

TEST(FrenetPropertyTest, ReflectionNegatesLateral)
{
  const auto path = straight_path();
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const CartesianPoint p{rng.uniform(0.0, 100.0), rng.uniform(-5.0, 5.0)};
    const FrenetPose f = path.to_frenet(p);
    const FrenetPose mirrored = path.to_frenet({p.x, -p.y});
    EXPECT_NEAR(mirrored.s, f.s, 1e-9);
    EXPECT_NEAR(mirrored.t, -f.t, 1e-9);
  }
}

TEST(FrenetPropertyTest, MonotoneProgressGivesMonotoneS)
{
  const auto path = ReferencePath::from_points(
    {{0.0, 0.0}, {30.0, 4.0}, {60.0, -4.0}, {90.0, 0.0}});
  double prev = -1.0;
  for (double x = 0.0; x <= 88.0; x += 0.5) {
    const double s = path.to_frenet({x, 1.0}).s;
    EXPECT_GE(s, prev - 1e-9);
    prev = s;
  }
}

TEST(TrajectoryTest, InvariantsEnforced)
{
  std::vector<TrackedState> bad_time(2);
  bad_time[0].time = 1.0;
  bad_time[0].object_id = "a";
  bad_time[1].time = 1.0;
  bad_time[1].object_id = "a";
  EXPECT_THROW(Trajectory{bad_time}, ValidationError);

  std::vector<TrackedState> bad_id(2);
  bad_id[0].time = 0.0;
  bad_id[0].object_id = "a";
  bad_id[1].time = 1.0;
  bad_id[1].object_id = "b";
  EXPECT_THROW(Trajectory{bad_id}, ValidationError);
}

TEST(Resample1HzTest, LinearDataHitsWholeSeconds)
{
  std::vector<TrackedState> states(3);
  const double times[] = {0.0, 0.5, 1.0};
  const double xs[] = {0.0, 5.0, 10.0};
  for (int i = 0; i < 3; ++i) {
    states[i].time = times[i];
    states[i].object_id = "a";
    states[i].position = {xs[i], 0.0};
    states[i].speed = 10.0;
  }
  const Trajectory traj(states);
  const Trajectory out = resample_1hz(traj, 0.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out.states()[0].position.x, 0.0);
  EXPECT_DOUBLE_EQ(out.states()[1].position.x, 10.0);
}

TEST(Resample1HzTest, SingleSecondSpanGivesTwoSamples)
{
  std::vector<TrackedState> states(2);
  states[0].time = 0.0;
  states[0].object_id = "a";
  states[1].time = 1.0;
  states[1].object_id = "a";
  const Trajectory out = resample_1hz(Trajectory(states), 0.0);
  EXPECT_EQ(out.size(), 2u);
}

TEST(Resample1HzTest, InterpolatesBetweenIrregularSamples)
{
  std::vector<TrackedState> states(3);
  const double times[] = {0.0, 0.4, 1.2};
  const double xs[] = {0.0, 4.0, 12.0};
  for (int i = 0; i < 3; ++i) {
    states[i].time = times[i];
    states[i].object_id = "a";
    states[i].position = {xs[i], 0.0};
  }
  const Trajectory out = resample_1hz(Trajectory(states), 0.0);
  ASSERT_EQ(out.size(), 2u);
  // hand interpolation between the 0.4 s and 1.2 s samples
  EXPECT_NEAR(out.states()[1].position.x, 10.0, 1e-12);
}

TEST(Resample1HzTest, EmptyInputIsAnError)
{
  EXPECT_THROW(resample_1hz(Trajectory{}, 0.0), ValidationError);
}
