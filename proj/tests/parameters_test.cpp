#include <gtest/gtest.h>

#include <cmath>

#include "scenkit/errors.hpp"
#include "scenkit/parameters.hpp"
#include "scenkit/pipeline.hpp"
#include "scenkit/synth.hpp"

using namespace scenkit;

namespace
{

struct Extracted
{
  LaneChangeEvent event;
  LaneChangeParameters params;
};

Extracted extract_single(const SynthScenario & scen)
{
  const ReferencePath path = ego_reference_path(scen.tracks.ego);
  const auto events =
    detect_events(scen.tracks.ego, scen.tracks.others, path, DetectorConfig{});
  if (events.size() != 1 || events[0].truncated) {
    throw std::runtime_error("expected exactly one complete event");
  }
  return {events[0], extract_4pt(events[0], scen.tracks.ego, scen.tracks.others[0], path)};
}

void expect_params_near(
  const LaneChangeParameters & got, const LaneChangeParameters & want, double v_tol,
  double d_tol, double t_tol)
{
  EXPECT_EQ(got.kind, want.kind);
  EXPECT_NEAR(got.ego_v0, want.ego_v0, v_tol);
  EXPECT_EQ(got.ego_lane0, want.ego_lane0);
  EXPECT_NEAR(got.ch_v0, want.ch_v0, v_tol);
  EXPECT_NEAR(got.d0, want.d0, d_tol);
  EXPECT_EQ(got.ch_lane0, want.ch_lane0);
  EXPECT_NEAR(got.ch_offset0, want.ch_offset0, d_tol);
  EXPECT_NEAR(got.trigger_distance, want.trigger_distance, d_tol);
  EXPECT_NEAR(got.cut_distance, want.cut_distance, d_tol);
  EXPECT_NEAR(got.v_cut_start, want.v_cut_start, v_tol);
  EXPECT_NEAR(got.dist_cut_start, want.dist_cut_start, d_tol);
  EXPECT_NEAR(got.dur_to_cut_start, want.dur_to_cut_start, t_tol);
  EXPECT_NEAR(got.v_cut_end, want.v_cut_end, v_tol);
  EXPECT_NEAR(got.dist_cut_end, want.dist_cut_end, d_tol);
  EXPECT_NEAR(got.dur_cut_start_to_end, want.dur_cut_start_to_end, t_tol);
  EXPECT_NEAR(got.v_final, want.v_final, v_tol);
  EXPECT_NEAR(got.dist_total, want.dist_total, d_tol);
  EXPECT_NEAR(got.dur_cut_end_to_end, want.dur_cut_end_to_end, t_tol);
  EXPECT_NEAR(got.ch_offset_final, want.ch_offset_final, d_tol);
  EXPECT_EQ(got.ch_lane_final, want.ch_lane_final);
}

}  // namespace

TEST(Extract4ptTest, RecoversAuthoredParameters)
{
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u, 16u}) {
    const ScenarioKind kind =
      seed % 2 == 0 ? ScenarioKind::kCutOut : ScenarioKind::kCutIn;
    const SynthScenario scen = synth_kinematic_scenario(kind, seed, false);
    const Extracted got = extract_single(scen);
    expect_params_near(got.params, scen.authored, 0.05, 0.1, 0.05);
  }
}

TEST(Extract4ptTest, ConstantPrerollTrivialCase)
{
  // a challenger holding 20 m/s covers 100 m in the 5 s preroll
  SynthScenario scen;
  {
    Rng unused(0);
    // author directly through the kinematic generator contract by scaling a
    // known seed is brittle; instead assert on any in-window-constant run
    scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 21, true);
  }
  const Extracted got = extract_single(scen);
  EXPECT_NEAR(
    got.params.dist_cut_start,
    0.5 * (scen.authored.ch_v0 + scen.authored.v_cut_start) * 5.0, 0.1);
  EXPECT_NEAR(got.params.dur_to_cut_start, 5.0, 0.05);
}

TEST(Extract4ptTest, CutOutFinalLanePassthrough)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutOut, 30, false);
  const Extracted got = extract_single(scen);
  EXPECT_EQ(got.params.kind, ScenarioKind::kCutOut);
  EXPECT_EQ(got.params.ch_lane_final, scen.authored.ch_lane_final);
  EXPECT_NE(got.params.ch_lane_final, got.params.ego_lane0);
}

TEST(Extract4ptTest, InvariantUnderRigidTransform)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 99, false);
  const Extracted base = extract_single(scen);

  const double c = std::cos(0.7);
  const double s = std::sin(0.7);
  auto rotate = [&](const Trajectory & traj) {
    std::vector<TrackedState> states = traj.states();
    for (auto & st : states) {
      const double x = st.position.x;
      const double y = st.position.y;
      st.position = {c * x - s * y + 250.0, s * x + c * y - 80.0};
    }
    return Trajectory(std::move(states));
  };
  SynthScenario moved = scen;
  moved.tracks.ego = rotate(scen.tracks.ego);
  moved.tracks.others[0] = rotate(scen.tracks.others[0]);
  const Extracted after = extract_single(moved);
  expect_params_near(after.params, base.params, 1e-6, 1e-6, 1e-6);
}

TEST(Extract4ptTest, TruncatedEventIsRejected)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 45, false);
  const ReferencePath path = ego_reference_path(scen.tracks.ego);
  auto events = detect_events(scen.tracks.ego, scen.tracks.others, path, DetectorConfig{});
  ASSERT_EQ(events.size(), 1u);
  events[0].truncated = true;
  EXPECT_THROW(
    extract_4pt(events[0], scen.tracks.ego, scen.tracks.others[0], path), ValidationError);
}

TEST(Extract4ptTest, MissingControlPointNamesIt)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 45, false);
  const ReferencePath path = ego_reference_path(scen.tracks.ego);
  auto events = detect_events(scen.tracks.ego, scen.tracks.others, path, DetectorConfig{});
  ASSERT_EQ(events.size(), 1u);
  events[0].t_scenario_end = scen.tracks.others[0].end_time() + 50.0;
  try {
    extract_4pt(events[0], scen.tracks.ego, scen.tracks.others[0], path);
    FAIL() << "expected an extraction error";
  } catch (const ValidationError & e) {
    EXPECT_NE(std::string(e.what()).find("scenario_end"), std::string::npos);
  }
}

TEST(Extract2ptTest, InitialSpeedIsPrerollDistanceOverFiveSeconds)
{
  // accelerating preroll: the baseline speed is the average, not the speed
  // at the cut start
  for (std::uint64_t seed : {61u, 62u, 63u}) {
    const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, seed, false);
    const ReferencePath path = ego_reference_path(scen.tracks.ego);
    const auto events =
      detect_events(scen.tracks.ego, scen.tracks.others, path, DetectorConfig{});
    ASSERT_EQ(events.size(), 1u);
    const BaselineParameters b =
      extract_2pt(events[0], scen.tracks.ego, scen.tracks.others[0], path);
    const double preroll_distance =
      0.5 * (scen.authored.ch_v0 + scen.authored.v_cut_start) * 5.0;
    EXPECT_NEAR(b.ch_v0, preroll_distance / 5.0, 0.05);
    EXPECT_LT(b.ch_v0, scen.authored.v_cut_start - 0.5);
  }
}

TEST(Extract2ptTest, IsAProjectionOfTheFourPointSet)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutOut, 70, false);
  const ReferencePath path = ego_reference_path(scen.tracks.ego);
  const auto events =
    detect_events(scen.tracks.ego, scen.tracks.others, path, DetectorConfig{});
  ASSERT_EQ(events.size(), 1u);
  const LaneChangeParameters p =
    extract_4pt(events[0], scen.tracks.ego, scen.tracks.others[0], path);
  const BaselineParameters b =
    extract_2pt(events[0], scen.tracks.ego, scen.tracks.others[0], path);
  EXPECT_DOUBLE_EQ(b.ego_v0, p.ego_v0);
  EXPECT_DOUBLE_EQ(b.d0, p.d0);
  EXPECT_DOUBLE_EQ(b.ch_offset0, p.ch_offset0);
  EXPECT_DOUBLE_EQ(b.trigger_distance, p.trigger_distance);
  EXPECT_DOUBLE_EQ(b.cut_distance, p.cut_distance);
  EXPECT_DOUBLE_EQ(b.ch_v_final, p.v_final);
  EXPECT_DOUBLE_EQ(b.ch_offset_final, p.ch_offset_final);
  EXPECT_DOUBLE_EQ(b.ch_v0, p.dist_cut_start / 5.0);
  EXPECT_TRUE(b.ch_relative_lane == 1 || b.ch_relative_lane == -1);
}

TEST(ValidateTest, ReportsViolatedFields)
{
  LaneChangeParameters p = fixture_params();
  EXPECT_TRUE(validate(p).empty());
  p.v_cut_start = -1.0;
  p.dist_cut_end = p.dist_cut_start - 1.0;
  const auto issues = validate(p);
  ASSERT_GE(issues.size(), 2u);
  bool saw_speed = false;
  bool saw_dist = false;
  for (const auto & issue : issues) {
    saw_speed = saw_speed || issue.find("v_cut_start") != std::string::npos;
    saw_dist = saw_dist || issue.find("dist_cut_end") != std::string::npos;
  }
  EXPECT_TRUE(saw_speed);
  EXPECT_TRUE(saw_dist);
}

TEST(ValidateTest, KindLaneRule)
{
  LaneChangeParameters p = fixture_params();
  p.ch_lane_final = -3;  // cut-in must end in the ego lane
  EXPECT_FALSE(validate(p).empty());
  p.kind = ScenarioKind::kCutOut;
  EXPECT_TRUE(validate(p).empty());
  p.ch_lane_final = p.ego_lane0;
  EXPECT_FALSE(validate(p).empty());
}

TEST(ParamsJsonTest, RoundTripAndSchema)
{
  const LaneChangeParameters p = fixture_params();
  const auto parsed = parse_params_json(write_params_json({p}));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_DOUBLE_EQ(parsed[0].trigger_distance, p.trigger_distance);
  EXPECT_DOUBLE_EQ(parsed[0].dist_total, p.dist_total);
  EXPECT_EQ(parsed[0].ch_lane_final, p.ch_lane_final);
  EXPECT_THROW(parse_params_json("{\"schema\":\"other\",\"scenarios\":[]}"), ValidationError);
  EXPECT_THROW(parse_params_json("not json"), ValidationError);
}
