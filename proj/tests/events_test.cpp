#include <gtest/gtest.h>

#include <cmath>

#include "scenkit/errors.hpp"
#include "scenkit/events.hpp"
#include "scenkit/pipeline.hpp"
#include "scenkit/synth.hpp"

using namespace scenkit;

namespace
{

std::vector<LaneChangeEvent> detect_on(const TrackSet & tracks)
{
  const ReferencePath path = ego_reference_path(tracks.ego);
  return detect_events(tracks.ego, tracks.others, path, DetectorConfig{});
}

TrackSet shifted(const TrackSet & tracks, double dt)
{
  auto shift = [dt](const Trajectory & traj) {
    std::vector<TrackedState> states = traj.states();
    for (auto & st : states) {
      st.time += dt;
    }
    return Trajectory(std::move(states));
  };
  TrackSet out;
  out.ego = shift(tracks.ego);
  for (const auto & t : tracks.others) {
    out.others.push_back(shift(t));
  }
  return out;
}

}  // namespace

TEST(DetectEventsTest, FindsAuthoredCutIn)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 42, false);
  const auto events = detect_on(scen.tracks);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, ScenarioKind::kCutIn);
  EXPECT_EQ(events[0].challenger_id, "ch1");
  EXPECT_FALSE(events[0].truncated);
  // the detected maneuver brackets the authored lateral ramp
  EXPECT_LE(events[0].t_cut_start, scen.true_cut_start + 0.05);
  EXPECT_GE(events[0].t_cut_end, scen.true_cut_end - 0.05);
  EXPECT_NEAR(events[0].t_cut_start, scen.true_cut_start, 0.05);
  EXPECT_NEAR(events[0].t_cut_end, scen.true_cut_end, 0.05);
}

TEST(DetectEventsTest, FindsAuthoredCutOut)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutOut, 43, false);
  const auto events = detect_on(scen.tracks);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, ScenarioKind::kCutOut);
  EXPECT_NEAR(events[0].t_cut_start, scen.true_cut_start, 0.05);
  EXPECT_NEAR(events[0].t_cut_end, scen.true_cut_end, 0.05);
}

TEST(DetectEventsTest, LaneKeepersProduceNothing)
{
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const TrackSet tracks = synth_lane_keeping(seed);
    EXPECT_TRUE(detect_on(tracks).empty()) << "seed " << seed;
  }
}

TEST(DetectEventsTest, SensitivityAcrossRampDurations)
{
  int detected = 0;
  int total = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const ScenarioKind kind =
      seed % 2 == 0 ? ScenarioKind::kCutIn : ScenarioKind::kCutOut;
    const SynthScenario scen = synth_kinematic_scenario(kind, seed, false);
    const auto events = detect_on(scen.tracks);
    ++total;
    if (events.size() == 1 && events[0].kind == kind && !events[0].truncated) {
      // the detected window must contain the authored ramp
      if (
        events[0].t_cut_start <= scen.true_cut_start + 0.1 &&
        events[0].t_cut_end >= scen.true_cut_end - 0.1) {
        ++detected;
      }
    }
  }
  EXPECT_EQ(detected, total);
}

TEST(DetectEventsTest, InvariantUnderTimeShift)
{
  const SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 77, false);
  const auto base = detect_on(scen.tracks);
  const auto moved = detect_on(shifted(scen.tracks, 13.7));
  ASSERT_EQ(base.size(), 1u);
  ASSERT_EQ(moved.size(), 1u);
  EXPECT_NEAR(moved[0].t_cut_start, base[0].t_cut_start + 13.7, 1e-6);
  EXPECT_NEAR(moved[0].t_cut_end, base[0].t_cut_end + 13.7, 1e-6);
  EXPECT_NEAR(moved[0].t_scenario_start, base[0].t_scenario_start + 13.7, 1e-6);
  EXPECT_NEAR(moved[0].t_scenario_end, base[0].t_scenario_end + 13.7, 1e-6);
}

TEST(DetectEventsTest, TruncatedEventIsFlagged)
{
  SynthScenario scen = synth_kinematic_scenario(ScenarioKind::kCutIn, 55, false);
  // cut the challenger log shortly after the lateral ramp ends
  std::vector<TrackedState> states = scen.tracks.others[0].states();
  std::vector<TrackedState> clipped;
  for (const auto & st : states) {
    if (st.time <= scen.true_cut_end + 1.2) {
      clipped.push_back(st);
    }
  }
  scen.tracks.others[0] = Trajectory(std::move(clipped));
  const auto events = detect_on(scen.tracks);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_TRUE(events[0].truncated);
}

TEST(EventsJsonTest, RoundTrip)
{
  LaneChangeEvent ev;
  ev.kind = ScenarioKind::kCutOut;
  ev.challenger_id = "veh9";
  ev.t_scenario_start = 1.5;
  ev.t_cut_start = 6.5;
  ev.t_cut_end = 9.25;
  ev.t_scenario_end = 14.25;
  ev.truncated = true;
  const auto parsed = parse_events_json(write_events_json({ev}));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].kind, ScenarioKind::kCutOut);
  EXPECT_EQ(parsed[0].challenger_id, "veh9");
  EXPECT_DOUBLE_EQ(parsed[0].t_cut_end, 9.25);
  EXPECT_TRUE(parsed[0].truncated);
}

TEST(EventsJsonTest, MalformedInputIsRejected)
{
  EXPECT_THROW(parse_events_json("{not json"), ValidationError);
  EXPECT_THROW(parse_events_json("{\"schema\":\"scenkit-events-1\"}"), ValidationError);
}

TEST(LaneCenterOffsetTest, SignConvention)
{
  // lane -1 is leftmost; left of the ego path is positive
  EXPECT_DOUBLE_EQ(lane_center_offset(-1, -2, 3.5), 3.5);
  EXPECT_DOUBLE_EQ(lane_center_offset(-3, -2, 3.5), -3.5);
  EXPECT_DOUBLE_EQ(lane_center_offset(-2, -2, 3.5), 0.0);
}
