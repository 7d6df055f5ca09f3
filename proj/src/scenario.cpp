#include "scenkit/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

void check_lane_on_road(int lane_id, const RoadSpec & road, const char * what)
{
  if (lane_id > -1 || lane_id < -road.lane_count) {
    throw ValidationError(
      std::string(what) + " lane " + std::to_string(lane_id) + " is not on a road with " +
      std::to_string(road.lane_count) + " lanes");
  }
}

DistanceRule trigger_rule(double gap_rate_at_cut)
{
  // The gap approaches the trigger value from below when the challenger is
  // the faster vehicle at the cut start, from above otherwise.
  return gap_rate_at_cut > 0.0 ? DistanceRule::kGreaterThan : DistanceRule::kLessThan;
}

}  // namespace

double quantize(double value)
{
  return std::round(value * 1e6) / 1e6;
}

ScenarioDocument compile_4pt(
  const LaneChangeParameters & p, const RoadSpec & road, const CompilerConfig & cfg)
{
  const auto issues = validate(p);
  if (!issues.empty()) {
    std::string msg = "cannot compile invalid parameters:";
    for (const auto & issue : issues) {
      msg += "\n  - " + issue;
    }
    throw ValidationError(msg);
  }
  check_lane_on_road(p.ego_lane0, road, "ego initial");
  check_lane_on_road(p.ch_lane0, road, "challenger initial");
  check_lane_on_road(p.ch_lane_final, road, "challenger final");

  ScenarioDocument doc;
  doc.road = road;

  const double ego_s0 = quantize(cfg.start_margin + std::max(0.0, -p.d0));
  doc.ego = {
    kEgoName,         p.ego_lane0,       ego_s0, 0.0, quantize(p.ego_v0), cfg.vehicle_length,
    cfg.vehicle_width, cfg.vehicle_height};
  doc.challenger = {
    kChallengerName,   p.ch_lane0,
    quantize(ego_s0 + p.d0), quantize(p.ch_offset0),
    quantize(p.ch_v0), cfg.vehicle_length,
    cfg.vehicle_width, cfg.vehicle_height};

  if (doc.challenger.s0 + p.dist_total > road.length) {
    throw ValidationError("road is too short for the scenario's total travel distance");
  }

  doc.events.push_back(
    {"speed_at_cut_start", kChallengerName,
     TraveledDistance{kChallengerName, quantize(p.dist_cut_start)},
     SpeedChange{quantize(p.v_cut_start), quantize(p.dur_to_cut_start)}});
  doc.events.push_back(
    {"speed_at_cut_end", kChallengerName,
     TraveledDistance{kChallengerName, quantize(p.dist_cut_end)},
     SpeedChange{quantize(p.v_cut_end), quantize(p.dur_cut_start_to_end)}});
  doc.events.push_back(
    {"speed_at_scenario_end", kChallengerName,
     TraveledDistance{kChallengerName, quantize(p.dist_total)},
     SpeedChange{quantize(p.v_final), quantize(p.dur_cut_end_to_end)}});
  doc.events.push_back(
    {"lane_change", kChallengerName,
     RelativeLongitudinalDistance{
       kEgoName, quantize(p.trigger_distance), trigger_rule(p.v_cut_start - p.ego_v0)},
     LaneChange{p.ch_lane_final, quantize(p.cut_distance)}});
  doc.events.push_back(
    {"final_lane_offset", kChallengerName,
     TraveledDistance{kChallengerName, quantize(p.dist_cut_end)},
     LaneOffset{quantize(p.ch_offset_final)}});

  doc.stop = {kChallengerName, quantize(p.dist_total), 120.0};
  return doc;
}

ScenarioDocument compile_2pt(
  const BaselineParameters & b, const RoadSpec & road, ScenarioKind kind,
  const CompilerConfig & cfg)
{
  if (b.ego_v0 < 0.0 || b.ch_v0 < 0.0 || b.ch_v_final < 0.0) {
    throw ValidationError("cannot compile invalid parameters:\n  - velocities must be >= 0");
  }
  if (b.ch_relative_lane != -1 && b.ch_relative_lane != 1) {
    throw ValidationError("cannot compile invalid parameters:\n  - ch_relative_lane must be -1 or +1");
  }
  if (b.cut_distance <= 0.0) {
    throw ValidationError("cannot compile invalid parameters:\n  - cut_distance must be > 0");
  }

  // Relative lanes become absolute ones: the ego keeps a lane available on
  // the challenger's side.
  const int ego_lane = b.ch_relative_lane > 0 ? -2 : -1;
  const int off_lane = ego_lane + b.ch_relative_lane;
  const int ch_lane0 = kind == ScenarioKind::kCutIn ? off_lane : ego_lane;
  const int ch_lane_final = kind == ScenarioKind::kCutIn ? ego_lane : off_lane;
  check_lane_on_road(ego_lane, road, "ego initial");
  check_lane_on_road(ch_lane0, road, "challenger initial");
  check_lane_on_road(ch_lane_final, road, "challenger final");

  ScenarioDocument doc;
  doc.road = road;
  const double ego_s0 = quantize(cfg.start_margin + std::max(0.0, -b.d0));
  doc.ego = {
    kEgoName,          ego_lane,          ego_s0, 0.0, quantize(b.ego_v0), cfg.vehicle_length,
    cfg.vehicle_width, cfg.vehicle_height};
  doc.challenger = {
    kChallengerName,   ch_lane0,
    quantize(ego_s0 + b.d0), quantize(b.ch_offset0),
    quantize(b.ch_v0), cfg.vehicle_length,
    cfg.vehicle_width, cfg.vehicle_height};

  const RelativeLongitudinalDistance trigger{
    kEgoName, quantize(b.trigger_distance), trigger_rule(b.ch_v0 - b.ego_v0)};
  // Table-style two-point sets carry no transition duration; the speed ramp
  // nominally spans the lane change maneuver.
  const double ramp_duration = quantize(b.cut_distance / std::max(b.ch_v0, 0.1));
  doc.events.push_back(
    {"speed_at_cut", kChallengerName, trigger,
     SpeedChange{quantize(b.ch_v_final), ramp_duration}});
  doc.events.push_back(
    {"lane_change", kChallengerName, trigger, LaneChange{ch_lane_final, quantize(b.cut_distance)}});
  doc.events.push_back(
    {"final_lane_offset", kChallengerName, trigger, LaneOffset{quantize(b.ch_offset_final)}});

  // Stop once the challenger clears the maneuver plus a postroll allowance.
  double fire_eta = 60.0;
  const double closing_rate = b.ch_v0 - b.ego_v0;
  if (std::abs(closing_rate) > 1e-6) {
    const double eta = (b.trigger_distance - b.d0) / closing_rate;
    if (eta > 0.0) {
      fire_eta = std::min(eta, 60.0);
    }
  }
  const double stop_distance =
    quantize(b.ch_v0 * fire_eta + b.cut_distance + 5.0 * std::max(b.ch_v_final, b.ch_v0));
  doc.stop = {kChallengerName, stop_distance, 120.0};
  return doc;
}

RoadSpec default_road_for(const LaneChangeParameters & p, double lane_width, int lane_count)
{
  const CompilerConfig cfg;
  const double ego_s0 = cfg.start_margin + std::max(0.0, -p.d0);
  const double ch_s0 = ego_s0 + p.d0;
  const double slowest =
    std::max(1.0, std::min({p.ch_v0, p.v_cut_start, p.v_cut_end, p.v_final}));
  const double duration_bound = p.dist_total / slowest + 5.0;
  const double needed = std::max(ch_s0 + p.dist_total, ego_s0 + p.ego_v0 * duration_bound) + 50.0;
  RoadSpec road;
  road.length = std::ceil(needed / 50.0) * 50.0;
  road.lane_count = lane_count;
  road.lane_width = quantize(lane_width);
  const int deepest = std::min({p.ego_lane0, p.ch_lane0, p.ch_lane_final});
  road.lane_count = std::max(road.lane_count, -deepest);
  return road;
}

}  // namespace scenkit
