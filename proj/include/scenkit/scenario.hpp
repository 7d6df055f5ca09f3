#ifndef SCENKIT_SCENARIO_HPP_
#define SCENKIT_SCENARIO_HPP_

#include <string>
#include <variant>
#include <vector>

#include "scenkit/parameters.hpp"

namespace scenkit
{

// Single straight road; driven lanes carry ids -1..-lane_count to the right
// of the reference line.
struct RoadSpec
{
  double length = 1000.0;
  int lane_count = 3;
  double lane_width = 3.5;

  // Lateral position of a lane center relative to the road reference line.
  double lane_center(int lane_id) const { return (lane_id + 0.5) * lane_width; }

  friend bool operator==(const RoadSpec &, const RoadSpec &) = default;
};

struct EntitySpec
{
  std::string name;
  int lane = -1;
  double s0 = 0.0;
  double offset = 0.0;
  double speed = 0.0;
  double length = 4.5;
  double width = 1.8;
  double height = 1.5;

  friend bool operator==(const EntitySpec &, const EntitySpec &) = default;
};

enum class DistanceRule
{
  kLessThan,
  kGreaterThan,
};

// Fires when the signed gap (triggering entity minus target, longitudinal)
// first crosses into the rule's half-space after having been outside it.
struct RelativeLongitudinalDistance
{
  std::string target;
  double value = 0.0;
  DistanceRule rule = DistanceRule::kLessThan;

  friend bool operator==(
    const RelativeLongitudinalDistance &, const RelativeLongitudinalDistance &) = default;
};

struct TraveledDistance
{
  std::string entity;
  double value = 0.0;

  friend bool operator==(const TraveledDistance &, const TraveledDistance &) = default;
};

using Condition = std::variant<RelativeLongitudinalDistance, TraveledDistance>;

// Linear ramp in time toward an absolute target speed.
struct SpeedChange
{
  double target_speed = 0.0;
  double duration = 0.0;

  friend bool operator==(const SpeedChange &, const SpeedChange &) = default;
};

// Sinusoidal lateral profile as a function of s-progress through over_distance.
struct LaneChange
{
  int target_lane = -1;
  double over_distance = 0.0;

  friend bool operator==(const LaneChange &, const LaneChange &) = default;
};

struct LaneOffset
{
  double value = 0.0;

  friend bool operator==(const LaneOffset &, const LaneOffset &) = default;
};

using Action = std::variant<SpeedChange, LaneChange, LaneOffset>;

struct TriggeredEvent
{
  std::string name;
  std::string actor;
  Condition condition;
  Action action;

  friend bool operator==(const TriggeredEvent &, const TriggeredEvent &) = default;
};

struct StopCondition
{
  std::string entity;
  double traveled_distance = 0.0;
  double timeout = 120.0;

  friend bool operator==(const StopCondition &, const StopCondition &) = default;
};

struct ScenarioDocument
{
  RoadSpec road;
  EntitySpec ego;
  EntitySpec challenger;
  std::vector<TriggeredEvent> events;
  StopCondition stop;

  friend bool operator==(const ScenarioDocument &, const ScenarioDocument &) = default;
};

inline constexpr const char * kEgoName = "Ego";
inline constexpr const char * kChallengerName = "Challenger";

// All document numerics are quantized to 1e-6 so that serialization at six
// decimals round-trips exactly.
double quantize(double value);

struct CompilerConfig
{
  double vehicle_length = 4.5;
  double vehicle_width = 1.8;
  double vehicle_height = 1.5;
  double start_margin = 10.0;  // challenger never starts behind this s
};

ScenarioDocument compile_4pt(
  const LaneChangeParameters & p, const RoadSpec & road, const CompilerConfig & cfg = {});

ScenarioDocument compile_2pt(
  const BaselineParameters & b, const RoadSpec & road, ScenarioKind kind = ScenarioKind::kCutIn,
  const CompilerConfig & cfg = {});

// A road long and wide enough to host the compiled scenario.
RoadSpec default_road_for(
  const LaneChangeParameters & p, double lane_width = 3.5, int lane_count = 3);

}  // namespace scenkit

#endif  // SCENKIT_SCENARIO_HPP_
