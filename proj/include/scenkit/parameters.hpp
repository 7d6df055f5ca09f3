#ifndef SCENKIT_PARAMETERS_HPP_
#define SCENKIT_PARAMETERS_HPP_

#include <string>
#include <vector>

#include "scenkit/events.hpp"
#include "scenkit/geometry.hpp"

namespace scenkit
{

// The 19 parameters captured at the four control points, plus the scenario
// kind. Distances are Frenet s-distances; offsets are measured from lane
// centers; the initial gap d0 is positive when the challenger is ahead.
struct LaneChangeParameters
{
  ScenarioKind kind = ScenarioKind::kCutIn;

  double ego_v0 = 0.0;
  int ego_lane0 = -1;

  double ch_v0 = 0.0;
  double d0 = 0.0;
  int ch_lane0 = -1;
  double ch_offset0 = 0.0;

  double trigger_distance = 0.0;
  double cut_distance = 0.0;

  double v_cut_start = 0.0;
  double dist_cut_start = 0.0;
  double dur_to_cut_start = 0.0;

  double v_cut_end = 0.0;
  double dist_cut_end = 0.0;
  double dur_cut_start_to_end = 0.0;

  double v_final = 0.0;
  double dist_total = 0.0;
  double dur_cut_end_to_end = 0.0;

  double ch_offset_final = 0.0;
  int ch_lane_final = -1;
};

// The two-control-point baseline set. The initial challenger speed is the
// constant that covers the preroll distance in five simulation seconds.
struct BaselineParameters
{
  double ego_v0 = 0.0;
  double ch_v0 = 0.0;
  double d0 = 0.0;
  int ch_relative_lane = 1;  // -1 right of ego, +1 left of ego
  double ch_offset0 = 0.0;
  double trigger_distance = 0.0;
  double cut_distance = 0.0;
  double ch_v_final = 0.0;
  double ch_offset_final = 0.0;
};

// Returns the violated-invariant descriptions, empty when p is valid.
std::vector<std::string> validate(const LaneChangeParameters & p);

struct ExtractionConfig
{
  double lane_width = 3.5;
};

LaneChangeParameters extract_4pt(
  const LaneChangeEvent & event, const Trajectory & ego, const Trajectory & challenger,
  const ReferencePath & path, const ExtractionConfig & cfg = {});

BaselineParameters extract_2pt(
  const LaneChangeEvent & event, const Trajectory & ego, const Trajectory & challenger,
  const ReferencePath & path, const ExtractionConfig & cfg = {});

// The baseline set is a projection of the four-point set; the only derived
// field is ch_v0 = dist_cut_start / 5 s.
BaselineParameters to_baseline(const LaneChangeParameters & p);

std::string write_params_json(const std::vector<LaneChangeParameters> & scenarios);
std::vector<LaneChangeParameters> parse_params_json(const std::string & text);

}  // namespace scenkit

#endif  // SCENKIT_PARAMETERS_HPP_
