#ifndef SCENKIT_EVENTS_HPP_
#define SCENKIT_EVENTS_HPP_

#include <string>
#include <vector>

#include "scenkit/geometry.hpp"

namespace scenkit
{

enum class ScenarioKind
{
  kCutIn,
  kCutOut,
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string & text);

// The four control-point timestamps of a detected lane change.
struct LaneChangeEvent
{
  ScenarioKind kind = ScenarioKind::kCutIn;
  std::string challenger_id;
  double t_scenario_start = 0.0;
  double t_cut_start = 0.0;
  double t_cut_end = 0.0;
  double t_scenario_end = 0.0;
  bool truncated = false;
};

struct DetectorConfig
{
  double lane_width = 3.5;
  double cut_in_threshold = 1.75;   // |t| below this counts as in the ego lane
  double cut_out_threshold = 1.75;  // |t| above this counts as having left it
  double lat_vel_start = 0.2;       // m/s that marks lateral motion
  double lat_vel_sustain = 0.5;     // s the motion must persist
  double settle_eps = 0.3;          // m band around the target lane center
  double settle_hold = 1.0;         // s the band must hold
  double preroll = 5.0;             // s before cut start
  double postroll = 5.0;            // s after cut end
  // Refine cut start/end by fitting the lateral ramp shape (linear or
  // sinusoidal in s-progress); the threshold rules above seed the fit.
  bool refine_anchors = true;
};

// Lateral position of a lane center relative to the ego path, assuming the
// ego drives its lane center. Lane ids grow toward the left (-1 leftmost).
double lane_center_offset(int lane_id, int ego_lane_id, double lane_width);

// Scans every challenger at 1 Hz for lane/lateral transitions against the
// ego path, then refines cut start/end at the native sample rate.
std::vector<LaneChangeEvent> detect_events(
  const Trajectory & ego, const std::vector<Trajectory> & others, const ReferencePath & path,
  const DetectorConfig & cfg);

std::string write_events_json(const std::vector<LaneChangeEvent> & events);
std::vector<LaneChangeEvent> parse_events_json(const std::string & text);

}  // namespace scenkit

#endif  // SCENKIT_EVENTS_HPP_
