#ifndef SCENKIT_METRICS_HPP_
#define SCENKIT_METRICS_HPP_

#include <map>
#include <string>
#include <vector>

#include "scenkit/events.hpp"
#include "scenkit/geometry.hpp"
#include "scenkit/player.hpp"

namespace scenkit
{

// 1 Hz series of real and generated poses, both anchored at their own
// maneuver start: longitudinal values are displacements since the anchor,
// lateral values are offsets from the ego lane center.
struct AlignedPair
{
  std::vector<FrenetPose> real;
  std::vector<FrenetPose> gen;
  std::size_t n = 0;
};

enum class Axis
{
  kLongitudinal,
  kLateral,
};

double rmse(const AlignedPair & pair, Axis axis);

// Dynamics constants of the longitudinal safe-distance model.
struct RssParameters
{
  double rho = 1.0;          // s, rear vehicle response time
  double a_max_accel = 3.5;  // m/s^2, worst-case acceleration during rho
  double a_min_brake = 4.0;  // m/s^2, rear vehicle's guaranteed braking
  double a_max_brake = 8.0;  // m/s^2, front vehicle's strongest braking
};

// Minimum longitudinal gap the rear vehicle must keep; clamped at zero.
double rss_d_min(double v_rear, double v_front, const RssParameters & p);

struct RiskRecord
{
  double time = 0.0;
  double d_min = 0.0;
  double gap = 0.0;
  bool violating = false;
};

struct RiskReport
{
  std::vector<RiskRecord> per_second;
  double violation_fraction = 0.0;
  bool risky = false;
};

struct RiskConfig
{
  RssParameters rss;
  double risky_fraction = 0.5;  // "for a long time" quantified
  bool freespace = true;        // bumper-to-bumper gap via half-lengths
  double ego_length = 4.5;
  double challenger_length = 4.5;
};

// Per-second verdicts from the lane change fire to the end of the trace,
// with the challenger as the front vehicle.
RiskReport risk_report(const PlaybackTrace & trace, const RiskConfig & cfg = {});

// Real side: challenger poses against the ego path, anchored at the event's
// cut start, until the scenario end. Generated side: trace poses anchored at
// the lane change fire time. Truncated to the common length.
AlignedPair build_aligned_pair(
  const LaneChangeEvent & event, const Trajectory & challenger, const ReferencePath & path,
  const PlaybackTrace & trace, double lane_width);

std::string write_metrics_json(
  double rmse_s, double rmse_t, const RiskReport & report, const RiskConfig & cfg,
  const std::map<std::string, std::string> & effective_config);

}  // namespace scenkit

#endif  // SCENKIT_METRICS_HPP_
