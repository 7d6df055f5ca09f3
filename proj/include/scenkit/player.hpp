#ifndef SCENKIT_PLAYER_HPP_
#define SCENKIT_PLAYER_HPP_

#include <string>
#include <vector>

#include "scenkit/scenario.hpp"

namespace scenkit
{

struct TraceSample
{
  double time = 0.0;
  double s = 0.0;
  double t = 0.0;
  double speed = 0.0;
  int lane = -1;
};

struct FiredEvent
{
  std::string name;
  double time = 0.0;
};

struct PlaybackTrace
{
  double step = 0.01;
  std::vector<std::string> entities;                // Ego, Challenger
  std::vector<std::vector<TraceSample>> samples;    // one series per entity
  std::vector<FiredEvent> fired;
  std::vector<std::string> unfired;                 // events still pending at stop
  double stop_time = 0.0;
  std::string stop_reason;                          // "traveled_distance" | "timeout"

  std::size_t index_of(const std::string & entity) const;
  double end_time() const;
  // Linear interpolation between grid samples.
  TraceSample state_at(std::size_t entity_idx, double time) const;
  // Fire time of the first event whose name contains "lane_change"; negative
  // when it never fired.
  double lane_change_fire_time() const;
};

// Deterministic fixed-step playback. Conditions are latched rising-edge:
// a condition fires the first time its predicate turns true after having
// been false, at the in-step crossing instant (linear interpolation).
// Speed ramps are linear in time; lane changes follow a sinusoidal lateral
// profile as a function of s-progress and flip lane_id at the half-crossing.
PlaybackTrace play(const ScenarioDocument & doc, double step = 0.01);

std::string write_trace_csv(const PlaybackTrace & trace);
PlaybackTrace parse_trace_csv(const std::string & text);

}  // namespace scenkit

#endif  // SCENKIT_PLAYER_HPP_
