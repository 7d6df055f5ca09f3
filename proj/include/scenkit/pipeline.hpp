#ifndef SCENKIT_PIPELINE_HPP_
#define SCENKIT_PIPELINE_HPP_

#include <functional>
#include <vector>

#include "scenkit/config.hpp"
#include "scenkit/csv.hpp"
#include "scenkit/events.hpp"
#include "scenkit/metrics.hpp"
#include "scenkit/parameters.hpp"
#include "scenkit/player.hpp"

namespace scenkit
{

ReferencePath ego_reference_path(const Trajectory & ego);

const Trajectory & find_challenger(const TrackSet & tracks, const std::string & object_id);

struct ExtractionOutput
{
  std::vector<LaneChangeEvent> events;          // every event, truncated included
  std::vector<LaneChangeParameters> scenarios;  // extracted from complete events
};

ExtractionOutput run_extraction(const TrackSet & tracks, const Config & cfg);

struct EvaluationOutput
{
  double rmse_s = 0.0;
  double rmse_t = 0.0;
  RiskReport risk;
};

EvaluationOutput run_evaluation(
  const TrackSet & tracks, const LaneChangeEvent & event, const PlaybackTrace & trace,
  const Config & cfg);

// Runs fn(0..n-1) on a small worker pool; rethrows the first failure.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> & fn);

}  // namespace scenkit

#endif  // SCENKIT_PIPELINE_HPP_
