#include "scenkit/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "scenkit/errors.hpp"

namespace scenkit
{

ReferencePath ego_reference_path(const Trajectory & ego)
{
  std::vector<CartesianPoint> points;
  points.reserve(ego.size());
  for (const auto & st : ego.states()) {
    points.push_back(st.position);
  }
  return ReferencePath::from_points(std::move(points));
}

const Trajectory & find_challenger(const TrackSet & tracks, const std::string & object_id)
{
  for (const auto & traj : tracks.others) {
    if (!traj.empty() && traj.object_id() == object_id) {
      return traj;
    }
  }
  throw ValidationError("tracks contain no object with id " + object_id);
}

ExtractionOutput run_extraction(const TrackSet & tracks, const Config & cfg)
{
  if (tracks.ego.empty()) {
    throw ValidationError("extraction needs ego rows in the tracks");
  }
  const ReferencePath path = ego_reference_path(tracks.ego);
  ExtractionOutput out;
  out.events = detect_events(tracks.ego, tracks.others, path, cfg.detector());
  for (const auto & event : out.events) {
    if (event.truncated) {
      continue;
    }
    const Trajectory & challenger = find_challenger(tracks, event.challenger_id);
    out.scenarios.push_back(
      extract_4pt(event, tracks.ego, challenger, path, cfg.extraction()));
  }
  return out;
}

EvaluationOutput run_evaluation(
  const TrackSet & tracks, const LaneChangeEvent & event, const PlaybackTrace & trace,
  const Config & cfg)
{
  const ReferencePath path = ego_reference_path(tracks.ego);
  const Trajectory & challenger = find_challenger(tracks, event.challenger_id);
  const AlignedPair pair =
    build_aligned_pair(event, challenger, path, trace, cfg.lane_width());
  EvaluationOutput out;
  out.rmse_s = rmse(pair, Axis::kLongitudinal);
  out.rmse_t = rmse(pair, Axis::kLateral);
  out.risk = risk_report(trace, cfg.risk());
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> & fn)
{
  if (n == 0) {
    return;
  }
  const std::size_t workers =
    std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::min<std::size_t>(n, 8));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) {
          return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto & t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace scenkit
