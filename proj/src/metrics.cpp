#include "scenkit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "scenkit/errors.hpp"
#include "scenkit/scenario.hpp"

namespace scenkit
{

double rmse(const AlignedPair & pair, Axis axis)
{
  if (pair.n == 0 || pair.real.size() != pair.n || pair.gen.size() != pair.n) {
    throw ValidationError("aligned pair is empty or inconsistent");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < pair.n; ++k) {
    const double real = axis == Axis::kLongitudinal ? pair.real[k].s : pair.real[k].t;
    const double gen = axis == Axis::kLongitudinal ? pair.gen[k].s : pair.gen[k].t;
    const double d = real - gen;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pair.n));
}

double rss_d_min(double v_rear, double v_front, const RssParameters & p)
{
  const double reach = v_rear + p.rho * p.a_max_accel;
  const double raw = v_rear * p.rho + 0.5 * p.a_max_accel * p.rho * p.rho +
                     reach * reach / (2.0 * p.a_min_brake) -
                     v_front * v_front / (2.0 * p.a_max_brake);
  return std::max(0.0, raw);
}

RiskReport risk_report(const PlaybackTrace & trace, const RiskConfig & cfg)
{
  const double fire = trace.lane_change_fire_time();
  if (fire < 0.0) {
    throw ValidationError("risk report not applicable: the lane change never fired");
  }
  const std::size_t ego_idx = trace.index_of(kEgoName);
  const std::size_t ch_idx = trace.index_of(kChallengerName);
  const double bumper =
    cfg.freespace ? 0.5 * (cfg.ego_length + cfg.challenger_length) : 0.0;

  RiskReport report;
  std::size_t violations = 0;
  for (double t = fire; t <= trace.end_time() + 1e-9; t += 1.0) {
    const double clamped = std::min(t, trace.end_time());
    const TraceSample ego = trace.state_at(ego_idx, clamped);
    const TraceSample ch = trace.state_at(ch_idx, clamped);
    RiskRecord rec;
    rec.time = t;
    rec.gap = ch.s - ego.s - bumper;
    rec.d_min = rss_d_min(ego.speed, ch.speed, cfg.rss);
    rec.violating = rec.gap < rec.d_min;
    violations += rec.violating ? 1 : 0;
    report.per_second.push_back(rec);
  }
  if (report.per_second.empty()) {
    throw ValidationError("risk window is empty");
  }
  report.violation_fraction =
    static_cast<double>(violations) / static_cast<double>(report.per_second.size());
  report.risky = report.violation_fraction > cfg.risky_fraction;
  return report;
}

AlignedPair build_aligned_pair(
  const LaneChangeEvent & event, const Trajectory & challenger, const ReferencePath & path,
  const PlaybackTrace & trace, double lane_width)
{
  const double fire = trace.lane_change_fire_time();
  if (fire < 0.0) {
    throw ValidationError("cannot align: the generated lane change never fired");
  }
  const std::size_t ego_idx = trace.index_of(kEgoName);
  const std::size_t ch_idx = trace.index_of(kChallengerName);
  const int gen_ego_lane = trace.samples[ego_idx].front().lane;
  const double gen_center = (gen_ego_lane + 0.5) * lane_width;

  AlignedPair pair;
  const FrenetPose real_anchor = path.to_frenet(challenger.at(event.t_cut_start).position);
  for (double t = event.t_cut_start; t <= event.t_scenario_end + 1e-9; t += 1.0) {
    const double clamped = std::min(t, event.t_scenario_end);
    if (!challenger.covers(clamped)) {
      break;
    }
    const FrenetPose pose = path.to_frenet(challenger.at(clamped).position);
    pair.real.push_back({pose.s - real_anchor.s, pose.t});
  }
  const double gen_anchor_s = trace.state_at(ch_idx, fire).s;
  for (double t = fire; t <= trace.end_time() + 1e-9; t += 1.0) {
    const double clamped = std::min(t, trace.end_time());
    const TraceSample ch = trace.state_at(ch_idx, clamped);
    pair.gen.push_back({ch.s - gen_anchor_s, ch.t - gen_center});
  }
  pair.n = std::min(pair.real.size(), pair.gen.size());
  if (pair.n == 0) {
    throw ValidationError("aligned pair is empty");
  }
  pair.real.resize(pair.n);
  pair.gen.resize(pair.n);
  return pair;
}

std::string write_metrics_json(
  double rmse_s, double rmse_t, const RiskReport & report, const RiskConfig & cfg,
  const std::map<std::string, std::string> & effective_config)
{
  nlohmann::ordered_json doc;
  doc["schema"] = "scenkit-metrics-1";
  doc["rmse_s"] = rmse_s;
  doc["rmse_t"] = rmse_t;
  doc["risky"] = report.risky;
  doc["violation_fraction"] = report.violation_fraction;
  doc["per_second"] = nlohmann::ordered_json::array();
  for (const auto & rec : report.per_second) {
    nlohmann::ordered_json r;
    r["time"] = rec.time;
    r["d_min"] = rec.d_min;
    r["gap"] = rec.gap;
    r["violating"] = rec.violating;
    doc["per_second"].push_back(r);
  }
  doc["rss_constants"] = {
    {"rho", cfg.rss.rho},
    {"a_max_accel", cfg.rss.a_max_accel},
    {"a_min_brake", cfg.rss.a_min_brake},
    {"a_max_brake", cfg.rss.a_max_brake},
  };
  doc["config"] = nlohmann::ordered_json::object();
  for (const auto & [key, value] : effective_config) {
    doc["config"][key] = value;
  }
  return doc.dump(2) + "\n";
}

}  // namespace scenkit
