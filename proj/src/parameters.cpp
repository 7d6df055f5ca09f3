#include "scenkit/parameters.hpp"

#include <cmath>

#include "json.hpp"
#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

constexpr double kBaselinePrerollSeconds = 5.0;

struct ControlSample
{
  double speed = 0.0;
  double s = 0.0;
  double lateral = 0.0;
  int lane = 0;
};

ControlSample sample_at(
  const Trajectory & traj, const ReferencePath & path, double time, const char * point_name)
{
  if (!traj.covers(time)) {
    throw ValidationError(
      std::string("control point '") + point_name + "' at t=" + std::to_string(time) +
      " lies outside the trajectory data");
  }
  const TrackedState st = traj.at(time);
  const FrenetPose pose = path.to_frenet(st.position);
  return {st.speed, pose.s, pose.t, st.lane_id};
}

}  // namespace

std::vector<std::string> validate(const LaneChangeParameters & p)
{
  std::vector<std::string> issues;
  auto require = [&issues](bool ok, const std::string & what) {
    if (!ok) {
      issues.push_back(what);
    }
  };
  for (const auto & [value, name] : std::initializer_list<std::pair<double, const char *>>{
         {p.ego_v0, "ego_v0"},
         {p.ch_v0, "ch_v0"},
         {p.v_cut_start, "v_cut_start"},
         {p.v_cut_end, "v_cut_end"},
         {p.v_final, "v_final"}}) {
    require(value >= 0.0, std::string(name) + " must be >= 0");
  }
  for (const auto & [value, name] : std::initializer_list<std::pair<double, const char *>>{
         {p.dur_to_cut_start, "dur_to_cut_start"},
         {p.dur_cut_start_to_end, "dur_cut_start_to_end"},
         {p.dur_cut_end_to_end, "dur_cut_end_to_end"}}) {
    require(value > 0.0, std::string(name) + " must be > 0");
  }
  require(p.dist_cut_start > 0.0, "dist_cut_start must be > 0");
  require(p.dist_cut_end > p.dist_cut_start, "dist_cut_end must exceed dist_cut_start");
  require(p.dist_total > p.dist_cut_end, "dist_total must exceed dist_cut_end");
  require(p.cut_distance > 0.0, "cut_distance must be > 0");
  require(
    p.cut_distance <= p.dist_cut_end - p.dist_cut_start + 1e-9,
    "cut_distance must not exceed dist_cut_end - dist_cut_start");
  for (const auto & [lane, name] : std::initializer_list<std::pair<int, const char *>>{
         {p.ego_lane0, "ego_lane0"}, {p.ch_lane0, "ch_lane0"}, {p.ch_lane_final, "ch_lane_final"}}) {
    require(lane <= -1 && lane >= -4, std::string(name) + " must be in {-1..-4}");
  }
  if (p.kind == ScenarioKind::kCutIn) {
    require(p.ch_lane_final == p.ego_lane0, "cut_in requires ch_lane_final == ego_lane0");
  } else {
    require(p.ch_lane_final != p.ego_lane0, "cut_out requires ch_lane_final != ego_lane0");
  }
  return issues;
}

LaneChangeParameters extract_4pt(
  const LaneChangeEvent & event, const Trajectory & ego, const Trajectory & challenger,
  const ReferencePath & path, const ExtractionConfig & cfg)
{
  if (event.truncated) {
    throw ValidationError("cannot extract parameters from a truncated event");
  }
  const ControlSample ego0 = sample_at(ego, path, event.t_scenario_start, "scenario_start(ego)");
  const ControlSample ch0 = sample_at(challenger, path, event.t_scenario_start, "scenario_start");
  const ControlSample cs = sample_at(challenger, path, event.t_cut_start, "cut_start");
  const ControlSample ego_cs = sample_at(ego, path, event.t_cut_start, "cut_start(ego)");
  const ControlSample ce = sample_at(challenger, path, event.t_cut_end, "cut_end");
  const ControlSample end = sample_at(challenger, path, event.t_scenario_end, "scenario_end");
  const TrackedState ch_last = challenger.at(event.t_scenario_end);

  LaneChangeParameters p;
  p.kind = event.kind;
  p.ego_v0 = ego0.speed;
  p.ego_lane0 = ego0.lane;
  p.ch_v0 = ch0.speed;
  p.d0 = ch0.s - ego0.s;
  p.ch_lane0 = ch0.lane;
  p.ch_offset0 = ch0.lateral - lane_center_offset(ch0.lane, ego0.lane, cfg.lane_width);

  p.trigger_distance = cs.s - ego_cs.s;
  p.cut_distance = ce.s - cs.s;

  p.v_cut_start = cs.speed;
  p.dist_cut_start = cs.s - ch0.s;
  p.dur_to_cut_start = event.t_cut_start - event.t_scenario_start;

  p.v_cut_end = ce.speed;
  p.dist_cut_end = ce.s - ch0.s;
  p.dur_cut_start_to_end = event.t_cut_end - event.t_cut_start;

  p.v_final = end.speed;
  p.dist_total = end.s - ch0.s;
  p.dur_cut_end_to_end = event.t_scenario_end - event.t_cut_end;

  p.ch_lane_final = ch_last.lane_id;
  p.ch_offset_final =
    end.lateral - lane_center_offset(p.ch_lane_final, ego0.lane, cfg.lane_width);
  return p;
}

BaselineParameters extract_2pt(
  const LaneChangeEvent & event, const Trajectory & ego, const Trajectory & challenger,
  const ReferencePath & path, const ExtractionConfig & cfg)
{
  return to_baseline(extract_4pt(event, ego, challenger, path, cfg));
}

BaselineParameters to_baseline(const LaneChangeParameters & p)
{
  BaselineParameters b;
  b.ego_v0 = p.ego_v0;
  b.ch_v0 = p.dist_cut_start / kBaselinePrerollSeconds;
  b.d0 = p.d0;
  const int off_ego_lane = p.kind == ScenarioKind::kCutIn ? p.ch_lane0 : p.ch_lane_final;
  b.ch_relative_lane = off_ego_lane > p.ego_lane0 ? 1 : -1;
  b.ch_offset0 = p.ch_offset0;
  b.trigger_distance = p.trigger_distance;
  b.cut_distance = p.cut_distance;
  b.ch_v_final = p.v_final;
  b.ch_offset_final = p.ch_offset_final;
  return b;
}

namespace
{

nlohmann::ordered_json params_to_json(const LaneChangeParameters & p)
{
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind);
  j["ego_v0"] = p.ego_v0;
  j["ego_lane0"] = p.ego_lane0;
  j["ch_v0"] = p.ch_v0;
  j["d0"] = p.d0;
  j["ch_lane0"] = p.ch_lane0;
  j["ch_offset0"] = p.ch_offset0;
  j["trigger_distance"] = p.trigger_distance;
  j["cut_distance"] = p.cut_distance;
  j["v_cut_start"] = p.v_cut_start;
  j["dist_cut_start"] = p.dist_cut_start;
  j["dur_to_cut_start"] = p.dur_to_cut_start;
  j["v_cut_end"] = p.v_cut_end;
  j["dist_cut_end"] = p.dist_cut_end;
  j["dur_cut_start_to_end"] = p.dur_cut_start_to_end;
  j["v_final"] = p.v_final;
  j["dist_total"] = p.dist_total;
  j["dur_cut_end_to_end"] = p.dur_cut_end_to_end;
  j["ch_offset_final"] = p.ch_offset_final;
  j["ch_lane_final"] = p.ch_lane_final;
  return j;
}

LaneChangeParameters params_from_json(const nlohmann::json & j)
{
  LaneChangeParameters p;
  try {
    p.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    p.ego_v0 = j.at("ego_v0").get<double>();
    p.ego_lane0 = j.at("ego_lane0").get<int>();
    p.ch_v0 = j.at("ch_v0").get<double>();
    p.d0 = j.at("d0").get<double>();
    p.ch_lane0 = j.at("ch_lane0").get<int>();
    p.ch_offset0 = j.at("ch_offset0").get<double>();
    p.trigger_distance = j.at("trigger_distance").get<double>();
    p.cut_distance = j.at("cut_distance").get<double>();
    p.v_cut_start = j.at("v_cut_start").get<double>();
    p.dist_cut_start = j.at("dist_cut_start").get<double>();
    p.dur_to_cut_start = j.at("dur_to_cut_start").get<double>();
    p.v_cut_end = j.at("v_cut_end").get<double>();
    p.dist_cut_end = j.at("dist_cut_end").get<double>();
    p.dur_cut_start_to_end = j.at("dur_cut_start_to_end").get<double>();
    p.v_final = j.at("v_final").get<double>();
    p.dist_total = j.at("dist_total").get<double>();
    p.dur_cut_end_to_end = j.at("dur_cut_end_to_end").get<double>();
    p.ch_offset_final = j.at("ch_offset_final").get<double>();
    p.ch_lane_final = j.at("ch_lane_final").get<int>();
  } catch (const nlohmann::json::exception & e) {
    throw ValidationError(std::string("bad scenario parameters: ") + e.what());
  }
  return p;
}

}  // namespace

std::string write_params_json(const std::vector<LaneChangeParameters> & scenarios)
{
  nlohmann::ordered_json doc;
  doc["schema"] = "scenkit-params-1";
  doc["scenarios"] = nlohmann::ordered_json::array();
  for (const auto & p : scenarios) {
    doc["scenarios"].push_back(params_to_json(p));
  }
  return doc.dump(2) + "\n";
}

std::vector<LaneChangeParameters> parse_params_json(const std::string & text)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw ValidationError(std::string("malformed params JSON: ") + e.what());
  }
  if (doc.value("schema", "") != "scenkit-params-1") {
    throw ValidationError("params JSON schema tag is not 'scenkit-params-1'");
  }
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) {
    throw ValidationError("params JSON lacks a 'scenarios' array");
  }
  std::vector<LaneChangeParameters> out;
  for (const auto & j : doc["scenarios"]) {
    out.push_back(params_from_json(j));
  }
  return out;
}

}  // namespace scenkit
