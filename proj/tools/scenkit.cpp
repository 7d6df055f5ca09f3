#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenkit/config.hpp"
#include "scenkit/csv.hpp"
#include "scenkit/errors.hpp"
#include "scenkit/openx.hpp"
#include "scenkit/pipeline.hpp"
#include "scenkit/synth.hpp"
#include "scenkit/variants.hpp"

namespace
{

constexpr const char * kVersion =
  "scenkit 1.0.0 (schemas: scenkit-params-1, scenkit-events-1, scenkit-metrics-1, "
  "scenkit-road-1; OpenSCENARIO 1.1 subset, OpenDRIVE 1.6 subset)";

using scenkit::Config;

struct CommonOpts
{
  std::string config_file;
  std::vector<std::string> overrides;

  Config build() const
  {
    Config cfg;
    if (!config_file.empty()) {
      cfg.load_file(config_file);
    }
    for (const auto & kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw scenkit::ValidationError("--set expects key=value, got: " + kv);
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

void add_common(CLI::App * cmd, CommonOpts & opts)
{
  cmd->add_option("--config", opts.config_file, "flat key=value config file");
  cmd->add_option("--set", opts.overrides, "override a config key (key=value), repeatable");
}

void write_run_meta(
  const std::string & out_dir, const std::string & command, const Config & cfg,
  const std::map<std::string, std::string> & extra)
{
  nlohmann::ordered_json meta;
  meta["command"] = command;
  meta["version"] = kVersion;
  for (const auto & [k, v] : extra) {
    meta[k] = v;
  }
  meta["config"] = nlohmann::ordered_json::object();
  for (const auto & [k, v] : cfg.effective()) {
    meta["config"][k] = v;
  }
  scenkit::write_file(
    (std::filesystem::path(out_dir) / "run_meta.json").string(), meta.dump(2) + "\n");
}

std::string write_road_json(const scenkit::RoadSpec & road)
{
  nlohmann::ordered_json j;
  j["schema"] = "scenkit-road-1";
  j["length"] = road.length;
  j["lane_count"] = road.lane_count;
  j["lane_width"] = road.lane_width;
  return j.dump(2) + "\n";
}

scenkit::RoadSpec parse_road_json(const std::string & text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw scenkit::ValidationError(std::string("malformed road JSON: ") + e.what());
  }
  if (j.value("schema", "") != "scenkit-road-1") {
    throw scenkit::ValidationError("road JSON schema tag is not 'scenkit-road-1'");
  }
  scenkit::RoadSpec road;
  road.length = j.at("length").get<double>();
  road.lane_count = j.at("lane_count").get<int>();
  road.lane_width = j.at("lane_width").get<double>();
  return road;
}

nlohmann::ordered_json truth_json(const scenkit::SynthScenario & scen)
{
  nlohmann::ordered_json truth;
  truth["schema"] = "scenkit-truth-1";
  truth["true_cut_start"] = scen.true_cut_start;
  truth["true_cut_end"] = scen.true_cut_end;
  truth["road"] = nlohmann::ordered_json::parse(write_road_json(scen.road));
  truth["authored"] = nlohmann::ordered_json::parse(
    scenkit::write_params_json({scen.authored}))["scenarios"][0];
  return truth;
}

std::string scenario_suffix(std::size_t index)
{
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", index);
  return buf;
}

int run_extract(
  const CommonOpts & common, const std::string & tracks_path, const std::string & cloud_path,
  const std::string & out_dir)
{
  const Config cfg = common.build();
  const scenkit::TrackSet tracks = scenkit::parse_tracks_csv(scenkit::read_file(tracks_path));
  const scenkit::ExtractionOutput result = scenkit::run_extraction(tracks, cfg);

  namespace fs = std::filesystem;
  scenkit::write_file((fs::path(out_dir) / "events.json").string(),
                      scenkit::write_events_json(result.events));
  scenkit::write_file((fs::path(out_dir) / "params.json").string(),
                      scenkit::write_params_json(result.scenarios));

  std::map<std::string, std::string> extra{{"tracks", tracks_path}};
  if (!cloud_path.empty()) {
    const auto cloud = scenkit::parse_cloud_csv(scenkit::read_file(cloud_path));
    const auto road_points = scenkit::segment_road_surface(cloud, cfg.road_surface());
    const auto segments = scenkit::cluster_markings(
      road_points, cfg.get_double("cloud.intensity_threshold"),
      cfg.get_double("cloud.cluster_radius"));
    const auto merged = scenkit::merge_lines(segments, cfg.get_double("cloud.merge_distance"));
    const scenkit::LaneModel lanes = scenkit::build_lane_model(merged);
    scenkit::RoadSpec road;
    road.lane_count = lanes.lane_count;
    road.lane_width = scenkit::quantize(lanes.lane_width);
    double max_len = 0.0;
    for (const auto & m : lanes.markings) {
      max_len = std::max(max_len, m.length());
    }
    road.length = std::max(1000.0, std::ceil(max_len / 50.0) * 50.0);
    scenkit::write_file((fs::path(out_dir) / "road.json").string(), write_road_json(road));
    extra["cloud"] = cloud_path;
  }
  write_run_meta(out_dir, "extract", cfg, extra);
  std::printf(
    "extracted %zu event(s), %zu complete scenario(s)\n", result.events.size(),
    result.scenarios.size());
  return 0;
}

int run_generate(
  const CommonOpts & common, const std::string & params_path, const std::string & model,
  const std::string & road_path, const std::string & out_dir)
{
  const Config cfg = common.build();
  const auto scenarios = scenkit::parse_params_json(scenkit::read_file(params_path));
  if (scenarios.empty()) {
    throw scenkit::ValidationError("params JSON contains no scenarios");
  }
  namespace fs = std::filesystem;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto & p = scenarios[i];
    scenkit::RoadSpec road = road_path.empty()
                               ? scenkit::default_road_for(p, cfg.lane_width(), cfg.lane_count())
                               : parse_road_json(scenkit::read_file(road_path));
    scenkit::ScenarioDocument doc;
    if (model == "4pt") {
      doc = scenkit::compile_4pt(p, road, cfg.compiler());
    } else if (model == "2pt") {
      doc = scenkit::compile_2pt(scenkit::to_baseline(p), road, p.kind, cfg.compiler());
    } else {
      throw scenkit::ValidationError("--model must be 4pt or 2pt, got: " + model);
    }
    const std::string suffix = scenario_suffix(i);
    scenkit::write_file(
      (fs::path(out_dir) / ("scenario_" + suffix + ".xosc")).string(), scenkit::write_xosc(doc));
    scenkit::write_file(
      (fs::path(out_dir) / ("road_" + suffix + ".xodr")).string(), scenkit::write_xodr(road));
  }
  write_run_meta(out_dir, "generate", cfg, {{"params", params_path}, {"model", model}});
  std::printf("generated %zu scenario file pair(s)\n", scenarios.size());
  return 0;
}

int run_play(
  const CommonOpts & common, const std::string & xosc_path, const std::string & xodr_path,
  double step, const std::string & out_path)
{
  const Config cfg = common.build();
  scenkit::ScenarioDocument doc = scenkit::parse_xosc(scenkit::read_file(xosc_path));
  doc.road = scenkit::parse_xodr(scenkit::read_file(xodr_path));
  const double effective_step = step > 0.0 ? step : cfg.player_step();
  const scenkit::PlaybackTrace trace = scenkit::play(doc, effective_step);
  scenkit::write_file(out_path, scenkit::write_trace_csv(trace));

  nlohmann::ordered_json meta;
  meta["command"] = "play";
  meta["version"] = kVersion;
  meta["step"] = effective_step;
  meta["stop_reason"] = trace.stop_reason;
  meta["config"] = nlohmann::ordered_json::object();
  for (const auto & [k, v] : cfg.effective()) {
    meta["config"][k] = v;
  }
  scenkit::write_file(out_path + ".meta.json", meta.dump(2) + "\n");

  if (!trace.unfired.empty()) {
    std::fprintf(stderr, "warning: playback ended with unfired events:");
    for (const auto & name : trace.unfired) {
      std::fprintf(stderr, " %s", name.c_str());
    }
    std::fprintf(stderr, " (stop reason: %s)\n", trace.stop_reason.c_str());
  }
  std::printf("played %.2f s at step %.3f s -> %s\n", trace.end_time(), effective_step,
              out_path.c_str());
  return 0;
}

int run_evaluate(
  const CommonOpts & common, const std::string & real_path, const std::string & trace_path,
  const std::string & event_path, std::size_t event_index, const std::string & out_path)
{
  const Config cfg = common.build();
  const scenkit::TrackSet tracks = scenkit::parse_tracks_csv(scenkit::read_file(real_path));
  const auto events = scenkit::parse_events_json(scenkit::read_file(event_path));
  if (event_index >= events.size()) {
    throw scenkit::ValidationError("event index out of range");
  }
  const scenkit::PlaybackTrace trace = scenkit::parse_trace_csv(scenkit::read_file(trace_path));
  const scenkit::EvaluationOutput result =
    scenkit::run_evaluation(tracks, events[event_index], trace, cfg);
  scenkit::write_file(
    out_path, scenkit::write_metrics_json(
                result.rmse_s, result.rmse_t, result.risk, cfg.risk(), cfg.effective()));
  std::printf(
    "rmse_s=%.3f m rmse_t=%.3f m risky=%s violation_fraction=%.3f\n", result.rmse_s,
    result.rmse_t, result.risk.risky ? "true" : "false", result.risk.violation_fraction);
  return 0;
}

int run_perturb(
  const CommonOpts & common, const std::string & params_path, std::size_t index,
  const std::string & deltas_text, const std::string & out_dir)
{
  const Config cfg = common.build();
  const auto scenarios = scenkit::parse_params_json(scenkit::read_file(params_path));
  if (index >= scenarios.size()) {
    throw scenkit::ValidationError("scenario index out of range");
  }
  std::vector<double> deltas;
  {
    std::istringstream in(deltas_text);
    std::string field;
    while (std::getline(in, field, ',')) {
      char * end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str()) {
        throw scenkit::ValidationError("bad delta value: " + field);
      }
      deltas.push_back(v);
    }
  }
  const scenkit::SweepResult result = scenkit::sweep(scenarios[index], deltas);
  for (const auto & note : result.skipped) {
    std::fprintf(stderr, "skipped: %s\n", note.c_str());
  }
  namespace fs = std::filesystem;
  const scenkit::RoadSpec road =
    scenkit::default_road_for(scenarios[index], cfg.lane_width(), cfg.lane_count());
  scenkit::write_file((fs::path(out_dir) / "road.xodr").string(), scenkit::write_xodr(road));
  for (const auto & entry : result.variants) {
    char label[32];
    std::snprintf(label, sizeof(label), "%+g", entry.delta);
    scenkit::write_file(
      (fs::path(out_dir) / (std::string("params_") + label + ".json")).string(),
      scenkit::write_params_json({entry.params}));
    const auto doc = scenkit::compile_4pt(entry.params, road, cfg.compiler());
    scenkit::write_file(
      (fs::path(out_dir) / (std::string("scenario_") + label + ".xosc")).string(),
      scenkit::write_xosc(doc));
  }
  write_run_meta(out_dir, "perturb", cfg, {{"params", params_path}, {"deltas", deltas_text}});
  std::printf(
    "wrote %zu variant(s), skipped %zu\n", result.variants.size(), result.skipped.size());
  return 0;
}

int run_synth(
  const CommonOpts & common, const std::string & profile, std::uint64_t seed,
  const std::string & out_dir)
{
  const Config cfg = common.build();
  namespace fs = std::filesystem;
  std::map<std::string, std::string> extra{
    {"profile", profile}, {"seed", std::to_string(seed)}};

  if (profile == "lanekeep") {
    const scenkit::TrackSet tracks = scenkit::synth_lane_keeping(seed);
    scenkit::write_file(
      (fs::path(out_dir) / "tracks.csv").string(), scenkit::write_tracks_csv(tracks));
  } else if (profile == "fixture") {
    const auto p = scenkit::fixture_params();
    scenkit::write_file(
      (fs::path(out_dir) / "params.json").string(), scenkit::write_params_json({p}));
    scenkit::write_file(
      (fs::path(out_dir) / "road.json").string(), write_road_json(scenkit::fixture_road()));
  } else {
    scenkit::SynthScenario scen;
    if (profile == "cutin_basic") {
      scen = scenkit::synth_played_scenario(scenkit::ScenarioKind::kCutIn, seed);
    } else if (profile == "cutout_basic") {
      scen = scenkit::synth_played_scenario(scenkit::ScenarioKind::kCutOut, seed);
    } else if (profile == "cutin_kinematic") {
      scen = scenkit::synth_kinematic_scenario(scenkit::ScenarioKind::kCutIn, seed, false);
    } else if (profile == "cutout_kinematic") {
      scen = scenkit::synth_kinematic_scenario(scenkit::ScenarioKind::kCutOut, seed, false);
    } else if (profile == "cutin_preroll") {
      scen = scenkit::synth_kinematic_scenario(scenkit::ScenarioKind::kCutIn, seed, true);
    } else if (profile == "cutout_preroll") {
      scen = scenkit::synth_kinematic_scenario(scenkit::ScenarioKind::kCutOut, seed, true);
    } else {
      throw scenkit::ValidationError(
        "unknown profile: " + profile +
        " (expected cutin_basic, cutout_basic, cutin_kinematic, cutout_kinematic, "
        "cutin_preroll, cutout_preroll, lanekeep, fixture)");
    }
    scenkit::write_file(
      (fs::path(out_dir) / "tracks.csv").string(), scenkit::write_tracks_csv(scen.tracks));
    scenkit::write_file(
      (fs::path(out_dir) / "truth.json").string(), truth_json(scen).dump(2) + "\n");
  }
  write_run_meta(out_dir, "synth", cfg, extra);
  std::printf("synthesized profile %s (seed %llu) -> %s\n", profile.c_str(),
              static_cast<unsigned long long>(seed), out_dir.c_str());
  return 0;
}

int run_synth_cloud(
  const CommonOpts & common, std::uint64_t seed, double sigma, const std::string & out_path)
{
  const Config cfg = common.build();
  const scenkit::CloudTruth truth = scenkit::synth_marking_cloud(seed, sigma);
  scenkit::write_file(out_path, scenkit::write_cloud_csv(truth.cloud));
  nlohmann::ordered_json meta;
  meta["command"] = "synth-cloud";
  meta["version"] = kVersion;
  meta["seed"] = seed;
  meta["sigma"] = sigma;
  meta["marking_y"] = truth.marking_y;
  meta["config"] = nlohmann::ordered_json::object();
  for (const auto & [k, v] : cfg.effective()) {
    meta["config"][k] = v;
  }
  scenkit::write_file(out_path + ".meta.json", meta.dump(2) + "\n");
  std::printf("wrote %zu cloud points -> %s\n", truth.cloud.size(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"scenkit: lane-change scenario extraction, generation, and evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts extract_opts;
  std::string tracks_path;
  std::string cloud_path;
  std::string extract_out;
  auto * extract = app.add_subcommand("extract", "detect events and extract parameters");
  extract->add_option("--tracks", tracks_path, "trajectory log CSV")->required();
  extract->add_option("--cloud", cloud_path, "optional point cloud CSV for the lane model");
  extract->add_option("--out", extract_out, "output directory")->required();
  add_common(extract, extract_opts);

  CommonOpts gen_opts;
  std::string gen_params;
  std::string gen_model = "4pt";
  std::string gen_road;
  std::string gen_out;
  auto * generate = app.add_subcommand("generate", "compile parameters into .xosc/.xodr");
  generate->add_option("--params", gen_params, "params JSON")->required();
  generate->add_option("--model", gen_model, "4pt or 2pt");
  generate->add_option("--road", gen_road, "road JSON (defaults to a fitted road)");
  generate->add_option("--out", gen_out, "output directory")->required();
  add_common(generate, gen_opts);

  CommonOpts play_opts;
  std::string play_xosc;
  std::string play_xodr;
  double play_step = 0.0;
  std::string play_out;
  auto * play_cmd = app.add_subcommand("play", "run a scenario deterministically");
  play_cmd->add_option("--xosc", play_xosc, "scenario file")->required();
  play_cmd->add_option("--xodr", play_xodr, "road file")->required();
  play_cmd->add_option("--step", play_step, "integration step in seconds");
  play_cmd->add_option("--out", play_out, "trace CSV path")->required();
  add_common(play_cmd, play_opts);

  CommonOpts eval_opts;
  std::string eval_real;
  std::string eval_trace;
  std::string eval_event;
  std::size_t eval_index = 0;
  std::string eval_out;
  auto * evaluate = app.add_subcommand("evaluate", "RMSE similarity and RSS risk");
  evaluate->add_option("--real", eval_real, "real tracks CSV")->required();
  evaluate->add_option("--trace", eval_trace, "generated trace CSV")->required();
  evaluate->add_option("--event", eval_event, "events JSON from extract")->required();
  evaluate->add_option("--event-index", eval_index, "event to evaluate (default 0)");
  evaluate->add_option("--out", eval_out, "metrics JSON path")->required();
  add_common(evaluate, eval_opts);

  CommonOpts perturb_opts;
  std::string perturb_params;
  std::size_t perturb_index = 0;
  std::string perturb_deltas = "-2,0,2,4";
  std::string perturb_out;
  auto * perturb = app.add_subcommand("perturb", "velocity-perturbed scenario variants");
  perturb->add_option("--params", perturb_params, "params JSON")->required();
  perturb->add_option("--index", perturb_index, "scenario index (default 0)");
  perturb->add_option("--deltas", perturb_deltas, "comma-separated m/s deltas");
  perturb->add_option("--out", perturb_out, "output directory")->required();
  add_common(perturb, perturb_opts);

  CommonOpts synth_opts;
  std::string synth_profile = "cutin_basic";
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  auto * synth = app.add_subcommand("synth", "deterministic synthetic corpus");
  synth->add_option("--profile", synth_profile, "corpus profile");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output directory")->required();
  add_common(synth, synth_opts);

  CommonOpts cloud_opts;
  std::uint64_t cloud_seed = 1;
  double cloud_sigma = 0.05;
  std::string cloud_out;
  auto * synth_cloud = app.add_subcommand("synth-cloud", "synthetic lane-marking point cloud");
  synth_cloud->add_option("--seed", cloud_seed, "random seed");
  synth_cloud->add_option("--sigma", cloud_sigma, "lateral noise sigma in meters");
  synth_cloud->add_option("--out", cloud_out, "cloud CSV path")->required();
  add_common(synth_cloud, cloud_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed()) {
      return run_extract(extract_opts, tracks_path, cloud_path, extract_out);
    }
    if (generate->parsed()) {
      return run_generate(gen_opts, gen_params, gen_model, gen_road, gen_out);
    }
    if (play_cmd->parsed()) {
      return run_play(play_opts, play_xosc, play_xodr, play_step, play_out);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_opts, eval_real, eval_trace, eval_event, eval_index, eval_out);
    }
    if (perturb->parsed()) {
      return run_perturb(perturb_opts, perturb_params, perturb_index, perturb_deltas, perturb_out);
    }
    if (synth->parsed()) {
      return run_synth(synth_opts, synth_profile, synth_seed, synth_out);
    }
    if (synth_cloud->parsed()) {
      return run_synth_cloud(cloud_opts, cloud_seed, cloud_sigma, cloud_out);
    }
  } catch (const scenkit::ValidationError & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const scenkit::IoError & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
