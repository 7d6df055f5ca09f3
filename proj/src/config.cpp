#include "scenkit/config.hpp"

#include <cmath>
#include <sstream>

#include "scenkit/csv.hpp"
#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

std::string trim(const std::string & s)
{
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config::Config()
{
  values_ = {
    {"lane.width", "3.5"},
    {"lane.count", "3"},
    {"detector.cut_in_threshold", "auto"},   // auto = half lane width
    {"detector.cut_out_threshold", "auto"},  // auto = half lane width
    {"detector.lat_vel_start", "0.2"},
    {"detector.lat_vel_sustain", "0.5"},
    {"detector.settle_eps", "0.3"},
    {"detector.settle_hold", "1.0"},
    {"detector.preroll", "5.0"},
    {"detector.postroll", "5.0"},
    {"detector.refine_anchors", "true"},
    {"cloud.max_height", "0.3"},
    {"cloud.d1_max_deg", "10.0"},
    {"cloud.d2_max_deg", "10.0"},
    {"cloud.intensity_threshold", "0.5"},
    {"cloud.cluster_radius", "1.0"},
    {"cloud.merge_distance", "0.5"},
    {"player.step", "0.01"},
    {"rss.rho", "1.0"},
    {"rss.a_max_accel", "3.5"},
    {"rss.a_min_brake", "4.0"},
    {"rss.a_max_brake", "8.0"},
    {"rss.risky_fraction", "0.5"},
    {"rss.freespace", "true"},
    {"vehicle.length", "4.5"},
    {"vehicle.width", "1.8"},
    {"vehicle.height", "1.5"},
  };
}

void Config::load_file(const std::string & path)
{
  load_text(read_file(path), path);
}

void Config::load_text(const std::string & text, const std::string & origin)
{
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(
        origin + ":" + std::to_string(line_no) + ": expected 'key = value', got: " + stripped);
    }
    set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

void Config::set(const std::string & key, const std::string & value)
{
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ValidationError("unknown config key: " + key);
  }
  it->second = value;
}

std::string Config::get(const std::string & key) const
{
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ValidationError("unknown config key: " + key);
  }
  return it->second;
}

double Config::get_double(const std::string & key) const
{
  const std::string raw = get(key);
  char * end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0') {
    throw ValidationError("config key " + key + " is not a number: " + raw);
  }
  return v;
}

int Config::get_int(const std::string & key) const
{
  return static_cast<int>(std::lround(get_double(key)));
}

bool Config::get_bool(const std::string & key) const
{
  const std::string raw = get(key);
  if (raw == "true" || raw == "1") {
    return true;
  }
  if (raw == "false" || raw == "0") {
    return false;
  }
  throw ValidationError("config key " + key + " is not a boolean: " + raw);
}

DetectorConfig Config::detector() const
{
  DetectorConfig cfg;
  cfg.lane_width = lane_width();
  cfg.cut_in_threshold = get("detector.cut_in_threshold") == "auto"
                           ? cfg.lane_width / 2.0
                           : get_double("detector.cut_in_threshold");
  cfg.cut_out_threshold = get("detector.cut_out_threshold") == "auto"
                            ? cfg.lane_width / 2.0
                            : get_double("detector.cut_out_threshold");
  cfg.lat_vel_start = get_double("detector.lat_vel_start");
  cfg.lat_vel_sustain = get_double("detector.lat_vel_sustain");
  cfg.settle_eps = get_double("detector.settle_eps");
  cfg.settle_hold = get_double("detector.settle_hold");
  cfg.preroll = get_double("detector.preroll");
  cfg.postroll = get_double("detector.postroll");
  cfg.refine_anchors = get_bool("detector.refine_anchors");
  return cfg;
}

RoadSurfaceConfig Config::road_surface() const
{
  RoadSurfaceConfig cfg;
  cfg.max_height = get_double("cloud.max_height");
  cfg.d1_max = get_double("cloud.d1_max_deg") * M_PI / 180.0;
  cfg.d2_max = get_double("cloud.d2_max_deg") * M_PI / 180.0;
  return cfg;
}

RiskConfig Config::risk() const
{
  RiskConfig cfg;
  cfg.rss.rho = get_double("rss.rho");
  cfg.rss.a_max_accel = get_double("rss.a_max_accel");
  cfg.rss.a_min_brake = get_double("rss.a_min_brake");
  cfg.rss.a_max_brake = get_double("rss.a_max_brake");
  cfg.risky_fraction = get_double("rss.risky_fraction");
  cfg.freespace = get_bool("rss.freespace");
  cfg.ego_length = get_double("vehicle.length");
  cfg.challenger_length = get_double("vehicle.length");
  return cfg;
}

ExtractionConfig Config::extraction() const
{
  return {lane_width()};
}

CompilerConfig Config::compiler() const
{
  CompilerConfig cfg;
  cfg.vehicle_length = get_double("vehicle.length");
  cfg.vehicle_width = get_double("vehicle.width");
  cfg.vehicle_height = get_double("vehicle.height");
  return cfg;
}

}  // namespace scenkit
