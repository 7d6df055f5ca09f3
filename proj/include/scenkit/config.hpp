#ifndef SCENKIT_CONFIG_HPP_
#define SCENKIT_CONFIG_HPP_

#include <map>
#include <string>

#include "scenkit/events.hpp"
#include "scenkit/lane_builder.hpp"
#include "scenkit/metrics.hpp"
#include "scenkit/parameters.hpp"
#include "scenkit/scenario.hpp"

namespace scenkit
{

// Flat key/value configuration. Precedence: CLI flag > config file > default.
// Unknown keys are rejected so typos surface instead of silently using a
// default.
class Config
{
public:
  Config();

  void load_file(const std::string & path);
  void load_text(const std::string & text, const std::string & origin);
  void set(const std::string & key, const std::string & value);

  std::string get(const std::string & key) const;
  double get_double(const std::string & key) const;
  int get_int(const std::string & key) const;
  bool get_bool(const std::string & key) const;

  const std::map<std::string, std::string> & effective() const { return values_; }

  double lane_width() const { return get_double("lane.width"); }
  int lane_count() const { return get_int("lane.count"); }
  double player_step() const { return get_double("player.step"); }

  DetectorConfig detector() const;
  RoadSurfaceConfig road_surface() const;
  RiskConfig risk() const;
  ExtractionConfig extraction() const;
  CompilerConfig compiler() const;

private:
  std::map<std::string, std::string> values_;
};

}  // namespace scenkit

#endif  // SCENKIT_CONFIG_HPP_
