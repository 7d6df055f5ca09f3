#include "scenkit/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

std::vector<std::string> split_fields(const std::string & line)
{
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

double parse_double_field(const std::string & raw, const std::string & line)
{
  char * end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str()) {
    throw ValidationError("non-numeric CSV field '" + raw + "' in row: " + line);
  }
  return v;
}

}  // namespace

std::string write_tracks_csv(const TrackSet & tracks)
{
  std::string out = "time_s,object_id,x_m,y_m,speed_mps,lane_id,is_ego\n";
  char buf[200];
  auto append = [&](const Trajectory & traj) {
    for (const TrackedState & st : traj.states()) {
      std::snprintf(
        buf, sizeof(buf), "%.6f,%s,%.6f,%.6f,%.6f,%d,%d\n", st.time, st.object_id.c_str(),
        st.position.x, st.position.y, st.speed, st.lane_id, st.is_ego ? 1 : 0);
      out += buf;
    }
  };
  if (!tracks.ego.empty()) {
    append(tracks.ego);
  }
  for (const auto & t : tracks.others) {
    append(t);
  }
  return out;
}

TrackSet parse_tracks_csv(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "time_s,object_id,x_m,y_m,speed_mps,lane_id,is_ego") {
    throw ValidationError("tracks CSV must start with the header "
                          "'time_s,object_id,x_m,y_m,speed_mps,lane_id,is_ego'");
  }
  std::map<std::string, std::vector<TrackedState>> by_object;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 7) {
      throw ValidationError("tracks CSV row does not have 7 fields: " + line);
    }
    TrackedState st;
    st.time = parse_double_field(fields[0], line);
    st.object_id = fields[1];
    st.position.x = parse_double_field(fields[2], line);
    st.position.y = parse_double_field(fields[3], line);
    st.speed = parse_double_field(fields[4], line);
    st.lane_id = static_cast<int>(parse_double_field(fields[5], line));
    st.is_ego = fields[6] == "1" || fields[6] == "true";
    if (st.speed < 0.0) {
      throw ValidationError("tracks CSV row has negative speed: " + line);
    }
    if (st.lane_id > -1 || st.lane_id < -4) {
      throw ValidationError("tracks CSV row has lane_id outside {-1..-4}: " + line);
    }
    if (!by_object.count(st.object_id)) {
      order.push_back(st.object_id);
    }
    by_object[st.object_id].push_back(st);
  }
  TrackSet set;
  for (const auto & id : order) {
    Trajectory traj(std::move(by_object[id]));
    if (traj.states().front().is_ego) {
      if (!set.ego.empty()) {
        throw ValidationError("tracks CSV contains more than one ego object");
      }
      set.ego = std::move(traj);
    } else {
      set.others.push_back(std::move(traj));
    }
  }
  if (set.ego.empty()) {
    throw ValidationError("tracks CSV contains no ego rows (is_ego=1)");
  }
  return set;
}

std::string write_cloud_csv(const std::vector<LidarPoint> & cloud)
{
  std::string out = "x_m,y_m,z_m,intensity\n";
  char buf[120];
  for (const auto & p : cloud) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f\n", p.x, p.y, p.z, p.intensity);
    out += buf;
  }
  return out;
}

std::vector<LidarPoint> parse_cloud_csv(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "x_m,y_m,z_m,intensity") {
    throw ValidationError("cloud CSV must start with the header 'x_m,y_m,z_m,intensity'");
  }
  std::vector<LidarPoint> cloud;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ValidationError("cloud CSV row does not have 4 fields: " + line);
    }
    LidarPoint p;
    p.x = parse_double_field(fields[0], line);
    p.y = parse_double_field(fields[1], line);
    p.z = parse_double_field(fields[2], line);
    p.intensity = parse_double_field(fields[3], line);
    if (p.intensity < 0.0 || p.intensity > 1.0) {
      throw ValidationError("cloud CSV intensity outside [0,1]: " + line);
    }
    cloud.push_back(p);
  }
  return cloud;
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file for reading: " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string & path, const std::string & content)
{
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open file for writing: " + tmp.string());
    }
    out << content;
    if (!out.good()) {
      throw IoError("failed while writing: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace scenkit
