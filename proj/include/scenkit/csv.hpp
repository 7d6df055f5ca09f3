#ifndef SCENKIT_CSV_HPP_
#define SCENKIT_CSV_HPP_

#include <string>
#include <vector>

#include "scenkit/geometry.hpp"
#include "scenkit/lane_builder.hpp"

namespace scenkit
{

// Trajectory log rows grouped per object, ego first when present.
struct TrackSet
{
  Trajectory ego;
  std::vector<Trajectory> others;
};

// `time_s,object_id,x_m,y_m,speed_mps,lane_id,is_ego`
std::string write_tracks_csv(const TrackSet & tracks);
TrackSet parse_tracks_csv(const std::string & text);

// `x_m,y_m,z_m,intensity`
std::string write_cloud_csv(const std::vector<LidarPoint> & cloud);
std::vector<LidarPoint> parse_cloud_csv(const std::string & text);

std::string read_file(const std::string & path);
// Writes atomically (temp file + rename).
void write_file(const std::string & path, const std::string & content);

}  // namespace scenkit

#endif  // SCENKIT_CSV_HPP_
