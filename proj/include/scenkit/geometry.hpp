#ifndef SCENKIT_GEOMETRY_HPP_
#define SCENKIT_GEOMETRY_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace scenkit
{

struct CartesianPoint
{
  double x = 0.0;
  double y = 0.0;
};

bool almost_equal(const CartesianPoint & a, const CartesianPoint & b, double eps = 1e-9);

// Path-relative coordinates: s is arclength along the reference line,
// t is the signed lateral offset (positive to the left of travel).
struct FrenetPose
{
  double s = 0.0;
  double t = 0.0;
};

// Piecewise-linear reference line built from the ego path. Consecutive
// duplicate points are dropped on construction; fewer than two distinct
// points is a degenerate path.
class ReferencePath
{
public:
  static ReferencePath from_points(std::vector<CartesianPoint> points);

  const std::vector<CartesianPoint> & points() const { return points_; }
  const std::vector<double> & cumulative_arclength() const { return cumlen_; }
  double length() const { return cumlen_.back(); }

  // Closest-point projection. s clamps to [0, length]; beyond the path ends
  // t is measured against the end segment's infinite extension. Ties between
  // equidistant segments resolve to the smaller s.
  FrenetPose to_frenet(const CartesianPoint & p) const;

  // Inverse of to_frenet away from corners. Throws ValidationError when
  // f.s is outside [0, length].
  CartesianPoint to_cartesian(const FrenetPose & f) const;

private:
  ReferencePath() = default;
  std::vector<CartesianPoint> points_;
  std::vector<double> cumlen_;
};

struct TrackedState
{
  double time = 0.0;  // seconds
  std::string object_id;
  CartesianPoint position;
  double speed = 0.0;  // m/s, >= 0
  int lane_id = -1;    // -1 is the leftmost driven lane
  bool is_ego = false;
};

// Time-ordered samples of a single object.
class Trajectory
{
public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrackedState> states);

  const std::vector<TrackedState> & states() const { return states_; }
  bool empty() const { return states_.empty(); }
  std::size_t size() const { return states_.size(); }
  const std::string & object_id() const;
  double start_time() const { return states_.front().time; }
  double end_time() const { return states_.back().time; }
  bool covers(double time) const;

  // Linear interpolation of position and speed; lane_id is taken from the
  // sample at or before the query time. Throws when time is not covered.
  TrackedState at(double time) const;

private:
  std::vector<TrackedState> states_;
};

// Samples at t0, t0+1, ... up to the last covered second.
Trajectory resample_1hz(const Trajectory & traj, double t0);

}  // namespace scenkit

#endif  // SCENKIT_GEOMETRY_HPP_
