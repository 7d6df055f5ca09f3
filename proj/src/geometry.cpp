#include "scenkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

double hypot2(double dx, double dy)
{
  return dx * dx + dy * dy;
}

}  // namespace

bool almost_equal(const CartesianPoint & a, const CartesianPoint & b, double eps)
{
  return std::abs(a.x - b.x) <= eps && std::abs(a.y - b.y) <= eps;
}

ReferencePath ReferencePath::from_points(std::vector<CartesianPoint> points)
{
  ReferencePath path;
  for (const auto & p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("reference path contains non-finite coordinates");
    }
    if (!path.points_.empty() && almost_equal(path.points_.back(), p, 1e-9)) {
      continue;  // drop consecutive duplicates (stationary samples)
    }
    path.points_.push_back(p);
  }
  if (path.points_.size() < 2) {
    throw ValidationError("degenerate reference path: fewer than two distinct points");
  }
  path.cumlen_.resize(path.points_.size());
  path.cumlen_[0] = 0.0;
  for (std::size_t i = 1; i < path.points_.size(); ++i) {
    const double d = std::sqrt(
      hypot2(path.points_[i].x - path.points_[i - 1].x, path.points_[i].y - path.points_[i - 1].y));
    path.cumlen_[i] = path.cumlen_[i - 1] + d;
  }
  return path;
}

FrenetPose ReferencePath::to_frenet(const CartesianPoint & p) const
{
  double best_dist2 = std::numeric_limits<double>::infinity();
  FrenetPose best;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const CartesianPoint & a = points_[i];
    const CartesianPoint & b = points_[i + 1];
    const double seg_dx = b.x - a.x;
    const double seg_dy = b.y - a.y;
    const double seg_len2 = hypot2(seg_dx, seg_dy);
    const double u_raw = ((p.x - a.x) * seg_dx + (p.y - a.y) * seg_dy) / seg_len2;

    const bool first = i == 0;
    const bool last = i + 2 == points_.size();
    // interior segments clamp to their extent; the path's end segments
    // extend to infinity so that s clamps but t stays perpendicular
    double u = std::clamp(u_raw, 0.0, 1.0);
    const bool extended = (first && u_raw < 0.0) || (last && u_raw > 1.0);

    double dist2;
    double t;
    const double seg_len = std::sqrt(seg_len2);
    const double cross = (seg_dx * (p.y - a.y) - seg_dy * (p.x - a.x)) / seg_len;
    if (extended || (u_raw > 0.0 && u_raw < 1.0)) {
      // perpendicular foot (possibly on the infinite extension)
      const double ux = extended ? u_raw : u;
      const double fx = a.x + ux * seg_dx;
      const double fy = a.y + ux * seg_dy;
      dist2 = hypot2(p.x - fx, p.y - fy);
      t = cross;
    } else {
      // clamped to a corner: Euclidean distance, sign from this segment
      const double fx = a.x + u * seg_dx;
      const double fy = a.y + u * seg_dy;
      dist2 = hypot2(p.x - fx, p.y - fy);
      t = std::copysign(std::sqrt(dist2), cross == 0.0 ? 1.0 : cross);
    }
    if (dist2 < best_dist2) {
      best_dist2 = dist2;
      best.s = cumlen_[i] + u * seg_len;
      best.t = t;
    }
  }
  return best;
}

CartesianPoint ReferencePath::to_cartesian(const FrenetPose & f) const
{
  if (f.s < -1e-9 || f.s > length() + 1e-9) {
    throw ValidationError("frenet s out of range [0, path length]");
  }
  const double s = std::clamp(f.s, 0.0, length());
  // segment containing s; boundaries belong to the segment that starts there
  auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), s);
  std::size_t i = it == cumlen_.begin() ? 0 : static_cast<std::size_t>(it - cumlen_.begin()) - 1;
  i = std::min(i, points_.size() - 2);
  const CartesianPoint & a = points_[i];
  const CartesianPoint & b = points_[i + 1];
  const double seg_len = cumlen_[i + 1] - cumlen_[i];
  const double u = (s - cumlen_[i]) / seg_len;
  const double dx = (b.x - a.x) / seg_len;
  const double dy = (b.y - a.y) / seg_len;
  // left normal of (dx, dy) is (-dy, dx)
  return {a.x + u * (b.x - a.x) - f.t * dy, a.y + u * (b.y - a.y) + f.t * dx};
}

Trajectory::Trajectory(std::vector<TrackedState> states) : states_(std::move(states))
{
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].speed < 0.0) {
      throw ValidationError("trajectory contains negative speed");
    }
    if (i > 0) {
      if (states_[i].time <= states_[i - 1].time) {
        throw ValidationError("trajectory times not strictly increasing");
      }
      if (states_[i].object_id != states_[0].object_id) {
        throw ValidationError("trajectory mixes object ids");
      }
    }
  }
}

const std::string & Trajectory::object_id() const
{
  if (states_.empty()) {
    throw ValidationError("empty trajectory has no object id");
  }
  return states_.front().object_id;
}

bool Trajectory::covers(double time) const
{
  return !states_.empty() && time >= start_time() - 1e-9 && time <= end_time() + 1e-9;
}

TrackedState Trajectory::at(double time) const
{
  if (states_.empty()) {
    throw ValidationError("cannot sample an empty trajectory");
  }
  if (!covers(time)) {
    throw ValidationError("sample time outside trajectory span");
  }
  if (time <= start_time()) {
    return states_.front();
  }
  if (time >= end_time()) {
    return states_.back();
  }
  auto it = std::lower_bound(
    states_.begin(), states_.end(), time,
    [](const TrackedState & st, double t) { return st.time < t; });
  const TrackedState & hi = *it;
  if (hi.time == time) {
    return hi;
  }
  const TrackedState & lo = *(it - 1);
  const double w = (time - lo.time) / (hi.time - lo.time);
  TrackedState out = lo;
  out.time = time;
  out.position.x = lo.position.x + w * (hi.position.x - lo.position.x);
  out.position.y = lo.position.y + w * (hi.position.y - lo.position.y);
  out.speed = lo.speed + w * (hi.speed - lo.speed);
  out.lane_id = lo.lane_id;
  return out;
}

Trajectory resample_1hz(const Trajectory & traj, double t0)
{
  if (traj.empty()) {
    throw ValidationError("cannot resample an empty trajectory");
  }
  if (!traj.covers(t0)) {
    throw ValidationError("resample start time outside trajectory span");
  }
  std::vector<TrackedState> out;
  for (double t = t0; t <= traj.end_time() + 1e-9; t += 1.0) {
    out.push_back(traj.at(std::min(t, traj.end_time())));
    out.back().time = t;
  }
  return Trajectory(std::move(out));
}

}  // namespace scenkit
