#ifndef SCENKIT_LANE_BUILDER_HPP_
#define SCENKIT_LANE_BUILDER_HPP_

#include <vector>

#include "scenkit/geometry.hpp"

namespace scenkit
{

struct LidarPoint
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;  // [0, 1]
};

struct LineSegment
{
  CartesianPoint a;
  CartesianPoint b;

  double length() const;
  // Perpendicular distance from p to the segment's infinite line.
  double line_distance(const CartesianPoint & p) const;
};

bool operator==(const LineSegment & lhs, const LineSegment & rhs);

// Markings ordered left to right across the travel direction.
struct LaneModel
{
  std::vector<LineSegment> markings;
  int lane_count = 0;
  double lane_width = 0.0;
};

struct RoadSurfaceConfig
{
  double max_height = 0.3;        // m
  double d1_max = 0.1745329252;   // rad, inter-point elevation angle (10 deg)
  double d2_max = 0.1745329252;   // rad, change of that angle between steps
};

// Keeps points whose height and elevation-angle derivatives stay within the
// configured bounds. Input must be ordered along the scan.
std::vector<LidarPoint> segment_road_surface(
  const std::vector<LidarPoint> & cloud, const RoadSurfaceConfig & cfg);

// Single-linkage clustering of high-intensity points in the ground plane;
// each cluster becomes the segment between its two most distant points.
// Clusters that collapse to a point are dropped. Output is canonically
// ordered (endpoints sorted within a segment, segments sorted).
std::vector<LineSegment> cluster_markings(
  const std::vector<LidarPoint> & road_points, double intensity_threshold, double cluster_radius);

// Merges near-colinear segments (all four endpoint-to-line distances below
// merge_distance) until a fixpoint; the merged segment spans the extreme
// projections onto the longer segment's axis.
std::vector<LineSegment> merge_lines(std::vector<LineSegment> segments, double merge_distance);

// Orders merged markings left to right and derives lane count and the mean
// perpendicular spacing. Requires at least two markings.
LaneModel build_lane_model(std::vector<LineSegment> markings);

}  // namespace scenkit

#endif  // SCENKIT_LANE_BUILDER_HPP_
