#include "scenkit/lane_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

bool point_less(const CartesianPoint & a, const CartesianPoint & b)
{
  return std::tie(a.x, a.y) < std::tie(b.x, b.y);
}

bool segment_less(const LineSegment & a, const LineSegment & b)
{
  return std::tie(a.a.x, a.a.y, a.b.x, a.b.y) < std::tie(b.a.x, b.a.y, b.b.x, b.b.y);
}

LineSegment canonical(LineSegment s)
{
  if (point_less(s.b, s.a)) {
    std::swap(s.a, s.b);
  }
  return s;
}

// union-find over cluster indices
struct DisjointSet
{
  explicit DisjointSet(std::size_t n) : parent(n)
  {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i)
  {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

}  // namespace

double LineSegment::length() const
{
  return std::hypot(b.x - a.x, b.y - a.y);
}

double LineSegment::line_distance(const CartesianPoint & p) const
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  return std::abs(dx * (p.y - a.y) - dy * (p.x - a.x)) / len;
}

bool operator==(const LineSegment & lhs, const LineSegment & rhs)
{
  return lhs.a.x == rhs.a.x && lhs.a.y == rhs.a.y && lhs.b.x == rhs.b.x && lhs.b.y == rhs.b.y;
}

std::vector<LidarPoint> segment_road_surface(
  const std::vector<LidarPoint> & cloud, const RoadSurfaceConfig & cfg)
{
  if (cloud.size() < 3) {
    throw ValidationError("road segmentation needs at least 3 scan points");
  }
  const std::size_t n = cloud.size();
  // elevation angle of the step into point i
  std::vector<double> angle(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double horiz =
      std::hypot(cloud[i].x - cloud[i - 1].x, cloud[i].y - cloud[i - 1].y);
    angle[i] = std::atan2(cloud[i].z - cloud[i - 1].z, std::max(horiz, 1e-12));
  }
  angle[0] = angle[1];

  std::vector<LidarPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cloud[i].z > cfg.max_height) {
      continue;
    }
    // a steep or creased step condemns the point it leads into
    if (std::abs(angle[i]) > cfg.d1_max) {
      continue;
    }
    const double d2 = i > 0 ? std::abs(angle[i] - angle[i - 1]) : 0.0;
    if (d2 > cfg.d2_max) {
      continue;
    }
    out.push_back(cloud[i]);
  }
  return out;
}

std::vector<LineSegment> cluster_markings(
  const std::vector<LidarPoint> & road_points, double intensity_threshold, double cluster_radius)
{
  std::vector<CartesianPoint> pts;
  for (const auto & p : road_points) {
    if (p.intensity >= intensity_threshold) {
      pts.push_back({p.x, p.y});
    }
  }
  const std::size_t n = pts.size();
  DisjointSet ds(n);
  const double r2 = cluster_radius * cluster_radius;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pts[i].x - pts[j].x;
      const double dy = pts[i].y - pts[j].y;
      if (dx * dx + dy * dy <= r2) {
        ds.unite(i, j);
      }
    }
  }
  std::vector<std::vector<std::size_t>> clusters;
  {
    std::vector<std::size_t> root_to_cluster(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = ds.find(i);
      if (root_to_cluster[r] == SIZE_MAX) {
        root_to_cluster[r] = clusters.size();
        clusters.emplace_back();
      }
      clusters[root_to_cluster[r]].push_back(i);
    }
  }

  std::vector<LineSegment> segments;
  for (const auto & cluster : clusters) {
    double best = 0.0;
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t a = 0; a < cluster.size(); ++a) {
      for (std::size_t b = a + 1; b < cluster.size(); ++b) {
        const double dx = pts[cluster[a]].x - pts[cluster[b]].x;
        const double dy = pts[cluster[a]].y - pts[cluster[b]].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > best) {
          best = d2;
          bi = cluster[a];
          bj = cluster[b];
        }
      }
    }
    if (best > 0.0) {
      segments.push_back(canonical({pts[bi], pts[bj]}));
    }
  }
  std::sort(segments.begin(), segments.end(), segment_less);
  return segments;
}

std::vector<LineSegment> merge_lines(std::vector<LineSegment> segments, double merge_distance)
{
  for (auto & s : segments) {
    s = canonical(s);
  }
  std::sort(segments.begin(), segments.end(), segment_less);

  auto mergeable = [merge_distance](const LineSegment & p, const LineSegment & q) {
    return p.line_distance(q.a) < merge_distance && p.line_distance(q.b) < merge_distance &&
           q.line_distance(p.a) < merge_distance && q.line_distance(p.b) < merge_distance;
  };
  auto merge_pair = [](const LineSegment & p, const LineSegment & q) {
    // axis of the longer segment (ties: canonical order decides), anchored
    // at the joint centroid; new extent spans the extreme projections
    const LineSegment & axis_seg = q.length() > p.length() ? q : p;
    const double len = axis_seg.length();
    const double ux = (axis_seg.b.x - axis_seg.a.x) / len;
    const double uy = (axis_seg.b.y - axis_seg.a.y) / len;
    const CartesianPoint c = {
      (p.a.x + p.b.x + q.a.x + q.b.x) / 4.0, (p.a.y + p.b.y + q.a.y + q.b.y) / 4.0};
    double lo = 0.0;
    double hi = 0.0;
    bool init = false;
    for (const CartesianPoint & e : {p.a, p.b, q.a, q.b}) {
      const double proj = (e.x - c.x) * ux + (e.y - c.y) * uy;
      if (!init) {
        lo = hi = proj;
        init = true;
      } else {
        lo = std::min(lo, proj);
        hi = std::max(hi, proj);
      }
    }
    return canonical({{c.x + lo * ux, c.y + lo * uy}, {c.x + hi * ux, c.y + hi * uy}});
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < segments.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < segments.size() && !changed; ++j) {
        if (mergeable(segments[i], segments[j])) {
          const LineSegment merged = merge_pair(segments[i], segments[j]);
          segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(j));
          segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(i));
          segments.push_back(merged);
          std::sort(segments.begin(), segments.end(), segment_less);
          changed = true;
        }
      }
    }
  }
  return segments;
}

LaneModel build_lane_model(std::vector<LineSegment> markings)
{
  if (markings.size() < 2) {
    throw ValidationError("lane model needs at least two markings");
  }
  // travel axis from the longest marking; left is the +90 degree normal
  const LineSegment * longest = &markings.front();
  for (const auto & m : markings) {
    if (m.length() > longest->length()) {
      longest = &m;
    }
  }
  const double len = longest->length();
  double ux = (longest->b.x - longest->a.x) / len;
  double uy = (longest->b.y - longest->a.y) / len;
  if (ux < 0.0 || (ux == 0.0 && uy < 0.0)) {
    ux = -ux;
    uy = -uy;
  }
  const double nx = -uy;
  const double ny = ux;
  auto lateral = [&](const LineSegment & m) {
    return ((m.a.x + m.b.x) / 2.0) * nx + ((m.a.y + m.b.y) / 2.0) * ny;
  };
  std::sort(markings.begin(), markings.end(), [&](const LineSegment & a, const LineSegment & b) {
    const double la = lateral(a);
    const double lb = lateral(b);
    if (la != lb) {
      return la > lb;  // leftmost first
    }
    return segment_less(a, b);
  });

  LaneModel model;
  model.markings = markings;
  model.lane_count = static_cast<int>(markings.size()) - 1;
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < markings.size(); ++i) {
    spacing += lateral(markings[i]) - lateral(markings[i + 1]);
  }
  model.lane_width = spacing / static_cast<double>(markings.size() - 1);
  if (model.lane_width <= 0.0) {
    throw ValidationError("lane model derived a non-positive lane width");
  }
  return model;
}

}  // namespace scenkit
