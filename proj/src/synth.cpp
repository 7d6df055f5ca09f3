#include "scenkit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "scenkit/errors.hpp"
#include "scenkit/player.hpp"

namespace scenkit
{

std::uint64_t Rng::next()
{
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform()
{
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
  return lo + (hi - lo) * uniform();
}

int Rng::uniform_int(int lo, int hi)
{
  return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

double Rng::gauss(double mean, double sigma)
{
  // Box-Muller
  const double u1 = std::max(uniform(), 1e-300);
  const double u2 = uniform();
  return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace
{

struct FrameTransform
{
  double cos_h = 1.0;
  double sin_h = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  CartesianPoint apply(double x, double y) const
  {
    return {cos_h * x - sin_h * y + tx, sin_h * x + cos_h * y + ty};
  }
};

FrameTransform draw_transform(Rng & rng)
{
  const double heading = rng.uniform(-M_PI, M_PI);
  return {std::cos(heading), std::sin(heading), rng.uniform(-500.0, 500.0),
          rng.uniform(-500.0, 500.0)};
}

std::pair<int, int> draw_lanes(ScenarioKind kind, Rng & rng, int lane_count)
{
  // ego lane and the adjacent lane the challenger occupies off-ego
  const int ego_lane = -rng.uniform_int(1, lane_count);
  int off_lane = ego_lane + (rng.coin() ? 1 : -1);
  if (off_lane > -1) {
    off_lane = ego_lane - 1;
  }
  if (off_lane < -lane_count) {
    off_lane = ego_lane + 1;
  }
  (void)kind;
  return {ego_lane, off_lane};
}

// ego rows continue past the challenger's span so that the reference path
// covers every challenger position
void append_ego_rows(
  TrackSet & tracks, const FrameTransform & frame, double ego_x0, double ego_y, double ego_v,
  int ego_lane, double t_end, double rate)
{
  std::vector<TrackedState> rows;
  for (int k = 0;; ++k) {
    const double t = k / rate;
    if (t > t_end + 1e-9) {
      break;
    }
    TrackedState st;
    st.time = t;
    st.object_id = "ego";
    st.position = frame.apply(ego_x0 + ego_v * t, ego_y);
    st.speed = ego_v;
    st.lane_id = ego_lane;
    st.is_ego = true;
    rows.push_back(st);
  }
  tracks.ego = Trajectory(std::move(rows));
}

}  // namespace

SynthScenario synth_played_scenario(ScenarioKind kind, std::uint64_t seed)
{
  Rng rng(seed);
  const int lane_count = 3;
  auto [ego_lane, off_lane] = draw_lanes(kind, rng, lane_count);

  LaneChangeParameters p;
  p.kind = kind;
  p.ego_lane0 = ego_lane;
  p.ego_v0 = rng.uniform(18.0, 25.0);
  double dv = rng.uniform(1.5, 5.0) * (rng.coin() ? 1.0 : -1.0);
  if (kind == ScenarioKind::kCutIn) {
    p.ch_lane0 = off_lane;
    p.ch_lane_final = ego_lane;
    // a challenger approaching from the front must close in; one from
    // behind must overtake
    p.d0 = dv > 0.0 ? rng.uniform(-40.0, -15.0) : rng.uniform(15.0, 40.0);
  } else {
    p.ch_lane0 = ego_lane;
    p.ch_lane_final = off_lane;
    p.d0 = rng.uniform(12.0, 30.0);  // the departing lead vehicle
  }
  const double v = std::max(6.0, p.ego_v0 + dv);
  dv = v - p.ego_v0;
  p.ch_v0 = v;
  p.v_cut_start = v;
  p.v_cut_end = v;
  p.v_final = v;
  p.ch_offset0 = rng.uniform(-0.2, 0.2);
  p.ch_offset_final = rng.uniform(-0.2, 0.2);

  const double fire_time = rng.uniform(6.5, 8.5);
  const double cut_duration = rng.uniform(2.5, 4.5);
  p.trigger_distance = p.d0 + dv * fire_time;
  p.cut_distance = v * cut_duration;
  p.dur_to_cut_start = 5.0;
  p.dist_cut_start = v * 5.0;
  p.dist_cut_end = p.dist_cut_start + p.cut_distance;
  p.dur_cut_start_to_end = cut_duration;
  p.dist_total = v * (fire_time + cut_duration + 6.5);
  p.dur_cut_end_to_end = 5.0;

  SynthScenario out;
  out.authored = p;
  out.road = default_road_for(p, 3.5, lane_count);
  const ScenarioDocument doc = compile_4pt(p, out.road);
  const PlaybackTrace trace = play(doc, 0.01);
  if (trace.lane_change_fire_time() < 0.0) {
    throw ValidationError("synthetic scenario failed to fire its lane change");
  }
  out.true_cut_start = trace.lane_change_fire_time();
  out.true_cut_end = out.true_cut_start + p.cut_distance / v;

  const FrameTransform frame = draw_transform(rng);
  const double rate = 10.0;
  const std::size_t ego_idx = trace.index_of(kEgoName);
  const std::size_t ch_idx = trace.index_of(kChallengerName);

  std::vector<TrackedState> ch_rows;
  double ch_max_s = 0.0;
  for (int k = 0;; ++k) {
    const double t = k / rate;
    if (t > trace.end_time() + 1e-9) {
      break;
    }
    const TraceSample s = trace.state_at(ch_idx, t);
    TrackedState st;
    st.time = t;
    st.object_id = "ch1";
    st.position = frame.apply(s.s, s.t);
    st.speed = s.speed;
    st.lane_id = s.lane;
    ch_rows.push_back(st);
    ch_max_s = std::max(ch_max_s, s.s);
  }
  out.tracks.others.emplace_back(std::move(ch_rows));

  const TraceSample ego0 = trace.state_at(ego_idx, 0.0);
  const TraceSample ego_last = trace.state_at(ego_idx, trace.end_time());
  double ego_t_end = trace.end_time();
  if (ego_last.s < ch_max_s + 10.0) {
    ego_t_end += (ch_max_s + 10.0 - ego_last.s) / ego0.speed;
  }
  append_ego_rows(
    out.tracks, frame, ego0.s, ego0.t, ego0.speed, ego0.lane,
    std::ceil(ego_t_end * rate) / rate, rate);
  return out;
}

SynthScenario synth_kinematic_scenario(
  ScenarioKind kind, std::uint64_t seed, bool in_window_const)
{
  Rng rng(seed);
  const int lane_count = 3;
  const double lane_width = 3.5;
  auto [ego_lane, off_lane] = draw_lanes(kind, rng, lane_count);

  LaneChangeParameters p;
  p.kind = kind;
  p.ego_lane0 = ego_lane;
  p.ego_v0 = rng.uniform(17.0, 20.0);
  p.ch_v0 = p.ego_v0 + rng.uniform(0.5, 2.0);
  p.v_cut_start = p.ch_v0 + rng.uniform(2.0, 4.0);
  if (in_window_const) {
    p.v_cut_end = p.v_cut_start;
    p.v_final = p.v_cut_start;
  } else {
    p.v_cut_end = std::max(1.0, p.v_cut_start + rng.uniform(-1.5, 2.0));
    p.v_final = std::max(1.0, p.v_cut_end + rng.uniform(-1.5, 2.0));
  }
  if (kind == ScenarioKind::kCutIn) {
    p.ch_lane0 = off_lane;
    p.ch_lane_final = ego_lane;
    p.d0 = rng.uniform(-35.0, -15.0);
  } else {
    p.ch_lane0 = ego_lane;
    p.ch_lane_final = off_lane;
    p.d0 = rng.uniform(12.0, 30.0);
  }
  p.ch_offset0 = rng.uniform(-0.2, 0.2);
  p.ch_offset_final = rng.uniform(-0.2, 0.2);

  // control times on the 10 Hz grid
  const double t0 = 5.0;
  const double t1 = rng.uniform_int(20, 45) / 10.0;
  const double t2 = 5.0;
  p.dur_to_cut_start = t0;
  p.dur_cut_start_to_end = t1;
  p.dur_cut_end_to_end = t2;
  p.dist_cut_start = 0.5 * (p.ch_v0 + p.v_cut_start) * t0;
  p.cut_distance = 0.5 * (p.v_cut_start + p.v_cut_end) * t1;
  p.dist_cut_end = p.dist_cut_start + p.cut_distance;
  p.dist_total = p.dist_cut_end + 0.5 * (p.v_cut_end + p.v_final) * t2;
  p.trigger_distance = p.d0 + p.dist_cut_start - p.ego_v0 * t0;

  // exact piecewise-linear speed and its integral
  auto speed_at = [&](double t) {
    if (t <= t0) {
      return p.ch_v0 + (p.v_cut_start - p.ch_v0) * (t / t0);
    }
    if (t <= t0 + t1) {
      return p.v_cut_start + (p.v_cut_end - p.v_cut_start) * ((t - t0) / t1);
    }
    if (t <= t0 + t1 + t2) {
      return p.v_cut_end + (p.v_final - p.v_cut_end) * ((t - t0 - t1) / t2);
    }
    return p.v_final;
  };
  auto s_at = [&](double t) {
    double s = 0.0;
    double prev_t = 0.0;
    for (const double knot : {t0, t0 + t1, t0 + t1 + t2}) {
      const double seg_end = std::min(t, knot);
      if (seg_end > prev_t) {
        s += 0.5 * (speed_at(prev_t) + speed_at(seg_end)) * (seg_end - prev_t);
        prev_t = seg_end;
      }
    }
    if (t > prev_t) {
      s += p.v_final * (t - prev_t);
    }
    return s;
  };

  const double src_center = (p.ch_lane0 + 0.5) * lane_width;
  const double dst_center = (p.ch_lane_final + 0.5) * lane_width;
  const double lat_from = src_center + p.ch_offset0;
  const double lat_to = dst_center + p.ch_offset_final;
  const double s_ramp0 = p.dist_cut_start;
  auto lateral_at = [&](double s) {
    const double u = std::clamp((s - s_ramp0) / p.cut_distance, 0.0, 1.0);
    return lat_from + (lat_to - lat_from) * u;
  };

  const FrameTransform frame = draw_transform(rng);
  const double rate = 10.0;
  const double t_end_ch = t0 + t1 + t2 + 1.5;
  const double ego_y = (ego_lane + 0.5) * lane_width;
  const double ego_x0 = 10.0 + std::max(0.0, -p.d0);
  const double ch_x0 = ego_x0 + p.d0;

  SynthScenario out;
  out.authored = p;
  out.road = default_road_for(p, lane_width, lane_count);
  out.true_cut_start = t0;
  out.true_cut_end = t0 + t1;

  std::vector<TrackedState> ch_rows;
  double ch_max_x = ch_x0;
  for (int k = 0;; ++k) {
    const double t = k / rate;
    if (t > t_end_ch + 1e-9) {
      break;
    }
    const double s = s_at(t);
    const double lat = lateral_at(s);
    TrackedState st;
    st.time = t;
    st.object_id = "ch1";
    st.position = frame.apply(ch_x0 + s, lat);
    st.speed = speed_at(t);
    st.lane_id = std::abs(lat - src_center) <= std::abs(lat - dst_center) ? p.ch_lane0
                                                                          : p.ch_lane_final;
    ch_rows.push_back(st);
    ch_max_x = std::max(ch_max_x, ch_x0 + s);
  }
  out.tracks.others.emplace_back(std::move(ch_rows));

  double ego_t_end = t_end_ch;
  const double ego_x_end = ego_x0 + p.ego_v0 * t_end_ch;
  if (ego_x_end < ch_max_x + 10.0) {
    ego_t_end += (ch_max_x + 10.0 - ego_x_end) / p.ego_v0;
  }
  append_ego_rows(
    out.tracks, frame, ego_x0, ego_y, p.ego_v0, ego_lane, std::ceil(ego_t_end * rate) / rate,
    rate);
  return out;
}

TrackSet synth_lane_keeping(std::uint64_t seed)
{
  Rng rng(seed);
  const double lane_width = 3.5;
  const int ego_lane = -rng.uniform_int(1, 3);
  const double ego_v = rng.uniform(18.0, 25.0);
  const FrameTransform frame = draw_transform(rng);
  const double rate = 10.0;
  const double t_end = rng.uniform(20.0, 30.0);
  const double ego_x0 = 10.0;
  const double ego_y = (ego_lane + 0.5) * lane_width;

  TrackSet tracks;
  append_ego_rows(tracks, frame, ego_x0, ego_y, ego_v, ego_lane, std::ceil(t_end * 10.0) / 10.0,
                  rate);

  const int n_others = rng.uniform_int(2, 3);
  for (int i = 0; i < n_others; ++i) {
    int lane = -rng.uniform_int(1, 3);
    const double v = rng.uniform(16.0, 26.0);
    const double x0 = ego_x0 + rng.uniform(-40.0, 60.0);
    const double amp = rng.uniform(0.05, 0.3);
    const double period = rng.uniform(6.0, 12.0);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    std::vector<TrackedState> rows;
    for (int k = 0;; ++k) {
      const double t = k / rate;
      if (t > t_end + 1e-9) {
        break;
      }
      const double lat =
        (lane + 0.5) * lane_width + amp * std::sin(2.0 * M_PI * t / period + phase);
      TrackedState st;
      st.time = t;
      st.object_id = "veh" + std::to_string(i + 1);
      st.position = frame.apply(x0 + v * t, lat);
      st.speed = v;
      st.lane_id = lane;
      rows.push_back(st);
    }
    tracks.others.emplace_back(std::move(rows));
  }
  return tracks;
}

LaneChangeParameters fixture_params()
{
  LaneChangeParameters p;
  p.kind = ScenarioKind::kCutIn;
  p.ego_v0 = 25.0;
  p.ego_lane0 = -2;
  p.ch_v0 = 27.0;
  p.d0 = -25.0;
  p.ch_lane0 = -1;
  p.ch_offset0 = 0.0;
  p.trigger_distance = 73.0;
  p.cut_distance = 90.0;
  p.v_cut_start = 30.0;
  p.dist_cut_start = 135.0;
  p.dur_to_cut_start = 5.0;
  p.v_cut_end = 30.0;
  p.dist_cut_end = 225.0;
  p.dur_cut_start_to_end = 3.0;
  p.v_final = 30.0;
  p.dist_total = 1093.0;
  p.dur_cut_end_to_end = 5.0;
  p.ch_offset_final = 0.0;
  p.ch_lane_final = -2;
  return p;
}

RoadSpec fixture_road()
{
  return {1200.0, 3, 3.5};
}

CloudTruth synth_marking_cloud(std::uint64_t seed, double sigma)
{
  Rng rng(seed);
  CloudTruth out;
  out.marking_y = {0.0, -3.5, -7.0};

  // ground plane rows, scan-ordered along x
  for (double y = -9.0; y <= 2.0 + 1e-9; y += 1.0) {
    for (double x = 0.0; x <= 60.0 + 1e-9; x += 1.0) {
      out.cloud.push_back({x, y, 0.0, 0.15});
    }
  }
  // dashed markings: 3 m dashes, 1.5 m gaps
  for (const double y0 : out.marking_y) {
    double x = 2.0;
    while (x + 3.0 <= 58.0) {
      for (double dx = 0.0; dx <= 3.0 + 1e-9; dx += 0.25) {
        out.cloud.push_back({x + dx, y0 + rng.gauss(0.0, sigma), 0.0, 0.9});
      }
      x += 4.5;
    }
  }
  return out;
}

}  // namespace scenkit
