#include "scenkit/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "json.hpp"
#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

// Frenet time series of one challenger over the span shared with the ego.
struct FrenetSeries
{
  std::vector<double> time;
  std::vector<double> s;
  std::vector<double> t;
  std::vector<int> lane;
};

double interp_time_at_s(const FrenetSeries & fs, double s_query)
{
  const auto & s = fs.s;
  if (s_query <= s.front()) {
    return fs.time.front();
  }
  if (s_query >= s.back()) {
    return fs.time.back();
  }
  auto it = std::lower_bound(s.begin(), s.end(), s_query);
  const std::size_t hi = static_cast<std::size_t>(it - s.begin());
  const std::size_t lo = hi - 1;
  const double span = s[hi] - s[lo];
  if (span <= 0.0) {
    return fs.time[lo];
  }
  const double w = (s_query - s[lo]) / span;
  return fs.time[lo] + w * (fs.time[hi] - fs.time[lo]);
}

double median(std::vector<double> v)
{
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

enum class RampShape
{
  kLinear,
  kSinusoidal,
};

double ramp_fraction(RampShape shape, double u)
{
  u = std::clamp(u, 0.0, 1.0);
  if (shape == RampShape::kLinear) {
    return u;
  }
  return 0.5 * (1.0 - std::cos(M_PI * u));
}

struct RampFit
{
  double s0 = 0.0;
  double length = 0.0;
  double residual = std::numeric_limits<double>::infinity();
};

RampFit fit_ramp(
  const FrenetSeries & fs, std::size_t win_lo, std::size_t win_hi, double t_src, double t_tgt,
  RampShape shape, double s0_seed, double len_seed)
{
  const double delta = t_tgt - t_src;
  auto objective = [&](double s0, double len) {
    double err = 0.0;
    for (std::size_t i = win_lo; i <= win_hi; ++i) {
      const double u = (fs.s[i] - s0) / len;
      const double model = t_src + delta * ramp_fraction(shape, u);
      const double d = fs.t[i] - model;
      err += d * d;
    }
    return err;
  };

  double best_s0 = s0_seed;
  double best_len = len_seed;
  double best_err = objective(best_s0, best_len);
  double s0_span = 0.6 * len_seed;
  double len_span = 0.8 * len_seed;
  for (int round = 0; round < 8; ++round) {
    const int steps = round == 0 ? 20 : 6;
    double round_s0 = best_s0;
    double round_len = best_len;
    for (int a = -steps; a <= steps; ++a) {
      for (int b = -steps; b <= steps; ++b) {
        const double s0 = round_s0 + s0_span * a / steps;
        const double len = round_len + len_span * b / steps;
        if (len < 1e-3) {
          continue;
        }
        const double err = objective(s0, len);
        if (err < best_err) {
          best_err = err;
          best_s0 = s0;
          best_len = len;
        }
      }
    }
    s0_span /= steps > 6 ? 5.0 : 3.0;
    len_span /= steps > 6 ? 5.0 : 3.0;
  }
  return {best_s0, best_len, best_err};
}

struct Candidate
{
  ScenarioKind kind;
  double crossing_time;
};

}  // namespace

std::string to_string(ScenarioKind kind)
{
  return kind == ScenarioKind::kCutIn ? "cut_in" : "cut_out";
}

ScenarioKind scenario_kind_from_string(const std::string & text)
{
  if (text == "cut_in") {
    return ScenarioKind::kCutIn;
  }
  if (text == "cut_out") {
    return ScenarioKind::kCutOut;
  }
  throw ValidationError("unknown scenario kind: " + text);
}

double lane_center_offset(int lane_id, int ego_lane_id, double lane_width)
{
  return (lane_id - ego_lane_id) * lane_width;
}

std::vector<LaneChangeEvent> detect_events(
  const Trajectory & ego, const std::vector<Trajectory> & others, const ReferencePath & path,
  const DetectorConfig & cfg)
{
  if (ego.empty()) {
    throw ValidationError("detector needs a non-empty ego trajectory");
  }
  std::vector<LaneChangeEvent> events;

  for (const Trajectory & challenger : others) {
    if (challenger.empty() || challenger.object_id() == ego.object_id()) {
      continue;
    }
    const double span_start = std::max(ego.start_time(), challenger.start_time());
    const double span_end = std::min(ego.end_time(), challenger.end_time());
    if (span_end - span_start < cfg.preroll + 2.0) {
      continue;  // too short to host a scenario window
    }

    FrenetSeries fs;
    for (const TrackedState & st : challenger.states()) {
      if (st.time < span_start - 1e-9 || st.time > span_end + 1e-9) {
        continue;
      }
      const FrenetPose pose = path.to_frenet(st.position);
      fs.time.push_back(st.time);
      fs.s.push_back(pose.s);
      fs.t.push_back(pose.t);
      fs.lane.push_back(st.lane_id);
    }
    if (fs.time.size() < 3) {
      continue;
    }

    // 1 Hz comparison of lane id and lateral distance to the ego path
    std::vector<Candidate> candidates;
    {
      bool armed_out = false;
      bool armed_in = false;
      for (double tk = span_start; tk <= span_end + 1e-9; tk += 1.0) {
        const double clamped = std::min(tk, span_end);
        const int ego_lane = ego.at(clamped).lane_id;
        const TrackedState ch = challenger.at(clamped);
        const double lat = path.to_frenet(ch.position).t;
        const bool in_ego_lane_lat = std::abs(lat) < cfg.cut_in_threshold;
        const bool left_ego_lane_lat = std::abs(lat) > cfg.cut_out_threshold;
        if (ch.lane_id != ego_lane && !in_ego_lane_lat) {
          if (armed_out) {
            armed_out = false;
          }
          armed_in = true;
        }
        if (armed_in && in_ego_lane_lat) {
          candidates.push_back({ScenarioKind::kCutIn, clamped});
          armed_in = false;
        }
        if (ch.lane_id == ego_lane && !left_ego_lane_lat) {
          armed_out = true;
        }
        if (armed_out && left_ego_lane_lat) {
          candidates.push_back({ScenarioKind::kCutOut, clamped});
          armed_out = false;
        }
      }
    }

    const int ego_lane0 = ego.at(span_start).lane_id;
    double last_event_end = -std::numeric_limits<double>::infinity();

    for (const Candidate & cand : candidates) {
      if (cand.crossing_time <= last_event_end + cfg.postroll) {
        continue;  // overlapping maneuver of the same challenger
      }
      // lateral velocity per native interval; interval i covers [time_i, time_i+1)
      const std::size_t n = fs.time.size();
      std::vector<bool> moving(n - 1, false);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double v = (fs.t[i + 1] - fs.t[i]) / (fs.time[i + 1] - fs.time[i]);
        moving[i] = std::abs(v) >= cfg.lat_vel_start;
      }
      // sustained run of lateral motion containing (or entering) the crossing
      std::size_t cross_idx = 0;
      while (cross_idx + 1 < n && fs.time[cross_idx + 1] <= cand.crossing_time + 1e-9) {
        ++cross_idx;
      }
      std::optional<std::size_t> run_start;
      {
        std::size_t i = std::min(cross_idx, n - 2);
        if (!moving[i]) {
          // crossing sampled after the ramp flattened; walk back to the run
          while (i > 0 && !moving[i]) {
            --i;
          }
        }
        if (moving[i]) {
          while (i > 0 && moving[i - 1]) {
            --i;
          }
          double run_span = 0.0;
          std::size_t j = i;
          while (j + 1 < n && moving[j]) {
            run_span += fs.time[j + 1] - fs.time[j];
            ++j;
          }
          if (run_span >= cfg.lat_vel_sustain) {
            run_start = i;
          }
        }
      }
      if (!run_start) {
        continue;
      }
      double t_cut_start = fs.time[*run_start];

      // settle on the target lane center
      int target_lane = ego_lane0;
      if (cand.kind == ScenarioKind::kCutOut) {
        target_lane = fs.lane[std::min(cross_idx + 1, n - 1)];
        for (std::size_t j = cross_idx; j < n; ++j) {
          if (fs.lane[j] != ego_lane0) {
            target_lane = fs.lane[j];
            break;
          }
        }
      }
      const double target_center = lane_center_offset(target_lane, ego_lane0, cfg.lane_width);
      std::optional<std::size_t> settle_idx;
      for (std::size_t m = cross_idx; m < n; ++m) {
        if (fs.time[m] + cfg.settle_hold > fs.time.back() + 1e-9) {
          break;
        }
        bool held = true;
        for (std::size_t j = m; j < n && fs.time[j] <= fs.time[m] + cfg.settle_hold + 1e-9; ++j) {
          if (std::abs(fs.t[j] - target_center) >= cfg.settle_eps) {
            held = false;
            break;
          }
        }
        if (held) {
          settle_idx = m;
          break;
        }
      }
      LaneChangeEvent ev;
      ev.kind = cand.kind;
      ev.challenger_id = challenger.object_id();
      ev.truncated = !settle_idx.has_value();
      double t_cut_end = settle_idx ? fs.time[*settle_idx] : fs.time.back();

      if (cfg.refine_anchors && settle_idx) {
        const std::size_t src_idx = *run_start;
        const std::size_t tgt_idx = *settle_idx;
        std::size_t win_lo = src_idx;
        while (win_lo > 0 && fs.time[win_lo] > fs.time[src_idx] - 2.0) {
          --win_lo;
        }
        std::size_t win_hi = tgt_idx;
        while (win_hi + 1 < n && fs.time[win_hi] < fs.time[tgt_idx] + 2.0) {
          ++win_hi;
        }
        // baseline estimates and the fitted ramp reinforce each other, so
        // re-estimate the flats from outside the fitted extent and refit
        double ramp_lo_s = fs.s[src_idx];
        double ramp_hi_s = fs.s[tgt_idx];
        RampFit best;
        bool valid = false;
        for (int pass = 0; pass < 3; ++pass) {
          std::vector<double> pre;
          std::vector<double> post;
          for (std::size_t i = win_lo; i <= win_hi; ++i) {
            if (fs.s[i] <= ramp_lo_s) {
              pre.push_back(fs.t[i]);
            }
            if (fs.s[i] >= ramp_hi_s) {
              post.push_back(fs.t[i]);
            }
          }
          if (pre.empty() || post.empty()) {
            break;
          }
          const double t_src = median(pre);
          const double t_tgt = median(post);
          if (std::abs(t_tgt - t_src) < 0.5) {
            break;
          }
          const double s0_seed = valid ? best.s0 : fs.s[src_idx];
          const double len_seed =
            valid ? best.length : std::max(fs.s[tgt_idx] - fs.s[src_idx], 1.0);
          const RampFit lin = fit_ramp(
            fs, win_lo, win_hi, t_src, t_tgt, RampShape::kLinear, s0_seed, len_seed);
          const RampFit sin = fit_ramp(
            fs, win_lo, win_hi, t_src, t_tgt, RampShape::kSinusoidal, s0_seed, len_seed);
          best = sin.residual < lin.residual ? sin : lin;
          valid = true;
          ramp_lo_s = best.s0;
          ramp_hi_s = best.s0 + best.length;
        }
        if (valid) {
          const double refined_start = interp_time_at_s(fs, best.s0);
          const double refined_end = interp_time_at_s(fs, best.s0 + best.length);
          if (
            refined_end > refined_start &&
            std::abs(refined_start - t_cut_start) < 2.0 + cfg.settle_hold &&
            std::abs(refined_end - t_cut_end) < 2.0 + cfg.settle_hold) {
            t_cut_start = refined_start;
            t_cut_end = refined_end;
          }
        }
      }

      ev.t_cut_start = t_cut_start;
      ev.t_cut_end = t_cut_end;
      ev.t_scenario_start = t_cut_start - cfg.preroll;
      ev.t_scenario_end = t_cut_end + cfg.postroll;
      if (ev.t_scenario_start < span_start - 1e-6 || ev.t_scenario_end > span_end + 1e-6) {
        ev.truncated = true;
      }
      events.push_back(ev);
      last_event_end = ev.t_cut_end;
    }
  }
  return events;
}

std::string write_events_json(const std::vector<LaneChangeEvent> & events)
{
  nlohmann::ordered_json doc;
  doc["schema"] = "scenkit-events-1";
  doc["events"] = nlohmann::ordered_json::array();
  for (const auto & ev : events) {
    nlohmann::ordered_json e;
    e["kind"] = to_string(ev.kind);
    e["challenger_id"] = ev.challenger_id;
    e["t_scenario_start"] = ev.t_scenario_start;
    e["t_cut_start"] = ev.t_cut_start;
    e["t_cut_end"] = ev.t_cut_end;
    e["t_scenario_end"] = ev.t_scenario_end;
    e["truncated"] = ev.truncated;
    doc["events"].push_back(e);
  }
  return doc.dump(2) + "\n";
}

std::vector<LaneChangeEvent> parse_events_json(const std::string & text)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw ValidationError(std::string("malformed events JSON: ") + e.what());
  }
  if (!doc.contains("events") || !doc["events"].is_array()) {
    throw ValidationError("events JSON lacks an 'events' array");
  }
  std::vector<LaneChangeEvent> events;
  for (const auto & e : doc["events"]) {
    try {
      LaneChangeEvent ev;
      ev.kind = scenario_kind_from_string(e.at("kind").get<std::string>());
      ev.challenger_id = e.at("challenger_id").get<std::string>();
      ev.t_scenario_start = e.at("t_scenario_start").get<double>();
      ev.t_cut_start = e.at("t_cut_start").get<double>();
      ev.t_cut_end = e.at("t_cut_end").get<double>();
      ev.t_scenario_end = e.at("t_scenario_end").get<double>();
      ev.truncated = e.value("truncated", false);
      events.push_back(ev);
    } catch (const nlohmann::json::exception & ex) {
      throw ValidationError(std::string("bad event entry: ") + ex.what());
    }
  }
  return events;
}

}  // namespace scenkit
