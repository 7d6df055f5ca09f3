#include "scenkit/player.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

constexpr double kEps = 1e-12;

struct SpeedRamp
{
  double t0 = 0.0;
  double v0 = 0.0;
  double target = 0.0;
  double duration = 0.0;

  double speed_at(double time) const
  {
    if (duration <= 0.0) {
      return target;
    }
    const double u = std::clamp((time - t0) / duration, 0.0, 1.0);
    return v0 + (target - v0) * u;
  }
};

struct LaneRamp
{
  double s_fire = 0.0;
  double t_from = 0.0;
  double t_to = 0.0;
  double center_from = 0.0;
  double center_to = 0.0;
  int lane_to = -1;
  double over_distance = 1.0;

  double lateral_at(double s) const
  {
    const double u = std::clamp((s - s_fire) / over_distance, 0.0, 1.0);
    const double f = 0.5 * (1.0 - std::cos(M_PI * u));
    return t_from + (t_to - t_from) * f;
  }
};

struct EntityState
{
  double s = 0.0;
  double t = 0.0;
  double speed = 0.0;
  int lane = -1;
  double s_start = 0.0;
  std::optional<SpeedRamp> ramp;
  std::optional<LaneRamp> lane_ramp;

  double traveled() const { return s - s_start; }
  double speed_at(double time) const { return ramp ? ramp->speed_at(time) : speed; }
};

struct PendingCondition
{
  std::size_t event_idx = 0;
  bool fired = false;
  bool was_false = false;  // predicate has been observed false
};

}  // namespace

std::size_t PlaybackTrace::index_of(const std::string & entity) const
{
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i] == entity) {
      return i;
    }
  }
  throw ValidationError("trace has no entity named " + entity);
}

double PlaybackTrace::end_time() const
{
  if (samples.empty() || samples.front().empty()) {
    return 0.0;
  }
  return samples.front().back().time;
}

TraceSample PlaybackTrace::state_at(std::size_t entity_idx, double time) const
{
  const auto & series = samples.at(entity_idx);
  if (series.empty()) {
    throw ValidationError("trace entity has no samples");
  }
  if (time <= series.front().time) {
    return series.front();
  }
  if (time >= series.back().time) {
    return series.back();
  }
  const auto it = std::lower_bound(
    series.begin(), series.end(), time,
    [](const TraceSample & sample, double t) { return sample.time < t; });
  const TraceSample & hi = *it;
  if (hi.time == time) {
    return hi;
  }
  const TraceSample & lo = *(it - 1);
  const double w = (time - lo.time) / (hi.time - lo.time);
  TraceSample out;
  out.time = time;
  out.s = lo.s + w * (hi.s - lo.s);
  out.t = lo.t + w * (hi.t - lo.t);
  out.speed = lo.speed + w * (hi.speed - lo.speed);
  out.lane = lo.lane;
  return out;
}

double PlaybackTrace::lane_change_fire_time() const
{
  for (const auto & f : fired) {
    if (f.name.find("lane_change") != std::string::npos) {
      return f.time;
    }
  }
  return -1.0;
}

PlaybackTrace play(const ScenarioDocument & doc, double step)
{
  if (!(step > 0.0) || step > 0.1) {
    throw ValidationError("player step must be in (0, 0.1] seconds");
  }

  std::vector<std::string> names{doc.ego.name, doc.challenger.name};
  std::vector<EntityState> states(2);
  for (std::size_t i = 0; i < 2; ++i) {
    const EntitySpec & e = i == 0 ? doc.ego : doc.challenger;
    states[i].s = e.s0;
    states[i].s_start = e.s0;
    states[i].t = doc.road.lane_center(e.lane) + e.offset;
    states[i].speed = e.speed;
    states[i].lane = e.lane;
  }
  auto entity_index = [&](const std::string & name) -> std::size_t {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) {
        return i;
      }
    }
    throw ValidationError("document event references unknown entity: " + name);
  };

  // the lane change ends on the target lane center plus the documented
  // final offset, so the trailing LaneOffset event is a no-op by design
  double final_offset = 0.0;
  for (const auto & ev : doc.events) {
    if (const auto * off = std::get_if<LaneOffset>(&ev.action)) {
      final_offset = off->value;
    }
  }

  std::vector<PendingCondition> pending(doc.events.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    pending[i].event_idx = i;
  }

  // signed condition measure; the condition fires when it crosses into >= 0
  auto measure = [&](const Condition & c, const std::string & actor,
                     const std::vector<EntityState> & st) {
    if (const auto * traveled = std::get_if<TraveledDistance>(&c)) {
      return st[entity_index(traveled->entity)].traveled() - traveled->value;
    }
    const auto & rel = std::get<RelativeLongitudinalDistance>(c);
    const double gap = st[entity_index(actor)].s - st[entity_index(rel.target)].s;
    return rel.rule == DistanceRule::kGreaterThan ? gap - rel.value : rel.value - gap;
  };

  auto apply_action = [&](const TriggeredEvent & ev, double now) {
    EntityState & st = states[entity_index(ev.actor)];
    if (const auto * speed = std::get_if<SpeedChange>(&ev.action)) {
      st.speed = st.speed_at(now);
      st.ramp = SpeedRamp{now, st.speed, speed->target_speed, speed->duration};
    } else if (const auto * lane = std::get_if<LaneChange>(&ev.action)) {
      LaneRamp ramp;
      ramp.s_fire = st.s;
      ramp.t_from = st.t;
      ramp.center_from = doc.road.lane_center(st.lane);
      ramp.center_to = doc.road.lane_center(lane->target_lane);
      ramp.t_to = ramp.center_to + final_offset;
      ramp.lane_to = lane->target_lane;
      ramp.over_distance = std::max(lane->over_distance, kEps);
      st.lane_ramp = ramp;
    } else if (const auto * offset = std::get_if<LaneOffset>(&ev.action)) {
      if (!st.lane_ramp) {
        st.t = doc.road.lane_center(st.lane) + offset->value;
      }
    }
  };

  // advance all entities from `now` to `now + dt` (speeds piecewise linear)
  auto advance = [&](double now, double dt) {
    for (auto & st : states) {
      const double v_a = st.speed_at(now);
      const double v_b = st.speed_at(now + dt);
      st.s += 0.5 * (v_a + v_b) * dt;
      st.speed = v_b;
      if (st.lane_ramp) {
        st.t = st.lane_ramp->lateral_at(st.s);
        const double mid = 0.5 * (st.lane_ramp->center_from + st.lane_ramp->center_to);
        const bool crossed = st.lane_ramp->center_to > st.lane_ramp->center_from
                               ? st.t > mid
                               : st.t < mid;
        if (crossed) {
          st.lane = st.lane_ramp->lane_to;
        }
        if (st.s - st.lane_ramp->s_fire >= st.lane_ramp->over_distance) {
          st.t = st.lane_ramp->t_to;
          st.lane = st.lane_ramp->lane_to;
          st.lane_ramp.reset();
        }
      }
    }
  };

  PlaybackTrace trace;
  trace.step = step;
  trace.entities = names;
  trace.samples.resize(2);
  auto emit = [&](double time) {
    for (std::size_t i = 0; i < 2; ++i) {
      trace.samples[i].push_back(
        {time, states[i].s, states[i].t, states[i].speed, states[i].lane});
    }
  };
  emit(0.0);

  // latch initial predicate signs: a condition that starts satisfied must
  // first become false before it can fire
  std::vector<double> prev_measure(doc.events.size());
  for (auto & pc : pending) {
    prev_measure[pc.event_idx] =
      measure(doc.events[pc.event_idx].condition, doc.events[pc.event_idx].actor, states);
    pc.was_false = prev_measure[pc.event_idx] < 0.0;
  }
  double stop_prev = states[entity_index(doc.stop.entity)].traveled() - doc.stop.traveled_distance;

  double now = 0.0;
  bool stopped = false;
  while (!stopped) {
    if (now + step > doc.stop.timeout + kEps) {
      trace.stop_reason = "timeout";
      trace.stop_time = now;
      break;
    }
    double remaining = step;
    int guard = 0;
    while (remaining > kEps && guard++ < 64) {
      // tentative advance over the remaining sub-interval
      const std::vector<EntityState> before = states;
      advance(now, remaining);
      const std::vector<EntityState> after = states;

      // earliest rising-edge crossing within (now, now+remaining]
      double best_alpha = 2.0;
      std::size_t best = SIZE_MAX;
      for (const auto & pc : pending) {
        if (pc.fired) {
          continue;
        }
        const auto & ev = doc.events[pc.event_idx];
        const double m0 = prev_measure[pc.event_idx];
        const double m1 = measure(ev.condition, ev.actor, after);
        if (pc.was_false && m0 < 0.0 && m1 >= 0.0) {
          const double alpha = m1 > m0 ? std::clamp(-m0 / (m1 - m0), 0.0, 1.0) : 1.0;
          if (alpha < best_alpha - kEps) {
            best_alpha = alpha;
            best = pc.event_idx;
          }
        }
      }

      if (best == SIZE_MAX) {
        // no fire: keep the tentative state, refresh latches
        for (auto & pc : pending) {
          if (!pc.fired) {
            const auto & ev = doc.events[pc.event_idx];
            prev_measure[pc.event_idx] = measure(ev.condition, ev.actor, states);
            if (prev_measure[pc.event_idx] < 0.0) {
              pc.was_false = true;
            }
          }
        }
        now += remaining;
        remaining = 0.0;
      } else {
        // rewind and advance exactly to the crossing, then fire
        states = before;
        const double dt_fire = best_alpha * remaining;
        advance(now, dt_fire);
        now += dt_fire;
        remaining -= dt_fire;
        for (auto & pc : pending) {
          if (!pc.fired) {
            const auto & ev = doc.events[pc.event_idx];
            prev_measure[pc.event_idx] = measure(ev.condition, ev.actor, states);
            if (prev_measure[pc.event_idx] < 0.0) {
              pc.was_false = true;
            }
          }
        }
        PendingCondition & pc = pending[best];
        pc.fired = true;
        trace.fired.push_back({doc.events[best].name, now});
        apply_action(doc.events[best], now);
      }
    }

    emit(now);

    const double stop_now =
      states[entity_index(doc.stop.entity)].traveled() - doc.stop.traveled_distance;
    if (stop_prev < 0.0 && stop_now >= 0.0) {
      trace.stop_reason = "traveled_distance";
      trace.stop_time = now;
      stopped = true;
    }
    stop_prev = stop_now;
  }

  for (const auto & pc : pending) {
    if (!pc.fired) {
      trace.unfired.push_back(doc.events[pc.event_idx].name);
    }
  }
  return trace;
}

std::string write_trace_csv(const PlaybackTrace & trace)
{
  std::string out;
  char buf[160];
  for (const auto & f : trace.fired) {
    std::snprintf(buf, sizeof(buf), "# fired %s t=%.6f\n", f.name.c_str(), f.time);
    out += buf;
  }
  for (const auto & name : trace.unfired) {
    std::snprintf(buf, sizeof(buf), "# unfired %s\n", name.c_str());
    out += buf;
  }
  std::snprintf(
    buf, sizeof(buf), "# stop reason=%s t=%.6f step=%.6f\n", trace.stop_reason.c_str(),
    trace.stop_time, trace.step);
  out += buf;
  out += "time_s,entity,s_m,t_m,speed_mps,lane_id\n";
  const std::size_t rows = trace.samples.empty() ? 0 : trace.samples.front().size();
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t i = 0; i < trace.entities.size(); ++i) {
      const TraceSample & s = trace.samples[i][row];
      std::snprintf(
        buf, sizeof(buf), "%.6f,%s,%.6f,%.6f,%.6f,%d\n", s.time, trace.entities[i].c_str(), s.s,
        s.t, s.speed, s.lane);
      out += buf;
    }
  }
  return out;
}

PlaybackTrace parse_trace_csv(const std::string & text)
{
  PlaybackTrace trace;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tag;
      meta >> tag;
      if (tag == "fired") {
        std::string name;
        std::string t_field;
        meta >> name >> t_field;
        trace.fired.push_back({name, std::strtod(t_field.c_str() + 2, nullptr)});
      } else if (tag == "unfired") {
        std::string name;
        meta >> name;
        trace.unfired.push_back(name);
      } else if (tag == "stop") {
        std::string field;
        while (meta >> field) {
          if (field.rfind("reason=", 0) == 0) {
            trace.stop_reason = field.substr(7);
          } else if (field.rfind("t=", 0) == 0) {
            trace.stop_time = std::strtod(field.c_str() + 2, nullptr);
          } else if (field.rfind("step=", 0) == 0) {
            trace.step = std::strtod(field.c_str() + 5, nullptr);
          }
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != "time_s,entity,s_m,t_m,speed_mps,lane_id") {
        throw ValidationError("trace CSV header mismatch: " + line);
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    TraceSample s;
    std::string entity;
    try {
      std::getline(row, field, ',');
      s.time = std::stod(field);
      std::getline(row, entity, ',');
      std::getline(row, field, ',');
      s.s = std::stod(field);
      std::getline(row, field, ',');
      s.t = std::stod(field);
      std::getline(row, field, ',');
      s.speed = std::stod(field);
      std::getline(row, field, ',');
      s.lane = std::stoi(field);
    } catch (const std::exception &) {
      throw ValidationError("bad trace CSV row: " + line);
    }
    bool found = false;
    for (std::size_t i = 0; i < trace.entities.size(); ++i) {
      if (trace.entities[i] == entity) {
        trace.samples[i].push_back(s);
        found = true;
        break;
      }
    }
    if (!found) {
      trace.entities.push_back(entity);
      trace.samples.emplace_back();
      trace.samples.back().push_back(s);
    }
  }
  if (!header_seen) {
    throw ValidationError("trace CSV is missing its header row");
  }
  return trace;
}

}  // namespace scenkit
