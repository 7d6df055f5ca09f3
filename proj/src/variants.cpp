#include "scenkit/variants.hpp"

#include <cstdio>

#include "scenkit/errors.hpp"

namespace scenkit
{

LaneChangeParameters perturb_velocities(const LaneChangeParameters & p, double delta)
{
  LaneChangeParameters out = p;
  out.v_cut_start = p.v_cut_start + delta;
  out.v_cut_end = p.v_cut_end + delta;
  out.v_final = p.v_final + delta;
  for (const auto & [value, name] : std::initializer_list<std::pair<double, const char *>>{
         {out.v_cut_start, "v_cut_start"},
         {out.v_cut_end, "v_cut_end"},
         {out.v_final, "v_final"}}) {
    if (value < 0.0) {
      char msg[128];
      std::snprintf(msg, sizeof(msg), "delta %+.3f drives %s below zero", delta, name);
      throw ValidationError(msg);
    }
  }
  return out;
}

SweepResult sweep(const LaneChangeParameters & p, const std::vector<double> & deltas)
{
  SweepResult result;
  for (const double delta : deltas) {
    try {
      result.variants.push_back({delta, perturb_velocities(p, delta)});
    } catch (const ValidationError & e) {
      result.skipped.push_back(e.what());
    }
  }
  return result;
}

}  // namespace scenkit
