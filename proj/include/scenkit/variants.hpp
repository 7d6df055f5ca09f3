#ifndef SCENKIT_VARIANTS_HPP_
#define SCENKIT_VARIANTS_HPP_

#include <string>
#include <vector>

#include "scenkit/parameters.hpp"

namespace scenkit
{

// Shifts the challenger speed at the cut start, the cut end, and the final
// speed by delta; every other field is untouched. Throws when a shifted
// speed would drop below zero.
LaneChangeParameters perturb_velocities(const LaneChangeParameters & p, double delta);

struct SweepEntry
{
  double delta = 0.0;
  LaneChangeParameters params;
};

struct SweepResult
{
  std::vector<SweepEntry> variants;
  std::vector<std::string> skipped;  // infeasible deltas with the reason
};

SweepResult sweep(const LaneChangeParameters & p, const std::vector<double> & deltas);

}  // namespace scenkit

#endif  // SCENKIT_VARIANTS_HPP_
