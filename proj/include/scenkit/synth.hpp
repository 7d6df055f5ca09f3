#ifndef SCENKIT_SYNTH_HPP_
#define SCENKIT_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "scenkit/csv.hpp"
#include "scenkit/lane_builder.hpp"
#include "scenkit/parameters.hpp"
#include "scenkit/scenario.hpp"

namespace scenkit
{

// Deterministic RNG with hand-rolled distributions so seeds reproduce the
// same corpus everywhere.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive
  double gauss(double mean, double sigma);
  bool coin() { return uniform() < 0.5; }

private:
  std::uint64_t next();
  std::uint64_t state_;
};

struct SynthScenario
{
  TrackSet tracks;
  LaneChangeParameters authored;
  RoadSpec road;
  double true_cut_start = 0.0;  // maneuver anchors in track time
  double true_cut_end = 0.0;
};

// Constant-speed scenario authored by compiling and playing its parameters;
// track positions carry a seeded rigid frame transform. The lateral ramp is
// the player's sinusoid.
SynthScenario synth_played_scenario(ScenarioKind kind, std::uint64_t seed);

// Closed-form kinematic scenario: piecewise-linear speed hitting the control
// values exactly at the control times, linear lateral ramp in s-progress.
// With in_window_const the speed varies only during the preroll.
SynthScenario synth_kinematic_scenario(
  ScenarioKind kind, std::uint64_t seed, bool in_window_const);

// Ego plus lane-keeping traffic with bounded lateral wobble; no lane change.
TrackSet synth_lane_keeping(std::uint64_t seed);

// The perturbation-experiment fixture and a road that fits all its variants.
LaneChangeParameters fixture_params();
RoadSpec fixture_road();

struct CloudTruth
{
  std::vector<LidarPoint> cloud;
  std::vector<double> marking_y;  // ground-truth lateral positions
};

// Ground plane plus three dashed high-intensity markings with lateral
// Gaussian noise.
CloudTruth synth_marking_cloud(std::uint64_t seed, double sigma);

}  // namespace scenkit

#endif  // SCENKIT_SYNTH_HPP_
