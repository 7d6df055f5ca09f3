#ifndef SCENKIT_OPENX_HPP_
#define SCENKIT_OPENX_HPP_

#include <string>

#include "scenkit/scenario.hpp"

namespace scenkit
{

// OpenSCENARIO 1.1 subset serialization. Deterministic: fixed attribute
// order, fixed-point numbers at six decimals. The returned document does not
// carry the road (that lives in the .xodr file).
std::string write_xosc(const ScenarioDocument & doc);
ScenarioDocument parse_xosc(const std::string & text);

// OpenDRIVE subset: one straight road, constant-width right lanes -1..-n.
std::string write_xodr(const RoadSpec & road);
RoadSpec parse_xodr(const std::string & text);

}  // namespace scenkit

#endif  // SCENKIT_OPENX_HPP_
