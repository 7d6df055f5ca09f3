#include "scenkit/openx.hpp"

#include <expat.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>

#include "scenkit/errors.hpp"

namespace scenkit
{

namespace
{

constexpr const char * kFileDate = "2020-01-01T00:00:00";

std::string fmt6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string escape(const std::string & s)
{
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct XmlNode
{
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<XmlNode> children;

  XmlNode & child(const std::string & child_name)
  {
    children.push_back(XmlNode{child_name, {}, {}});
    return children.back();
  }
  XmlNode & attr(const std::string & key, const std::string & value)
  {
    attrs.emplace_back(key, value);
    return *this;
  }
  XmlNode & attr(const std::string & key, double value) { return attr(key, fmt6(value)); }
  XmlNode & attr(const std::string & key, int value) { return attr(key, std::to_string(value)); }
};

void serialize(const XmlNode & node, std::string & out, int depth)
{
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += node.name;
  for (const auto & [k, v] : node.attrs) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v);
    out += '"';
  }
  if (node.children.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (const auto & c : node.children) {
    serialize(c, out, depth + 1);
  }
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "</";
  out += node.name;
  out += ">\n";
}

std::string to_xml(const XmlNode & root)
{
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  serialize(root, out, 0);
  return out;
}

// --- expat-backed DOM ------------------------------------------------------

struct ParseState
{
  XmlNode root;
  std::vector<XmlNode *> stack;
};

void XMLCALL on_start(void * user, const XML_Char * name, const XML_Char ** atts)
{
  auto * st = static_cast<ParseState *>(user);
  XmlNode * node;
  if (st->stack.empty()) {
    st->root.name = name;
    node = &st->root;
  } else {
    st->stack.back()->children.push_back(XmlNode{name, {}, {}});
    node = &st->stack.back()->children.back();
  }
  for (int i = 0; atts[i]; i += 2) {
    node->attrs.emplace_back(atts[i], atts[i + 1]);
  }
  st->stack.push_back(node);
}

void XMLCALL on_end(void * user, const XML_Char *)
{
  static_cast<ParseState *>(user)->stack.pop_back();
}

XmlNode parse_xml(const std::string & text)
{
  ParseState state;
  XML_Parser parser = XML_ParserCreate(nullptr);
  XML_SetUserData(parser, &state);
  XML_SetElementHandler(parser, on_start, on_end);
  const XML_Status status =
    XML_Parse(parser, text.c_str(), static_cast<int>(text.size()), XML_TRUE);
  if (status == XML_STATUS_ERROR) {
    std::ostringstream msg;
    msg << "malformed XML at line " << XML_GetCurrentLineNumber(parser) << ": "
        << XML_ErrorString(XML_GetErrorCode(parser));
    XML_ParserFree(parser);
    throw ValidationError(msg.str());
  }
  XML_ParserFree(parser);
  return state.root;
}

// --- subset interpretation helpers ------------------------------------------

const XmlNode * find_child(const XmlNode & node, const std::string & name)
{
  for (const auto & c : node.children) {
    if (c.name == name) {
      return &c;
    }
  }
  return nullptr;
}

const XmlNode & require_child(const XmlNode & node, const std::string & name)
{
  const XmlNode * c = find_child(node, name);
  if (!c) {
    throw ValidationError("missing element <" + name + "> inside <" + node.name + ">");
  }
  return *c;
}

std::string require_attr(const XmlNode & node, const std::string & key)
{
  for (const auto & [k, v] : node.attrs) {
    if (k == key) {
      return v;
    }
  }
  throw ValidationError("missing attribute '" + key + "' on <" + node.name + ">");
}

double require_double(const XmlNode & node, const std::string & key)
{
  const std::string raw = require_attr(node, key);
  char * end = nullptr;
  const double value = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0') {
    throw ValidationError("attribute '" + key + "' on <" + node.name + "> is not a number");
  }
  return value;
}

int require_int(const XmlNode & node, const std::string & key)
{
  return static_cast<int>(std::lround(require_double(node, key)));
}

void require_children_in(const XmlNode & node, const std::set<std::string> & allowed)
{
  for (const auto & c : node.children) {
    if (!allowed.count(c.name)) {
      throw ValidationError("unsupported OpenSCENARIO element: " + c.name);
    }
  }
}

// --- .xosc writing -----------------------------------------------------------

void append_vehicle(XmlNode & object, const EntitySpec & e)
{
  XmlNode & veh = object.child("Vehicle");
  veh.attr("name", std::string("car")).attr("vehicleCategory", std::string("car"));
  XmlNode & box = veh.child("BoundingBox");
  box.child("Center").attr("x", 0.0).attr("y", 0.0).attr("z", e.height / 2.0);
  box.child("Dimensions").attr("width", e.width).attr("length", e.length).attr("height", e.height);
  veh.child("Performance")
    .attr("maxSpeed", 70.0)
    .attr("maxAcceleration", 10.0)
    .attr("maxDeceleration", 10.0);
  XmlNode & axles = veh.child("Axles");
  axles.child("FrontAxle")
    .attr("maxSteering", 0.5)
    .attr("wheelDiameter", 0.6)
    .attr("trackWidth", e.width)
    .attr("positionX", 3.1)
    .attr("positionZ", 0.3);
  axles.child("RearAxle")
    .attr("maxSteering", 0.0)
    .attr("wheelDiameter", 0.6)
    .attr("trackWidth", e.width)
    .attr("positionX", 0.0)
    .attr("positionZ", 0.3);
  veh.child("Properties");
}

void append_init_private(XmlNode & actions, const EntitySpec & e)
{
  XmlNode & priv = actions.child("Private");
  priv.attr("entityRef", e.name);
  XmlNode & teleport = priv.child("PrivateAction").child("TeleportAction");
  teleport.child("Position")
    .child("LanePosition")
    .attr("roadId", std::string("1"))
    .attr("laneId", e.lane)
    .attr("s", e.s0)
    .attr("offset", e.offset);
  XmlNode & speed = priv.child("PrivateAction").child("LongitudinalAction").child("SpeedAction");
  speed.child("SpeedActionDynamics")
    .attr("dynamicsShape", std::string("linear"))
    .attr("value", 0.0)
    .attr("dynamicsDimension", std::string("time"));
  speed.child("SpeedActionTarget").child("AbsoluteTargetSpeed").attr("value", e.speed);
}

void append_condition(XmlNode & trigger, const std::string & name, const Condition & condition)
{
  XmlNode & cond = trigger.child("ConditionGroup").child("Condition");
  cond.attr("name", name).attr("delay", std::string("0"))
    .attr("conditionEdge", std::string("rising"));
  XmlNode & by_entity = cond.child("ByEntityCondition");
  if (const auto * rel = std::get_if<RelativeLongitudinalDistance>(&condition)) {
    by_entity.child("TriggeringEntities")
      .attr("triggeringEntitiesRule", std::string("any"))
      .child("EntityRef")
      .attr("entityRef", std::string(kChallengerName));
    by_entity.child("EntityCondition")
      .child("RelativeDistanceCondition")
      .attr("entityRef", rel->target)
      .attr("relativeDistanceType", std::string("longitudinal"))
      .attr("value", rel->value)
      .attr("freespace", std::string("false"))
      .attr("rule", rel->rule == DistanceRule::kLessThan ? std::string("lessThan")
                                                         : std::string("greaterThan"));
  } else {
    const auto & traveled = std::get<TraveledDistance>(condition);
    by_entity.child("TriggeringEntities")
      .attr("triggeringEntitiesRule", std::string("any"))
      .child("EntityRef")
      .attr("entityRef", traveled.entity);
    by_entity.child("EntityCondition")
      .child("TraveledDistanceCondition")
      .attr("value", traveled.value);
  }
}

void append_action(XmlNode & event, const std::string & name, const Action & action)
{
  XmlNode & act = event.child("Action");
  act.attr("name", name);
  XmlNode & priv = act.child("PrivateAction");
  if (const auto * speed = std::get_if<SpeedChange>(&action)) {
    XmlNode & sa = priv.child("LongitudinalAction").child("SpeedAction");
    sa.child("SpeedActionDynamics")
      .attr("dynamicsShape", std::string("linear"))
      .attr("value", speed->duration)
      .attr("dynamicsDimension", std::string("time"));
    sa.child("SpeedActionTarget").child("AbsoluteTargetSpeed").attr("value", speed->target_speed);
  } else if (const auto * lane = std::get_if<LaneChange>(&action)) {
    XmlNode & lc = priv.child("LateralAction").child("LaneChangeAction");
    lc.child("LaneChangeActionDynamics")
      .attr("dynamicsShape", std::string("sinusoidal"))
      .attr("value", lane->over_distance)
      .attr("dynamicsDimension", std::string("distance"));
    lc.child("LaneChangeTarget").child("AbsoluteTargetLane").attr("value", lane->target_lane);
  } else {
    const auto & offset = std::get<LaneOffset>(action);
    XmlNode & lo = priv.child("LateralAction").child("LaneOffsetAction");
    lo.attr("continuous", std::string("false"));
    lo.child("LaneOffsetActionDynamics")
      .attr("maxLateralAcc", 1.0)
      .attr("dynamicsShape", std::string("step"));
    lo.child("LaneOffsetTarget").child("AbsoluteTargetLaneOffset").attr("value", offset.value);
  }
}

}  // namespace

std::string write_xosc(const ScenarioDocument & doc)
{
  for (const auto & ev : doc.events) {
    if (ev.actor != doc.challenger.name) {
      throw ValidationError("the subset serializes a single maneuver actor: " + ev.actor);
    }
  }

  XmlNode root{"OpenSCENARIO", {}, {}};
  root.child("FileHeader")
    .attr("revMajor", std::string("1"))
    .attr("revMinor", std::string("1"))
    .attr("date", std::string(kFileDate))
    .attr("description", std::string("scenkit lane change scenario"))
    .attr("author", std::string("scenkit"));
  root.child("RoadNetwork").child("LogicFile").attr("filepath", std::string("road.xodr"));

  XmlNode & entities = root.child("Entities");
  for (const EntitySpec * e : {&doc.ego, &doc.challenger}) {
    XmlNode & object = entities.child("ScenarioObject");
    object.attr("name", e->name);
    append_vehicle(object, *e);
  }

  XmlNode & storyboard = root.child("Storyboard");
  XmlNode & init_actions = storyboard.child("Init").child("Actions");
  append_init_private(init_actions, doc.ego);
  append_init_private(init_actions, doc.challenger);

  if (!doc.events.empty()) {
    XmlNode & story = storyboard.child("Story");
    story.attr("name", std::string("lane_change_story"));
    XmlNode & act = story.child("Act");
    act.attr("name", std::string("lane_change_act"));
    XmlNode & group = act.child("ManeuverGroup");
    group.attr("maximumExecutionCount", std::string("1"))
      .attr("name", std::string("challenger_group"));
    group.child("Actors")
      .attr("selectTriggeringEntities", std::string("false"))
      .child("EntityRef")
      .attr("entityRef", doc.challenger.name);
    XmlNode & maneuver = group.child("Maneuver");
    maneuver.attr("name", std::string("challenger_maneuver"));
    for (const auto & ev : doc.events) {
      XmlNode & event = maneuver.child("Event");
      event.attr("name", ev.name)
        .attr("priority", std::string("overwrite"))
        .attr("maximumExecutionCount", std::string("1"));
      append_action(event, ev.name + "_action", ev.action);
      XmlNode & start = event.child("StartTrigger");
      append_condition(start, ev.name + "_condition", ev.condition);
    }
    act.child("StartTrigger");
  }

  XmlNode & stop = storyboard.child("StopTrigger");
  XmlNode & dist_cond = stop.child("ConditionGroup").child("Condition");
  dist_cond.attr("name", std::string("stop_distance"))
    .attr("delay", std::string("0"))
    .attr("conditionEdge", std::string("rising"));
  XmlNode & by_entity = dist_cond.child("ByEntityCondition");
  by_entity.child("TriggeringEntities")
    .attr("triggeringEntitiesRule", std::string("any"))
    .child("EntityRef")
    .attr("entityRef", doc.stop.entity);
  by_entity.child("EntityCondition")
    .child("TraveledDistanceCondition")
    .attr("value", doc.stop.traveled_distance);
  XmlNode & time_cond = stop.child("ConditionGroup").child("Condition");
  time_cond.attr("name", std::string("stop_timeout"))
    .attr("delay", std::string("0"))
    .attr("conditionEdge", std::string("rising"));
  time_cond.child("ByValueCondition")
    .child("SimulationTimeCondition")
    .attr("value", doc.stop.timeout)
    .attr("rule", std::string("greaterThan"));

  return to_xml(root);
}

namespace
{

EntitySpec parse_entity_shell(const XmlNode & object)
{
  EntitySpec e;
  e.name = require_attr(object, "name");
  const XmlNode & veh = require_child(object, "Vehicle");
  const XmlNode & box = require_child(veh, "BoundingBox");
  const XmlNode & dims = require_child(box, "Dimensions");
  e.width = require_double(dims, "width");
  e.length = require_double(dims, "length");
  e.height = require_double(dims, "height");
  return e;
}

void parse_init_private(const XmlNode & priv, EntitySpec & e)
{
  for (const auto & pa : priv.children) {
    if (pa.name != "PrivateAction") {
      throw ValidationError("unsupported OpenSCENARIO element: " + pa.name);
    }
    if (const XmlNode * teleport = find_child(pa, "TeleportAction")) {
      const XmlNode & lane_pos = require_child(require_child(*teleport, "Position"), "LanePosition");
      e.lane = require_int(lane_pos, "laneId");
      e.s0 = require_double(lane_pos, "s");
      e.offset = require_double(lane_pos, "offset");
    } else if (const XmlNode * lon = find_child(pa, "LongitudinalAction")) {
      const XmlNode & speed = require_child(*lon, "SpeedAction");
      e.speed = require_double(
        require_child(require_child(speed, "SpeedActionTarget"), "AbsoluteTargetSpeed"), "value");
    } else if (!pa.children.empty()) {
      throw ValidationError("unsupported OpenSCENARIO element: " + pa.children.front().name);
    }
  }
}

Condition parse_condition(const XmlNode & cond)
{
  if (const XmlNode * by_entity = find_child(cond, "ByEntityCondition")) {
    const XmlNode & entity_cond = require_child(*by_entity, "EntityCondition");
    const std::string trig_ref = require_attr(
      require_child(require_child(*by_entity, "TriggeringEntities"), "EntityRef"), "entityRef");
    if (const XmlNode * rel = find_child(entity_cond, "RelativeDistanceCondition")) {
      if (require_attr(*rel, "relativeDistanceType") != "longitudinal") {
        throw ValidationError("unsupported RelativeDistanceCondition type");
      }
      const std::string rule = require_attr(*rel, "rule");
      if (rule != "lessThan" && rule != "greaterThan") {
        throw ValidationError("unsupported RelativeDistanceCondition rule: " + rule);
      }
      return RelativeLongitudinalDistance{
        require_attr(*rel, "entityRef"), require_double(*rel, "value"),
        rule == "lessThan" ? DistanceRule::kLessThan : DistanceRule::kGreaterThan};
    }
    if (const XmlNode * traveled = find_child(entity_cond, "TraveledDistanceCondition")) {
      return TraveledDistance{trig_ref, require_double(*traveled, "value")};
    }
    throw ValidationError(
      "unsupported OpenSCENARIO element: " +
      (entity_cond.children.empty() ? std::string("EntityCondition") : entity_cond.children.front().name));
  }
  throw ValidationError("unsupported OpenSCENARIO condition on: " + require_attr(cond, "name"));
}

Action parse_action(const XmlNode & action)
{
  const XmlNode & priv = require_child(action, "PrivateAction");
  if (const XmlNode * lon = find_child(priv, "LongitudinalAction")) {
    const XmlNode & speed = require_child(*lon, "SpeedAction");
    const XmlNode & dyn = require_child(speed, "SpeedActionDynamics");
    return SpeedChange{
      require_double(
        require_child(require_child(speed, "SpeedActionTarget"), "AbsoluteTargetSpeed"), "value"),
      require_double(dyn, "value")};
  }
  if (const XmlNode * lat = find_child(priv, "LateralAction")) {
    if (const XmlNode * lc = find_child(*lat, "LaneChangeAction")) {
      const XmlNode & dyn = require_child(*lc, "LaneChangeActionDynamics");
      if (require_attr(dyn, "dynamicsDimension") != "distance") {
        throw ValidationError("unsupported LaneChangeAction dynamics dimension");
      }
      return LaneChange{
        require_int(
          require_child(require_child(*lc, "LaneChangeTarget"), "AbsoluteTargetLane"), "value"),
        require_double(dyn, "value")};
    }
    if (const XmlNode * lo = find_child(*lat, "LaneOffsetAction")) {
      return LaneOffset{require_double(
        require_child(require_child(*lo, "LaneOffsetTarget"), "AbsoluteTargetLaneOffset"),
        "value")};
    }
    throw ValidationError(
      "unsupported OpenSCENARIO element: " +
      (lat->children.empty() ? std::string("LateralAction") : lat->children.front().name));
  }
  throw ValidationError(
    "unsupported OpenSCENARIO element: " +
    (priv.children.empty() ? std::string("PrivateAction") : priv.children.front().name));
}

}  // namespace

ScenarioDocument parse_xosc(const std::string & text)
{
  const XmlNode root = parse_xml(text);
  if (root.name != "OpenSCENARIO") {
    throw ValidationError("not an OpenSCENARIO document: <" + root.name + ">");
  }
  require_children_in(root, {"FileHeader", "RoadNetwork", "Entities", "Storyboard"});

  ScenarioDocument doc;
  const XmlNode & entities = require_child(root, "Entities");
  std::vector<EntitySpec> shells;
  for (const auto & object : entities.children) {
    if (object.name != "ScenarioObject") {
      throw ValidationError("unsupported OpenSCENARIO element: " + object.name);
    }
    shells.push_back(parse_entity_shell(object));
  }
  if (shells.size() != 2) {
    throw ValidationError("the subset requires exactly two scenario objects");
  }

  const XmlNode & storyboard = require_child(root, "Storyboard");
  require_children_in(storyboard, {"Init", "Story", "StopTrigger"});
  const XmlNode & init_actions = require_child(require_child(storyboard, "Init"), "Actions");
  for (const auto & priv : init_actions.children) {
    if (priv.name != "Private") {
      throw ValidationError("unsupported OpenSCENARIO element: " + priv.name);
    }
    const std::string ref = require_attr(priv, "entityRef");
    bool matched = false;
    for (auto & shell : shells) {
      if (shell.name == ref) {
        parse_init_private(priv, shell);
        matched = true;
      }
    }
    if (!matched) {
      throw ValidationError("init action references unknown entity: " + ref);
    }
  }
  doc.ego = shells[0];
  doc.challenger = shells[1];

  if (const XmlNode * story = find_child(storyboard, "Story")) {
    const XmlNode & act = require_child(*story, "Act");
    for (const auto & group : act.children) {
      if (group.name == "StartTrigger") {
        continue;
      }
      if (group.name != "ManeuverGroup") {
        throw ValidationError("unsupported OpenSCENARIO element: " + group.name);
      }
      const std::string actor = require_attr(
        require_child(require_child(group, "Actors"), "EntityRef"), "entityRef");
      const XmlNode & maneuver = require_child(group, "Maneuver");
      for (const auto & event : maneuver.children) {
        if (event.name != "Event") {
          throw ValidationError("unsupported OpenSCENARIO element: " + event.name);
        }
        TriggeredEvent ev;
        ev.name = require_attr(event, "name");
        ev.actor = actor;
        ev.action = parse_action(require_child(event, "Action"));
        const XmlNode & cond = require_child(
          require_child(require_child(event, "StartTrigger"), "ConditionGroup"), "Condition");
        ev.condition = parse_condition(cond);
        doc.events.push_back(ev);
      }
    }
  }

  const XmlNode & stop = require_child(storyboard, "StopTrigger");
  for (const auto & cg : stop.children) {
    const XmlNode & cond = require_child(cg, "Condition");
    if (const XmlNode * by_entity = find_child(cond, "ByEntityCondition")) {
      const XmlNode & traveled =
        require_child(require_child(*by_entity, "EntityCondition"), "TraveledDistanceCondition");
      doc.stop.entity = require_attr(
        require_child(require_child(*by_entity, "TriggeringEntities"), "EntityRef"), "entityRef");
      doc.stop.traveled_distance = require_double(traveled, "value");
    } else if (const XmlNode * by_value = find_child(cond, "ByValueCondition")) {
      doc.stop.timeout =
        require_double(require_child(*by_value, "SimulationTimeCondition"), "value");
    }
  }
  return doc;
}

std::string write_xodr(const RoadSpec & road)
{
  XmlNode root{"OpenDRIVE", {}, {}};
  root.child("header")
    .attr("revMajor", std::string("1"))
    .attr("revMinor", std::string("6"))
    .attr("name", std::string("scenkit road"))
    .attr("version", std::string("1.00"))
    .attr("date", std::string(kFileDate));
  XmlNode & r = root.child("road");
  r.attr("name", std::string("road"))
    .attr("length", road.length)
    .attr("id", std::string("1"))
    .attr("junction", std::string("-1"));
  r.child("planView")
    .child("geometry")
    .attr("s", 0.0)
    .attr("x", 0.0)
    .attr("y", 0.0)
    .attr("hdg", 0.0)
    .attr("length", road.length)
    .child("line");
  XmlNode & section = r.child("lanes").child("laneSection");
  section.attr("s", 0.0);
  section.child("center").child("lane").attr("id", 0).attr(
    "type", std::string("none")).attr("level", std::string("false"));
  XmlNode & right = section.child("right");
  for (int lane = -1; lane >= -road.lane_count; --lane) {
    XmlNode & l = right.child("lane");
    l.attr("id", lane).attr("type", std::string("driving")).attr("level", std::string("false"));
    l.child("width")
      .attr("sOffset", 0.0)
      .attr("a", road.lane_width)
      .attr("b", 0.0)
      .attr("c", 0.0)
      .attr("d", 0.0);
  }
  return to_xml(root);
}

RoadSpec parse_xodr(const std::string & text)
{
  const XmlNode root = parse_xml(text);
  if (root.name != "OpenDRIVE") {
    throw ValidationError("not an OpenDRIVE document: <" + root.name + ">");
  }
  const XmlNode & r = require_child(root, "road");
  RoadSpec road;
  road.length = require_double(r, "length");
  const XmlNode & geometry = require_child(require_child(r, "planView"), "geometry");
  if (!find_child(geometry, "line")) {
    throw ValidationError("the subset supports straight-line road geometry only");
  }
  const XmlNode & section = require_child(require_child(r, "lanes"), "laneSection");
  const XmlNode & right = require_child(section, "right");
  road.lane_count = 0;
  road.lane_width = 0.0;
  for (const auto & lane : right.children) {
    if (lane.name != "lane") {
      throw ValidationError("unsupported OpenDRIVE element: " + lane.name);
    }
    if (require_attr(lane, "type") != "driving") {
      continue;
    }
    ++road.lane_count;
    const double width = require_double(require_child(lane, "width"), "a");
    if (road.lane_width == 0.0) {
      road.lane_width = width;
    } else if (std::abs(road.lane_width - width) > 1e-9) {
      throw ValidationError("the subset requires a constant lane width");
    }
  }
  if (road.lane_count < 1) {
    throw ValidationError("road has no driving lanes");
  }
  return road;
}

}  // namespace scenkit
