#pragma once
// JSON forms of scene graphs (SceneDocument), world snapshots and trained
// models.

#include <string>
#include <vector>

#include <json.hpp>

#include "scenekg/error.hpp"
#include "scenekg/metrics.hpp"
#include "scenekg/scene_builder.hpp"
#include "scenekg/scene_model.hpp"

namespace scenekg {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema(const std::string& msg) { throw Error(Errc::SchemaViolation, msg); }

inline const Json& field(const Json& obj, const char* name) {
  if (!obj.is_object()) schema(std::string("expected an object holding '") + name + "'");
  auto it = obj.find(name);
  if (it == obj.end()) schema(std::string("missing field '") + name + "'");
  return *it;
}

inline double number_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_number()) schema(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

inline double number_or(const Json& obj, const char* name, double fallback) {
  return obj.contains(name) ? number_field(obj, name) : fallback;
}

inline std::string string_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_string()) schema(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

inline const Json& array_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_array()) schema(std::string("field '") + name + "' must be an array");
  return v;
}

inline std::int64_t integer_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_number_integer()) schema(std::string("field '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

inline Json attrs_to_json(const Attributes& attrs) {
  Json out = Json::object();
  for (const auto& [key, value] : attrs) {
    if (const double* d = std::get_if<double>(&value)) {
      out[key] = *d;
    } else if (const std::string* s = std::get_if<std::string>(&value)) {
      out[key] = *s;
    } else {
      const Pair& p = std::get<Pair>(value);
      out[key] = Json::array({p.first, p.second});
    }
  }
  return out;
}

inline Attributes attrs_from_json(const Json& j) {
  if (!j.is_object()) schema("'attrs' must be an object");
  Attributes out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_number()) {
      out.emplace(it.key(), v.get<double>());
    } else if (v.is_string()) {
      out.emplace(it.key(), v.get<std::string>());
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out.emplace(it.key(), Pair{v[0].get<double>(), v[1].get<double>()});
    } else {
      schema("attribute '" + it.key() + "' must be a number, string or [number, number]");
    }
  }
  return out;
}

inline geom::Polyline points_from_json(const Json& j, const char* what) {
  if (!j.is_array()) schema(std::string("'") + what + "' must be an array of [x, y]");
  geom::Polyline out;
  for (const Json& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      schema(std::string("'") + what + "' must contain [x, y] number pairs");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

inline Json points_to_json(const geom::Polyline& pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(Json::array({p.x, p.y}));
  return out;
}

inline std::vector<std::string> strings_from_json(const Json& j, const char* what) {
  if (!j.is_array()) schema(std::string("'") + what + "' must be an array of strings");
  std::vector<std::string> out;
  for (const Json& s : j) {
    if (!s.is_string()) schema(std::string("'") + what + "' must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SceneDocument

inline Json to_json(const SceneGraph& g) {
  Json nodes = Json::array();
  for (NodeIndex i : g.nodes_by_id()) {
    const Node& n = g.node(i);
    nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"attrs", detail::attrs_to_json(n.attrs)}});
  }
  Json edges = Json::array();
  for (NodeIndex i : g.nodes_by_id()) {
    for (EdgeIndex e : g.out_edges(i)) {
      const Edge& edge = g.edge(e);
      edges.push_back({{"src", g.node(edge.source).id},
                       {"kind", to_string(edge.kind)},
                       {"dst", g.node(edge.target).id},
                       {"attrs", detail::attrs_to_json(edge.attrs)}});
    }
  }
  Json doc{{"scene_id", g.scene_id()}, {"timestamp_us", g.timestamp_us()}, {"nodes", nodes}, {"edges", edges}};
  doc["root_id"] = g.has_root() ? Json(g.root_id()) : Json(nullptr);
  return doc;
}

/// Rebuilds and validates a graph. Malformed documents raise SchemaViolation;
/// model-level violations keep their own codes.
inline SceneGraph scene_from_json(const Json& doc) {
  using namespace detail;
  SceneGraph g(string_field(doc, "scene_id"), integer_field(doc, "timestamp_us"));
  for (const Json& n : array_field(doc, "nodes")) {
    const std::string kind_name = string_field(n, "kind");
    const auto kind = parse_node_kind(kind_name);
    if (!kind) schema("unknown node kind '" + kind_name + "'");
    g.add_node({string_field(n, "id"), *kind, n.contains("attrs") ? attrs_from_json(n.at("attrs")) : Attributes{}});
  }
  for (const Json& e : array_field(doc, "edges")) {
    const std::string kind_name = string_field(e, "kind");
    const auto kind = parse_edge_kind(kind_name);
    if (!kind) schema("unknown edge kind '" + kind_name + "'");
    g.add_edge(string_field(e, "src"), *kind, string_field(e, "dst"),
               e.contains("attrs") ? attrs_from_json(e.at("attrs")) : Attributes{});
  }
  g.validate();
  if (doc.contains("root_id") && !doc.at("root_id").is_null()) {
    if (!doc.at("root_id").is_string() || doc.at("root_id").get<std::string>() != g.root_id())
      throw Error(Errc::InvalidScene, "root_id does not match the ego's On target");
  }
  return g;
}

// ---------------------------------------------------------------------------
// WorldSnapshot

inline Json to_json(const WorldSnapshot& s) {
  using detail::points_to_json;
  Json lanes = Json::array();
  for (const auto& l : s.map.lanes)
    lanes.push_back({{"id", l.id}, {"centerline", points_to_json(l.centerline)}, {"speed_limit", l.speed_limit},
                     {"width", l.width}});
  Json groups = Json::array();
  for (const auto& g : s.map.groups) {
    Json gj{{"id", g.id}, {"lanes", g.lanes}};
    if (!g.boundary_types.empty()) gj["boundary_types"] = g.boundary_types;
    groups.push_back(gj);
  }
  Json connectors = Json::array();
  for (const auto& c : s.map.connectors)
    connectors.push_back({{"id", c.id}, {"turn_type", c.turn_type}, {"centerline", points_to_json(c.centerline)},
                          {"width", c.width}});
  Json successors = Json::array();
  for (const auto& l : s.map.successors) successors.push_back({{"from", l.from}, {"to", l.to}});
  Json crosswalks = Json::array();
  for (const auto& c : s.map.crosswalks) crosswalks.push_back({{"id", c.id}, {"polygon", points_to_json(c.polygon)}});
  Json actors = Json::array();
  for (const auto& a : s.actors)
    actors.push_back({{"id", a.id}, {"type", a.type}, {"x", a.pose.x}, {"y", a.pose.y}, {"heading", a.pose.heading},
                      {"speed", a.speed}, {"length", a.dims.length}, {"width", a.dims.width}});
  return {{"scene_id", s.scene_id},
          {"timestamp_us", s.timestamp_us},
          {"ego",
           {{"x", s.ego.pose.x}, {"y", s.ego.pose.y}, {"heading", s.ego.pose.heading}, {"speed", s.ego.speed},
            {"length", s.ego.dims.length}, {"width", s.ego.dims.width}}},
          {"actors", actors},
          {"map",
           {{"lanes", lanes}, {"groups", groups}, {"connectors", connectors}, {"successors", successors},
            {"crosswalks", crosswalks}}}};
}

inline WorldSnapshot snapshot_from_json(const Json& j) {
  using namespace detail;
  WorldSnapshot s;
  s.scene_id = string_field(j, "scene_id");
  s.timestamp_us = j.contains("timestamp_us") ? integer_field(j, "timestamp_us") : 0;
  const Json& ego = field(j, "ego");
  s.ego.pose = {number_field(ego, "x"), number_field(ego, "y"), number_or(ego, "heading", 0.0)};
  s.ego.speed = number_or(ego, "speed", 0.0);
  s.ego.dims = {number_or(ego, "length", Dimensions{}.length), number_or(ego, "width", Dimensions{}.width)};
  if (j.contains("actors")) {
    for (const Json& a : array_field(j, "actors")) {
      ActorState actor;
      actor.id = string_field(a, "id");
      actor.type = string_field(a, "type");
      actor.pose = {number_field(a, "x"), number_field(a, "y"), number_or(a, "heading", 0.0)};
      actor.speed = number_or(a, "speed", 0.0);
      actor.dims = {number_or(a, "length", Dimensions{}.length), number_or(a, "width", Dimensions{}.width)};
      s.actors.push_back(std::move(actor));
    }
  }
  const Json& map = field(j, "map");
  if (map.contains("lanes")) {
    for (const Json& l : array_field(map, "lanes")) {
      LaneGeometry lane;
      lane.id = string_field(l, "id");
      lane.centerline = points_from_json(field(l, "centerline"), "centerline");
      lane.speed_limit = number_or(l, "speed_limit", lane.speed_limit);
      lane.width = number_or(l, "width", lane.width);
      s.map.lanes.push_back(std::move(lane));
    }
  }
  if (map.contains("groups")) {
    for (const Json& g : array_field(map, "groups")) {
      LaneGroup group;
      group.id = string_field(g, "id");
      group.lanes = strings_from_json(field(g, "lanes"), "lanes");
      if (g.contains("boundary_types")) group.boundary_types = strings_from_json(g.at("boundary_types"), "boundary_types");
      s.map.groups.push_back(std::move(group));
    }
  }
  if (map.contains("connectors")) {
    for (const Json& c : array_field(map, "connectors")) {
      ConnectorGeometry con;
      con.id = string_field(c, "id");
      con.turn_type = string_field(c, "turn_type");
      con.centerline = points_from_json(field(c, "centerline"), "centerline");
      con.width = number_or(c, "width", con.width);
      s.map.connectors.push_back(std::move(con));
    }
  }
  if (map.contains("successors"))
    for (const Json& l : array_field(map, "successors")) s.map.successors.push_back({string_field(l, "from"), string_field(l, "to")});
  if (map.contains("crosswalks")) {
    for (const Json& c : array_field(map, "crosswalks"))
      s.map.crosswalks.push_back({string_field(c, "id"), points_from_json(field(c, "polygon"), "polygon")});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Model

inline constexpr const char* kModelFormat = "scenekg-model/1";

inline Json to_json(const Model& m) {
  Json counts = Json::object();
  for (const auto& [key, c] : m.index.counts) counts[key] = c;
  Json constants = Json::object();
  for (const auto& [type, x] : m.params.type_constants) constants[type] = x;
  return {{"format", kModelFormat},
          {"counts", counts},
          {"n", m.index.n},
          {"n_policy", to_string(m.index.n_policy)},
          {"calibration", {{"min", m.calibration.min}, {"max", m.calibration.max}}},
          {"type_constants", constants},
          {"default_type_constant", m.params.default_type_constant},
          {"obstacle_types", m.params.obstacle_types},
          {"catalog_hash", m.catalog_hash}};
}

inline Model model_from_json(const Json& j) {
  using namespace detail;
  if (string_field(j, "format") != kModelFormat) schema("unsupported model format");
  Model m;
  const Json& counts = field(j, "counts");
  if (!counts.is_object()) schema("'counts' must be an object");
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (!it.value().is_number_unsigned()) schema("count for '" + it.key() + "' must be a non-negative integer");
    m.index.counts[it.key()] = it.value().get<std::uint64_t>();
  }
  const Json& n = field(j, "n");
  if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0) schema("'n' must be a positive integer");
  m.index.n = n.get<std::uint64_t>();
  try {
    m.index.n_policy = parse_n_policy(string_field(j, "n_policy"));
  } catch (const Error& e) {
    schema(e.what());
  }
  const Json& cal = field(j, "calibration");
  for (const char* which : {"min", "max"}) {
    const Json& arr = array_field(cal, which);
    if (arr.size() != 3) schema(std::string("calibration '") + which + "' needs 3 values");
    auto& dst = std::string_view(which) == "min" ? m.calibration.min : m.calibration.max;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!arr[i].is_number()) schema("calibration values must be numbers");
      dst[i] = arr[i].get<double>();
    }
  }
  for (std::size_t i = 0; i < 3; ++i)
    if (m.calibration.min[i] > m.calibration.max[i]) schema("calibration min exceeds max");
  m.params.type_constants.clear();
  const Json& constants = field(j, "type_constants");
  if (!constants.is_object()) schema("'type_constants' must be an object");
  for (auto it = constants.begin(); it != constants.end(); ++it) {
    if (!it.value().is_number()) schema("type constant for '" + it.key() + "' must be a number");
    m.params.type_constants[it.key()] = it.value().get<double>();
  }
  m.params.default_type_constant = number_field(j, "default_type_constant");
  m.params.obstacle_types.clear();
  for (auto& t : strings_from_json(field(j, "obstacle_types"), "obstacle_types")) m.params.obstacle_types.insert(t);
  m.catalog_hash = string_field(j, "catalog_hash");
  return m;
}

}  // namespace scenekg
