#pragma once
// Builds a SceneGraph from a world-model snapshot.
//
// Pipeline: filter_radius -> segment_lanes (per parallel group) -> connector
// and successor wiring -> crosswalk On-edges -> place_actor for ego and every
// actor. The ego's segment becomes the scene root.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/geometry.hpp"
#include "scenekg/scene_model.hpp"

namespace scenekg {

inline constexpr double kDefaultLaneWidth = 3.5;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, counter-clockwise from +x
};

struct Dimensions {
  double length = 4.5;
  double width = 1.9;
};

struct EgoState {
  Pose pose;
  double speed = 0.0;
  Dimensions dims;
};

struct ActorState {
  std::string id;
  std::string type;
  Pose pose;
  double speed = 0.0;
  Dimensions dims;
};

struct LaneGeometry {
  std::string id;
  geom::Polyline centerline;
  double speed_limit = 13.9;
  double width = kDefaultLaneWidth;
};

/// Same-direction lanes of one road, ordered left to right in driving
/// direction. `boundary_types` has lanes.size() + 1 entries (or is empty for
/// defaults: solid outer lines, dashed inner lines).
struct LaneGroup {
  std::string id;
  std::vector<std::string> lanes;
  std::vector<std::string> boundary_types;
};

/// One legal movement through an intersection or roundabout.
struct ConnectorGeometry {
  std::string id;
  std::string turn_type;
  geom::Polyline centerline;
  double width = kDefaultLaneWidth;
};

/// Drivable continuation between two lanes/connectors.
struct Link {
  std::string from;
  std::string to;
};

struct CrosswalkGeometry {
  std::string id;
  geom::Polygon polygon;
};

struct MapData {
  std::vector<LaneGeometry> lanes;
  std::vector<LaneGroup> groups;
  std::vector<ConnectorGeometry> connectors;
  std::vector<Link> successors;
  std::vector<CrosswalkGeometry> crosswalks;
};

struct WorldSnapshot {
  std::string scene_id;
  std::int64_t timestamp_us = 0;
  EgoState ego;
  std::vector<ActorState> actors;
  MapData map;
};

struct BuildConfig {
  double radius = 50.0;
  double max_segment = kMaxLaneLength;
};

// ---------------------------------------------------------------------------
// Radius filter

inline geom::Vec2 center_of(const geom::Polyline& line) { return geom::point_at(line, 0.5 * geom::arclength(line)); }

/// Keeps map elements and actors whose center lies within `radius` of the ego
/// (inclusive). Groups lose filtered lanes; links to dropped elements vanish.
inline WorldSnapshot filter_radius(const WorldSnapshot& snap, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidConfig, "radius must be > 0");
  const geom::Vec2 ego{snap.ego.pose.x, snap.ego.pose.y};
  auto within = [&](geom::Vec2 p) { return geom::distance(p, ego) <= radius; };

  WorldSnapshot out;
  out.scene_id = snap.scene_id;
  out.timestamp_us = snap.timestamp_us;
  out.ego = snap.ego;
  std::set<std::string, std::less<>> kept;
  for (const auto& lane : snap.map.lanes) {
    if (within(center_of(lane.centerline))) {
      out.map.lanes.push_back(lane);
      kept.insert(lane.id);
    }
  }
  for (const auto& c : snap.map.connectors) {
    if (within(center_of(c.centerline))) {
      out.map.connectors.push_back(c);
      kept.insert(c.id);
    }
  }
  for (const auto& group : snap.map.groups) {
    LaneGroup g = group;
    // Lanes outside the radius leave the group but keep their boundary slots,
    // so the remaining lanes still meet the markers they originally touched.
    bool any = false;
    for (auto& id : g.lanes) {
      if (kept.contains(id)) {
        any = true;
      } else {
        id.clear();
      }
    }
    if (any) out.map.groups.push_back(std::move(g));
  }
  for (const auto& link : snap.map.successors) {
    if (kept.contains(link.from) && kept.contains(link.to)) out.map.successors.push_back(link);
  }
  for (const auto& cw : snap.map.crosswalks) {
    if (within(geom::vertex_centroid(cw.polygon))) out.map.crosswalks.push_back(cw);
  }
  for (const auto& actor : snap.actors) {
    if (within({actor.pose.x, actor.pose.y})) out.actors.push_back(actor);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lane segmentation

struct LaneSegment {
  std::string id;
  geom::Polyline centerline;
  double length = 0.0;
  geom::Polygon footprint;
};

struct LaneChain {
  std::string lane_id;
  double arclength = 0.0;
  double speed_limit = 0.0;
  std::vector<LaneSegment> segments;
};

/// One LaneMarker node: boundary `boundary` of the group at segment index
/// `index`, touching the listed lane segments on the given sides.
struct MarkerSegment {
  std::string id;
  std::string boundary_type;
  std::size_t boundary = 0;
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> attached;  // (lane segment id, side)
};

struct SegmentedGroup {
  std::size_t segments_per_lane = 0;
  std::vector<LaneChain> chains;
  std::vector<MarkerSegment> markers;
};

inline std::string segment_id(const std::string& base, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "#%03zu", index);
  return base + buf;
}

/// Number of equal pieces so that no piece of `length` exceeds `max_segment`.
inline std::size_t segment_count(double length, double max_segment) {
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(length / max_segment - 1e-9)));
  while (length / static_cast<double>(k) > max_segment) ++k;
  return k;
}

/// Splits the group's lanes into the same number of equal-arclength segments
/// and creates the lane-marker segments between and beside them. Lanes with
/// an empty id are placeholders for lanes removed by the radius filter.
inline SegmentedGroup segment_lanes(const LaneGroup& group,
                                    const std::vector<const LaneGeometry*>& lanes,
                                    double max_segment = kMaxLaneLength) {
  if (!(max_segment > 0.0) || max_segment > kMaxLaneLength)
    throw Error(Errc::InvalidConfig, "max_segment must lie in (0, " + std::to_string(kMaxLaneLength) + "]");
  SegmentedGroup out;
  double longest = 0.0;
  for (const LaneGeometry* lane : lanes) {
    if (lane == nullptr) continue;
    const double len = geom::arclength(lane->centerline);
    if (lane->centerline.size() < 2 || !(len > 0.0))
      throw Error(Errc::DegenerateLane, "lane '" + lane->id + "' has no positive length");
    longest = std::max(longest, len);
  }
  if (longest == 0.0) return out;
  const std::size_t k = segment_count(longest, max_segment);
  out.segments_per_lane = k;

  const std::size_t boundaries = lanes.size() + 1;
  std::vector<std::string> types = group.boundary_types;
  if (types.size() != boundaries) {
    types.assign(boundaries, "dashed");
    types.front() = "solid";
    types.back() = "solid";
  }
  // markers[b][i] -> index into out.markers, created lazily.
  std::vector<std::vector<std::optional<std::size_t>>> marker_at(boundaries, std::vector<std::optional<std::size_t>>(k));
  auto marker = [&](std::size_t b, std::size_t i) -> MarkerSegment& {
    auto& slot = marker_at[b][i];
    if (!slot) {
      slot = out.markers.size();
      out.markers.push_back({segment_id(group.id + ".m" + std::to_string(b), i), types[b], b, i, {}});
    }
    return out.markers[*slot];
  };

  for (std::size_t li = 0; li < lanes.size(); ++li) {
    const LaneGeometry* lane = lanes[li];
    if (lane == nullptr) continue;
    LaneChain chain;
    chain.lane_id = lane->id;
    chain.arclength = geom::arclength(lane->centerline);
    chain.speed_limit = lane->speed_limit;
    const double piece = chain.arclength / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double s0 = piece * static_cast<double>(i);
      const double s1 = i + 1 == k ? chain.arclength : piece * static_cast<double>(i + 1);
      LaneSegment seg;
      seg.id = segment_id(lane->id, i);
      seg.centerline = geom::slice(lane->centerline, s0, s1);
      seg.length = piece;
      seg.footprint = geom::footprint(seg.centerline, lane->width);
      marker(li, i).attached.emplace_back(seg.id, "left");
      marker(li + 1, i).attached.emplace_back(seg.id, "right");
      chain.segments.push_back(std::move(seg));
    }
    out.chains.push_back(std::move(chain));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Actor placement

/// Footprint of a drivable node (lane segment or connector).
struct Placeable {
  std::string id;
  geom::Polygon footprint;
};

inline geom::Polygon actor_box(const Pose& pose, const Dimensions& dims) {
  return geom::oriented_box({pose.x, pose.y}, pose.heading, dims.length, dims.width);
}

/// Id of the footprint with the largest overlap with `box`; nullopt when the
/// box touches none. Ties (within 1e-9 relative) go to the smallest id.
inline std::optional<std::string> place_actor(const geom::Polygon& box, const std::vector<Placeable>& targets) {
  if (targets.empty()) throw Error(Errc::NoInfrastructure, "no lane or connector segments to place on");
  const Placeable* best = nullptr;
  double best_area = 0.0;
  for (const Placeable& t : targets) {
    const double a = geom::overlap_area(t.footprint, box);
    if (a <= 0.0) continue;
    const double tol = 1e-9 * std::max(a, best_area);
    if (best == nullptr || a > best_area + tol || (std::abs(a - best_area) <= tol && t.id < best->id)) {
      best = &t;
      best_area = a;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->id;
}

// ---------------------------------------------------------------------------
// Scene assembly

struct BuildResult {
  SceneGraph graph;
  std::vector<std::string> dropped_actors;  // zero overlap with any segment
};

inline void validate_snapshot(const WorldSnapshot& snap) {
  std::set<std::string, std::less<>> ids;
  auto claim = [&](const std::string& id, const char* what) {
    if (id.empty()) throw Error(Errc::InvalidSnapshot, std::string(what) + " with empty id");
    if (!ids.insert(id).second) throw Error(Errc::InvalidSnapshot, "duplicate id '" + id + "'");
  };
  for (const auto& lane : snap.map.lanes) {
    claim(lane.id, "lane");
    if (lane.centerline.size() < 2 || !(geom::arclength(lane.centerline) > 0.0))
      throw Error(Errc::DegenerateLane, "lane '" + lane.id + "' needs >= 2 points and positive length");
    if (!(lane.speed_limit >= 0.0) || !(lane.width > 0.0))
      throw Error(Errc::InvalidSnapshot, "lane '" + lane.id + "' has invalid speed limit or width");
  }
  for (const auto& c : snap.map.connectors) {
    claim(c.id, "connector");
    if (c.centerline.size() < 2 || !(geom::arclength(c.centerline) > 0.0))
      throw Error(Errc::DegenerateLane, "connector '" + c.id + "' needs >= 2 points and positive length");
  }
  for (const auto& cw : snap.map.crosswalks) {
    claim(cw.id, "crosswalk");
    if (cw.polygon.size() < 3) throw Error(Errc::InvalidSnapshot, "crosswalk '" + cw.id + "' needs >= 3 points");
  }
  for (const auto& a : snap.actors) {
    claim(a.id, "actor");
    if (!(a.speed >= 0.0) || !(a.dims.length > 0.0) || !(a.dims.width > 0.0))
      throw Error(Errc::InvalidSnapshot, "actor '" + a.id + "' has invalid speed or dimensions");
  }
  if (!(snap.ego.speed >= 0.0) || !(snap.ego.dims.length > 0.0) || !(snap.ego.dims.width > 0.0))
    throw Error(Errc::InvalidSnapshot, "ego has invalid speed or dimensions");
  std::set<std::string, std::less<>> lane_ids;
  for (const auto& lane : snap.map.lanes) lane_ids.insert(lane.id);
  std::set<std::string, std::less<>> grouped;
  for (const auto& g : snap.map.groups) {
    for (const auto& id : g.lanes) {
      if (!lane_ids.contains(id)) throw Error(Errc::InvalidSnapshot, "group '" + g.id + "' references unknown lane '" + id + "'");
      if (!grouped.insert(id).second) throw Error(Errc::InvalidSnapshot, "lane '" + id + "' is in more than one group");
    }
    if (!g.boundary_types.empty() && g.boundary_types.size() != g.lanes.size() + 1)
      throw Error(Errc::InvalidSnapshot, "group '" + g.id + "' needs lanes+1 boundary types");
  }
  std::set<std::string, std::less<>> drivable = lane_ids;
  for (const auto& c : snap.map.connectors) drivable.insert(c.id);
  for (const auto& link : snap.map.successors) {
    if (!drivable.contains(link.from) || !drivable.contains(link.to))
      throw Error(Errc::InvalidSnapshot, "successor link '" + link.from + "' -> '" + link.to + "' must join known lanes/connectors");
  }
}

inline constexpr const char* kEgoNodeId = "ego";

inline BuildResult build_scene(const WorldSnapshot& input, const BuildConfig& config = {}) {
  validate_snapshot(input);
  if (!(config.max_segment > 0.0) || config.max_segment > kMaxLaneLength)
    throw Error(Errc::InvalidConfig, "max_segment must lie in (0, 10]");
  const WorldSnapshot snap = filter_radius(input, config.radius);

  BuildResult result{SceneGraph(snap.scene_id, snap.timestamp_us), {}};
  SceneGraph& g = result.graph;

  std::unordered_map<std::string, const LaneGeometry*> lane_by_id;
  for (const auto& lane : snap.map.lanes) lane_by_id.emplace(lane.id, &lane);

  // Every retained lane belongs to exactly one group; ungrouped lanes form
  // singleton groups named after the lane.
  std::vector<LaneGroup> groups = snap.map.groups;
  {
    std::set<std::string, std::less<>> grouped;
    for (const auto& gr : groups)
      for (const auto& id : gr.lanes) grouped.insert(id);
    for (const auto& lane : snap.map.lanes)
      if (!grouped.contains(lane.id)) groups.push_back({lane.id, {lane.id}, {}});
  }

  std::vector<Placeable> placeables;
  std::unordered_map<std::string, std::string> first_segment, last_segment;
  for (const auto& gr : groups) {
    std::vector<const LaneGeometry*> members;
    for (const auto& id : gr.lanes) members.push_back(id.empty() ? nullptr : lane_by_id.at(id));
    SegmentedGroup seg = segment_lanes(gr, members, config.max_segment);
    for (const auto& chain : seg.chains) {
      for (std::size_t i = 0; i < chain.segments.size(); ++i) {
        const LaneSegment& s = chain.segments[i];
        g.add_node({s.id, NodeKind::Lane, {{"speed_limit", chain.speed_limit}, {"length", s.length}}});
        if (i > 0) g.add_edge(chain.segments[i - 1].id, EdgeKind::Next, s.id);
        placeables.push_back({s.id, s.footprint});
      }
      first_segment[chain.lane_id] = chain.segments.front().id;
      last_segment[chain.lane_id] = chain.segments.back().id;
    }
    for (const auto& m : seg.markers) {
      g.add_node({m.id, NodeKind::LaneMarker, {{"boundary_type", m.boundary_type}}});
      for (const auto& [lane_seg, side] : m.attached) g.add_edge(lane_seg, EdgeKind::ConnectedTo, m.id, {{"side", side}});
    }
  }

  for (const auto& c : snap.map.connectors) {
    g.add_node({c.id, NodeKind::Connector, {{"turn_type", c.turn_type}, {"length", geom::arclength(c.centerline)}}});
    placeables.push_back({c.id, geom::footprint(c.centerline, c.width)});
    first_segment[c.id] = c.id;
    last_segment[c.id] = c.id;
  }

  for (const auto& link : snap.map.successors) {
    const std::string& from = last_segment.at(link.from);
    const std::string& to = first_segment.at(link.to);
    bool exists = false;
    for (const auto& nb : g.neighbors(from, Direction::Out, EdgeKind::Next)) exists |= g.node(nb.node).id == to;
    if (!exists) g.add_edge(from, EdgeKind::Next, to);
  }

  std::sort(placeables.begin(), placeables.end(), [](const Placeable& a, const Placeable& b) { return a.id < b.id; });

  for (const auto& cw : snap.map.crosswalks) {
    g.add_node({cw.id, NodeKind::Crosswalk, {}});
    const geom::Polygon hull = geom::convex_hull(cw.polygon);
    for (const auto& p : placeables) {
      if (geom::overlap_area(p.footprint, hull) > 1e-9) g.add_edge(cw.id, EdgeKind::On, p.id);
    }
  }

  if (placeables.empty()) throw Error(Errc::NoInfrastructure, "scene '" + snap.scene_id + "' has no lane or connector within radius");
  const auto ego_target = place_actor(actor_box(snap.ego.pose, snap.ego.dims), placeables);
  if (!ego_target) throw Error(Errc::NoEgoPlacement, "ego overlaps no lane or connector in scene '" + snap.scene_id + "'");
  g.add_node({kEgoNodeId,
              NodeKind::Ego,
              {{"velocity", snap.ego.speed}, {"dimensions", Pair{snap.ego.dims.length, snap.ego.dims.width}}}});
  g.add_edge(kEgoNodeId, EdgeKind::On, *ego_target);

  const geom::Vec2 ego_pos{snap.ego.pose.x, snap.ego.pose.y};
  const geom::Vec2 fwd = geom::unit_from_heading(snap.ego.pose.heading);
  const geom::Vec2 left = geom::left_normal(fwd);
  for (const auto& actor : snap.actors) {
    const auto target = place_actor(actor_box(actor.pose, actor.dims), placeables);
    if (!target) {
      result.dropped_actors.push_back(actor.id);
      continue;
    }
    const geom::Vec2 rel = geom::Vec2{actor.pose.x, actor.pose.y} - ego_pos;
    g.add_node({actor.id,
                NodeKind::Object,
                {{"object_type", actor.type},
                 {"distance", Pair{geom::dot(rel, fwd), geom::dot(rel, left)}},
                 {"velocity", actor.speed},
                 {"dimensions", Pair{actor.dims.length, actor.dims.width}}}});
    g.add_edge(actor.id, EdgeKind::On, *target);
  }

  g.validate();
  return result;
}

}  // namespace scenekg
