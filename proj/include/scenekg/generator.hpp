#pragma once
// Deterministic synthetic scenes with known sub-scene signatures.
//
// Each template lays out a small road map in local coordinates together with
// an abstract description of the segment graph the builder is expected to
// produce (segment ids, Next links, crosswalk coverage). The planted
// signature is read off that abstract description, so it does not depend on
// the builder or on the pattern matcher.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/geometry.hpp"
#include "scenekg/json_io.hpp"
#include "scenekg/scene_builder.hpp"
#include "scenekg/subscene_catalog.hpp"

namespace scenekg::gen {

inline constexpr std::array<std::string_view, 6> kTemplateNames{"straight",   "t_intersection", "four_way",
                                                                "roundabout", "crosswalk",      "parking_lot"};

enum class Template : std::uint8_t { Straight, TIntersection, FourWay, Roundabout, Crosswalk, ParkingLot };

inline std::string_view to_string(Template t) { return kTemplateNames[static_cast<std::size_t>(t)]; }

struct Normal {
  double mean = 0.0;
  double sd = 0.0;
};

struct GeneratorSpec {
  std::uint64_t seed = 0;
  std::size_t scenes = 100;
  std::array<double, 6> weights{1, 1, 1, 1, 1, 1};
  double actor_mean = 1.5;
  std::size_t actor_max = 4;
  std::map<std::string, double> actor_types{{"vehicle", 0.6},      {"pedestrian", 0.15}, {"bicycle", 0.1},
                                            {"traffic_cone", 0.05}, {"barrier", 0.05},   {"generic_object", 0.05}};
  Normal ego_speed{8.0, 3.0};
  Normal actor_speed{6.0, 3.0};
};

inline void validate(const GeneratorSpec& spec) {
  double total = 0.0;
  for (double w : spec.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidSpec, "template weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidSpec, "template weights must sum to > 0");
  if (!(spec.actor_mean >= 0.0) || !std::isfinite(spec.actor_mean))
    throw Error(Errc::InvalidSpec, "actors.mean must be finite and >= 0");
  double type_total = 0.0;
  for (const auto& [type, w] : spec.actor_types) {
    if (type.empty() || !(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidSpec, "actor type weights must be >= 0");
    type_total += w;
  }
  if (spec.actor_max > 0 && !(type_total > 0.0)) throw Error(Errc::InvalidSpec, "actor type weights must sum to > 0");
  for (const Normal* n : {&spec.ego_speed, &spec.actor_speed})
    if (!std::isfinite(n->mean) || !(n->sd >= 0.0) || !std::isfinite(n->sd))
      throw Error(Errc::InvalidSpec, "speed distributions need a finite mean and sd >= 0");
}

/// Reads a spec document; unknown keys are rejected.
inline GeneratorSpec spec_from_json(const Json& j) {
  auto fail = [](const std::string& msg) -> void { throw Error(Errc::InvalidSpec, msg); };
  auto number = [&](const Json& v, const std::string& what) {
    if (!v.is_number()) fail("'" + what + "' must be a number");
    return v.get<double>();
  };
  auto check_keys = [&](const Json& obj, std::initializer_list<std::string_view> keys, const std::string& where) {
    if (!obj.is_object()) fail("'" + where + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) fail("unknown key '" + it.key() + "' in " + where);
  };
  auto normal = [&](const Json& v, const std::string& what) {
    check_keys(v, {"mean", "sd"}, what);
    if (!v.contains("mean")) fail("'" + what + ".mean' is required");
    return Normal{number(v.at("mean"), what + ".mean"), v.contains("sd") ? number(v.at("sd"), what + ".sd") : 0.0};
  };

  check_keys(j, {"seed", "scenes", "weights", "actors", "speeds"}, "spec");
  GeneratorSpec spec;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail("'seed' must be a non-negative integer");
    spec.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("scenes")) {
    if (!j.at("scenes").is_number_unsigned()) fail("'scenes' must be a non-negative integer");
    spec.scenes = j.at("scenes").get<std::size_t>();
  }
  if (j.contains("weights")) {
    const Json& w = j.at("weights");
    if (!w.is_object()) fail("'weights' must be an object");
    spec.weights.fill(0.0);
    for (auto it = w.begin(); it != w.end(); ++it) {
      auto pos = std::find(kTemplateNames.begin(), kTemplateNames.end(), it.key());
      if (pos == kTemplateNames.end()) fail("unknown template '" + it.key() + "'");
      spec.weights[static_cast<std::size_t>(pos - kTemplateNames.begin())] = number(it.value(), "weights." + it.key());
    }
  }
  if (j.contains("actors")) {
    const Json& a = j.at("actors");
    check_keys(a, {"mean", "max", "types"}, "actors");
    if (a.contains("mean")) spec.actor_mean = number(a.at("mean"), "actors.mean");
    if (a.contains("max")) {
      if (!a.at("max").is_number_unsigned()) fail("'actors.max' must be a non-negative integer");
      spec.actor_max = a.at("max").get<std::size_t>();
    }
    if (a.contains("types")) {
      if (!a.at("types").is_object()) fail("'actors.types' must be an object");
      spec.actor_types.clear();
      for (auto it = a.at("types").begin(); it != a.at("types").end(); ++it)
        spec.actor_types[it.key()] = number(it.value(), "actors.types." + it.key());
    }
  }
  if (j.contains("speeds")) {
    const Json& s = j.at("speeds");
    check_keys(s, {"ego", "actor"}, "speeds");
    if (s.contains("ego")) spec.ego_speed = normal(s.at("ego"), "speeds.ego");
    if (s.contains("actor")) spec.actor_speed = normal(s.at("actor"), "speeds.actor");
  }
  validate(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Portable randomness: the engine sequence is fixed by the standard, the
// transforms below are ours.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = eng_();
    while (v >= limit);
    return static_cast<std::size_t>(v % n);
  }

  double normal(double mean, double sd) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t poisson(double mean) {
    const double l = std::exp(-mean);
    std::size_t k = 0;
    double p = uniform();
    while (p > l) {
      ++k;
      p *= uniform();
    }
    return k;
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  std::size_t weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      if (x < weights[i]) return i;
      x -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0.0) return i;
    return 0;
  }

 private:
  std::mt19937_64 eng_;
};

/// Independent stream per (seed, scene index).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Abstract segment graph

struct Topology {
  struct Segment {
    bool connector = false;
    std::string turn_type;
  };
  std::map<std::string, Segment> segments;
  std::map<std::string, std::vector<std::string>> next;
  std::set<std::string> crossed;  // segments under a crosswalk
  std::string root;
  std::vector<std::pair<std::string, std::string>> objects;  // (type, segment)

  void link(const std::string& a, const std::string& b) { next[a].push_back(b); }
};

namespace detail {

inline std::map<std::string, std::size_t> hops(const Topology& t, const std::string& from, int limit, bool forward) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, succ] : t.next)
    for (const auto& b : succ) (forward ? adj[a] : adj[b]).push_back(forward ? b : a);
  std::map<std::string, std::size_t> dist{{from, 0}};
  std::vector<std::string> frontier{from};
  for (int d = 1; d <= limit; ++d) {
    std::vector<std::string> nxt;
    for (const auto& s : frontier)
      for (const auto& n : adj[s])
        if (dist.emplace(n, static_cast<std::size_t>(d)).second) nxt.push_back(n);
    frontier = std::move(nxt);
  }
  return dist;
}

}  // namespace detail

/// Signature implied by the abstract segment graph.
inline SubsceneSignature planted_signature(const Topology& t, const CatalogConfig& cfg = {}) {
  const std::string& root = t.root;
  auto seg = [&](const std::string& id) -> const Topology::Segment& { return t.segments.at(id); };
  auto is_lane = [&](const std::string& id) { return !seg(id).connector; };
  auto is_rb = [&](const std::string& id) { return seg(id).connector && seg(id).turn_type == kRoundaboutTurn; };
  auto is_plain_connector = [&](const std::string& id) { return seg(id).connector && !is_rb(id); };
  auto succ = [&](const std::string& id) {
    auto it = t.next.find(id);
    return it == t.next.end() ? std::vector<std::string>{} : it->second;
  };
  auto any_succ = [&](const std::string& id, auto pred) {
    const auto s = succ(id);
    return std::any_of(s.begin(), s.end(), pred);
  };

  std::vector<std::string> names;
  bool lane_pred = false;
  for (const auto& [a, s] : t.next)
    if (is_lane(a) && std::find(s.begin(), s.end(), root) != s.end()) lane_pred = true;
  if (is_lane(root) && (lane_pred || any_succ(root, is_lane))) names.emplace_back("straight_road");
  if (is_rb(root) && any_succ(root, is_rb)) names.emplace_back("on_roundabout");
  if (is_lane(root) && any_succ(root, is_rb)) names.emplace_back("enter_roundabout");
  if (is_rb(root) && any_succ(root, is_lane)) names.emplace_back("leave_roundabout");
  if (is_plain_connector(root)) names.emplace_back("on_intersection");

  if (is_lane(root)) {
    std::vector<std::string> frontier{root};
    bool found = false;
    for (int d = 0; d < cfg.approach_intersection_hops && !found && !frontier.empty(); ++d) {
      std::vector<std::string> nxt;
      for (const auto& l : frontier) {
        if (any_succ(l, is_plain_connector)) found = true;
        for (const auto& s : succ(l))
          if (is_lane(s)) nxt.push_back(s);
      }
      frontier = std::move(nxt);
    }
    if (found) names.emplace_back("approach_intersection");
  }

  const auto ahead_cross = detail::hops(t, root, cfg.approach_crossing_hops, true);
  for (const auto& c : t.crossed)
    if (ahead_cross.contains(c)) {
      names.emplace_back("approach_crossing");
      break;
    }

  auto is_vehicle = [&](const std::string& type) {
    return std::find(cfg.vehicle_types.begin(), cfg.vehicle_types.end(), type) != cfg.vehicle_types.end();
  };
  const auto ahead = detail::hops(t, root, cfg.vehicle_ahead_hops, true);
  const auto behind = detail::hops(t, root, cfg.vehicle_behind_hops, false);
  bool va = false, vb = false;
  for (const auto& [type, s] : t.objects) {
    if (!is_vehicle(type)) continue;
    va |= ahead.contains(s);
    vb |= behind.contains(s);
  }
  if (va) names.emplace_back("vehicle_ahead");
  if (vb) names.emplace_back("vehicle_behind");
  return SubsceneSignature::from_names(std::move(names));
}

// ---------------------------------------------------------------------------
// Templates

struct Slot {
  std::string segment;
  geom::Vec2 position;
  double heading = 0.0;
};

struct Layout {
  MapData map;
  Topology topo;
  std::vector<Slot> slots;
};

namespace detail {

inline constexpr double kLateral = 1.75;
// Largest ego-to-actor distance in a layout's local frame.
inline constexpr double kActorReach = 40.0;
inline constexpr double kLaneWidth = 3.5;

inline std::size_t pieces(int length_m) { return static_cast<std::size_t>((length_m + 9) / 10); }

inline double heading_of(geom::Vec2 d) { return std::atan2(d.y, d.x); }

/// Adds a straight lane (as one chain of segments) to layout and topology.
inline void straight_lane(Layout& out, const std::string& id, geom::Vec2 a, geom::Vec2 b, int length_m,
                          double speed_limit) {
  out.map.lanes.push_back({id, {a, b}, speed_limit, kLaneWidth});
  const std::size_t k = pieces(length_m);
  const double h = heading_of(b - a);
  for (std::size_t i = 0; i < k; ++i) {
    const std::string s = segment_id(id, i);
    out.topo.segments[s] = {false, ""};
    if (i > 0) out.topo.link(segment_id(id, i - 1), s);
    const double f = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
    out.slots.push_back({s, a + (b - a) * f, h});
  }
}

inline std::string first_seg(const std::string& lane) { return segment_id(lane, 0); }
inline std::string last_seg(const std::string& lane, int length_m) { return segment_id(lane, pieces(length_m) - 1); }

/// Arc around `center` from angle t0 sweeping `sweep` radians.
inline geom::Polyline arc(geom::Vec2 center, double radius, double t0, double sweep, int samples = 16) {
  geom::Polyline pts;
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + sweep * static_cast<double>(i) / samples;
    pts.push_back(center + geom::Vec2{std::cos(t), std::sin(t)} * radius);
  }
  return pts;
}

inline Slot arc_slot(const std::string& id, geom::Vec2 center, double radius, double t0, double sweep) {
  const double tm = t0 + 0.5 * sweep;
  const geom::Vec2 p = center + geom::Vec2{std::cos(tm), std::sin(tm)} * radius;
  const double h = tm + (sweep > 0 ? 0.5 : -0.5) * std::numbers::pi;
  return {id, p, h};
}

inline void connector(Layout& out, const std::string& id, const std::string& turn, geom::Polyline line) {
  out.map.connectors.push_back({id, turn, std::move(line), kLaneWidth});
  out.topo.segments[id] = {true, turn};
}

inline geom::Vec2 dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double speed_limit(Rng& rng) {
  static const std::vector<double> limits{8.3, 11.1, 13.9, 16.7};
  return rng.pick(limits);
}

}  // namespace detail

inline Layout straight_layout(Rng& rng, bool with_crosswalk) {
  using namespace detail;
  Layout out;
  static const std::vector<int> plain_lengths{16, 24, 36, 48};
  static const std::vector<int> cross_lengths{8, 16, 24, 36};
  const int len = rng.pick(with_crosswalk ? cross_lengths : plain_lengths);
  const std::size_t east = 1 + rng.below(3);
  const std::size_t west = rng.below(3);
  const double limit = speed_limit(rng);
  const double l = static_cast<double>(len);

  LaneGroup ge{"gE", {}, {}};
  for (std::size_t j = 0; j < east; ++j) {
    const double y = -kLateral - kLaneWidth * static_cast<double>(j);
    const std::string id = "E" + std::to_string(j);
    straight_lane(out, id, {0.0, y}, {l, y}, len, limit);
    ge.lanes.push_back(id);
  }
  out.map.groups.push_back(ge);
  if (west > 0) {
    LaneGroup gw{"gW", {}, {}};
    for (std::size_t j = 0; j < west; ++j) {
      const double y = kLateral + kLaneWidth * static_cast<double>(j);
      const std::string id = "W" + std::to_string(j);
      straight_lane(out, id, {l, y}, {0.0, y}, len, limit);
      gw.lanes.push_back(id);
    }
    out.map.groups.push_back(gw);
  }

  if (with_crosswalk) {
    const std::size_t k = pieces(len);
    const std::size_t c = rng.below(k);
    const double piece = l / static_cast<double>(k);
    const double xm = piece * (static_cast<double>(c) + 0.5);
    const double y0 = -kLaneWidth * static_cast<double>(east);
    const double y1 = kLaneWidth * static_cast<double>(west);
    out.map.crosswalks.push_back({"X0", {{xm - 1.5, y0}, {xm + 1.5, y0}, {xm + 1.5, y1}, {xm - 1.5, y1}}});
    for (std::size_t j = 0; j < east; ++j) out.topo.crossed.insert(segment_id("E" + std::to_string(j), c));
    for (std::size_t j = 0; j < west; ++j) out.topo.crossed.insert(segment_id("W" + std::to_string(j), k - 1 - c));
  }
  return out;
}

/// Three- or four-arm junction with one lane per direction on every arm.
inline Layout intersection_layout(Rng& rng, bool four_way) {
  using namespace detail;
  Layout out;
  constexpr double H = 8.0;
  static const std::vector<int> in_lengths{8, 16};
  static const std::vector<int> out_lengths{16};
  struct Arm {
    std::string name;
    geom::Vec2 d;
    int in_len;
    int out_len;
  };
  std::vector<Arm> arms;
  const std::vector<std::pair<std::string, double>> all{{"E", 0.0}, {"N", 0.5}, {"W", 1.0}, {"S", 1.5}};
  const double limit = speed_limit(rng);
  for (const auto& [name, turns] : all) {
    if (!four_way && name == "N") continue;
    arms.push_back({name, dir(turns * std::numbers::pi), rng.pick(in_lengths), rng.pick(out_lengths)});
  }
  for (const Arm& a : arms) {
    const geom::Vec2 n = geom::left_normal(a.d);
    const geom::Vec2 in_end = a.d * H + n * kLateral;
    straight_lane(out, "I" + a.name, in_end + a.d * static_cast<double>(a.in_len), in_end, a.in_len, limit);
    const geom::Vec2 out_start = a.d * H - n * kLateral;
    straight_lane(out, "O" + a.name, out_start, out_start + a.d * static_cast<double>(a.out_len), a.out_len, limit);
  }
  for (const Arm& a : arms) {
    for (const Arm& b : arms) {
      if (a.name == b.name) continue;
      const std::string id = "C" + a.name + b.name;
      const geom::Vec2 p = a.d * H + geom::left_normal(a.d) * kLateral;
      const geom::Vec2 q = b.d * H - geom::left_normal(b.d) * kLateral;
      const double turn = geom::cross(a.d * -1.0, b.d);
      if (std::abs(turn) < 0.5) {
        connector(out, id, "straight", {p, q});
      } else {
        const geom::Vec2 c = a.d * H + b.d * H;
        const double radius = geom::distance(p, c);
        const double t0 = std::atan2(p.y - c.y, p.x - c.x);
        const double sweep = turn > 0 ? 0.5 * std::numbers::pi : -0.5 * std::numbers::pi;
        connector(out, id, turn > 0 ? "left" : "right", arc(c, radius, t0, sweep));
        if (turn < 0) out.slots.push_back(arc_slot(id, c, radius, t0, sweep));
      }
      out.topo.link(last_seg("I" + a.name, a.in_len), id);
      out.topo.link(id, first_seg("O" + b.name));
      out.map.successors.push_back({"I" + a.name, id});
      out.map.successors.push_back({id, "O" + b.name});
    }
  }
  return out;
}

inline Layout roundabout_layout(Rng& rng) {
  using namespace detail;
  Layout out;
  constexpr double R = 9.0;
  constexpr double kArmStart = 14.0;
  const double delta = 20.0 * std::numbers::pi / 180.0;
  const std::size_t m = 3 + rng.below(2);
  static const std::vector<int> in_lengths{8, 16};
  static const std::vector<int> out_lengths{12, 16};
  const double limit = speed_limit(rng);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
  const geom::Vec2 origin{0.0, 0.0};
  std::vector<int> in_lengths_used;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string k = std::to_string(i);
    const double phi = step * static_cast<double>(i);
    const geom::Vec2 d = dir(phi);
    const geom::Vec2 n = geom::left_normal(d);
    const int in_len = rng.pick(in_lengths);
    const int out_len = rng.pick(out_lengths);
    in_lengths_used.push_back(in_len);
    const geom::Vec2 in_end = d * kArmStart + n * kLateral;
    straight_lane(out, "I" + k, in_end + d * static_cast<double>(in_len), in_end, in_len, limit);
    const geom::Vec2 out_start = d * kArmStart - n * kLateral;
    straight_lane(out, "O" + k, out_start, out_start + d * static_cast<double>(out_len), out_len, limit);

    // Exit diverges at phi - delta, entry merges at phi + delta.
    const geom::Vec2 x_pt = dir(phi - delta) * R;
    const geom::Vec2 y_pt = dir(phi + delta) * R;
    connector(out, "N" + k, std::string(kRoundaboutTurn), {in_end, y_pt});
    out.slots.push_back({"N" + k, (in_end + y_pt) * 0.5, heading_of(y_pt - in_end)});
    connector(out, "E" + k, std::string(kRoundaboutTurn), {x_pt, out_start});
    out.slots.push_back({"E" + k, (x_pt + out_start) * 0.5, heading_of(out_start - x_pt)});
    connector(out, "R" + k, std::string(kRoundaboutTurn), arc(origin, R, phi - delta, 2.0 * delta, 8));
    out.slots.push_back(arc_slot("R" + k, origin, R, phi - delta, 2.0 * delta));
    const double span = step - 2.0 * delta;
    connector(out, "S" + k, std::string(kRoundaboutTurn), arc(origin, R, phi + delta, span, 16));
    out.slots.push_back(arc_slot("S" + k, origin, R, phi + delta, span));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::string k = std::to_string(i);
    const std::string k1 = std::to_string((i + 1) % m);
    const auto add = [&](const std::string& a, const std::string& b, const std::string& ta, const std::string& tb) {
      out.topo.link(ta, tb);
      out.map.successors.push_back({a, b});
    };
    add("I" + k, "N" + k, last_seg("I" + k, in_lengths_used[i]), "N" + k);
    add("N" + k, "S" + k, "N" + k, "S" + k);
    add("R" + k, "S" + k, "R" + k, "S" + k);
    add("S" + k, "R" + k1, "S" + k, "R" + k1);
    add("S" + k, "E" + k1, "S" + k, "E" + k1);
    add("E" + k, "O" + k, "E" + k, first_seg("O" + k));
  }
  return out;
}

inline Layout parking_lot_layout(Rng& rng) {
  using namespace detail;
  Layout out;
  const std::size_t cols = 2 + rng.below(2);
  const std::size_t rows = 2 + rng.below(3);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string id = "P" + std::to_string(r) + std::to_string(c);
      const geom::Vec2 a{12.0 * static_cast<double>(c), 6.0 * static_cast<double>(r)};
      const geom::Vec2 b = a + geom::Vec2{8.0, 0.0};
      if (r % 2 == 0) {
        straight_lane(out, id, a, b, 8, 2.8);
      } else {
        straight_lane(out, id, b, a, 8, 2.8);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene assembly

struct GeneratedScene {
  WorldSnapshot snapshot;
  Template kind = Template::Straight;
  SubsceneSignature planted;
};

inline Dimensions dims_for(std::string_view type) {
  if (type == "vehicle") return {4.5, 1.9};
  if (type == "bicycle") return {1.8, 0.6};
  if (type == "pedestrian") return {0.6, 0.6};
  if (type == "traffic_cone") return {0.4, 0.4};
  if (type == "barrier") return {1.0, 0.5};
  return {1.0, 1.0};
}

inline bool is_static_type(std::string_view type) {
  return type == "traffic_cone" || type == "barrier" || type == "generic_object";
}

inline std::string scene_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%06zu", index);
  return buf;
}

inline double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

/// Scene `index` of the corpus described by `spec`. Depends only on
/// (spec, index), so scenes can be generated in any order.
inline GeneratedScene generate_scene(const GeneratorSpec& spec, std::size_t index, const CatalogConfig& catalog = {},
                                     const BuildConfig& build = {}) {
  Rng rng(stream_seed(spec.seed, index));
  const auto kind = static_cast<Template>(rng.weighted({spec.weights.begin(), spec.weights.end()}));
  Layout layout;
  switch (kind) {
    case Template::Straight: layout = straight_layout(rng, false); break;
    case Template::Crosswalk: layout = straight_layout(rng, true); break;
    case Template::TIntersection: layout = intersection_layout(rng, false); break;
    case Template::FourWay: layout = intersection_layout(rng, true); break;
    case Template::Roundabout: layout = roundabout_layout(rng); break;
    case Template::ParkingLot: layout = parking_lot_layout(rng); break;
  }

  // Ego and actors each take a distinct slot; actors only near the ego.
  const std::size_t ego_index = rng.below(layout.slots.size());
  std::vector<std::size_t> order{ego_index};
  for (std::size_t i = 0; i < layout.slots.size(); ++i)
    if (i != ego_index && geom::distance(layout.slots[i].position, layout.slots[ego_index].position) <= detail::kActorReach)
      order.push_back(i);
  const std::size_t actors = std::min({spec.actor_max, rng.poisson(spec.actor_mean), order.size() - 1});
  for (std::size_t i = 1; i < actors + 1; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);

  std::vector<std::string> type_names;
  std::vector<double> type_weights;
  for (const auto& [t, w] : spec.actor_types) {
    type_names.push_back(t);
    type_weights.push_back(w);
  }

  GeneratedScene out;
  out.kind = kind;
  WorldSnapshot& snap = out.snapshot;
  snap.scene_id = scene_name(index);
  snap.timestamp_us = static_cast<std::int64_t>(index) * 500000;
  const Slot& ego_slot = layout.slots[order[0]];
  snap.ego.pose = {ego_slot.position.x, ego_slot.position.y, ego_slot.heading};
  snap.ego.speed = std::max(0.0, rng.normal(spec.ego_speed.mean, spec.ego_speed.sd));
  layout.topo.root = ego_slot.segment;
  for (std::size_t i = 1; i <= actors; ++i) {
    const Slot& s = layout.slots[order[i]];
    ActorState a;
    a.type = type_names[rng.weighted(type_weights)];
    char buf[32];
    std::snprintf(buf, sizeof buf, "obj%02zu", i);
    a.id = buf;
    a.pose = {s.position.x, s.position.y, s.heading};
    a.speed = is_static_type(a.type) ? 0.0 : std::max(0.0, rng.normal(spec.actor_speed.mean, spec.actor_speed.sd));
    a.dims = dims_for(a.type);
    snap.actors.push_back(a);
    layout.topo.objects.emplace_back(a.type, s.segment);
  }
  snap.map = std::move(layout.map);

  // Place the local layout somewhere in the world.
  const double theta = rng.uniform() * 2.0 * std::numbers::pi;
  const geom::Vec2 shift{rng.uniform() * 2000.0 - 1000.0, rng.uniform() * 2000.0 - 1000.0};
  const geom::Vec2 ux = detail::dir(theta);
  auto place = [&](geom::Vec2 p) {
    const geom::Vec2 w = ux * p.x + geom::left_normal(ux) * p.y + shift;
    return geom::Vec2{round6(w.x), round6(w.y)};
  };
  auto place_pose = [&](Pose& pose) {
    const geom::Vec2 p = place({pose.x, pose.y});
    pose = {p.x, p.y, round6(geom::wrap_angle(pose.heading + theta))};
  };
  auto place_line = [&](geom::Polyline& line) {
    for (auto& p : line) p = place(p);
  };
  place_pose(snap.ego.pose);
  for (auto& a : snap.actors) place_pose(a.pose);
  for (auto& l : snap.map.lanes) place_line(l.centerline);
  for (auto& c : snap.map.connectors) place_line(c.centerline);
  for (auto& c : snap.map.crosswalks) place_line(c.polygon);

  // Every element must survive the radius filter, or the abstract graph
  // would not describe the built scene.
  const geom::Vec2 ego{snap.ego.pose.x, snap.ego.pose.y};
  const double limit = build.radius - 1.0;
  auto near = [&](geom::Vec2 p) { return geom::distance(p, ego) <= limit; };
  bool ok = true;
  for (const auto& l : snap.map.lanes) ok &= near(center_of(l.centerline));
  for (const auto& c : snap.map.connectors) ok &= near(center_of(c.centerline));
  for (const auto& c : snap.map.crosswalks) ok &= near(geom::vertex_centroid(c.polygon));
  for (const auto& a : snap.actors) ok &= near({a.pose.x, a.pose.y});
  if (!ok) throw Error(Errc::InvalidSpec, "radius " + std::to_string(build.radius) + " is too small for the generator's templates");

  out.planted = planted_signature(layout.topo, catalog);
  return out;
}

}  // namespace scenekg::gen
