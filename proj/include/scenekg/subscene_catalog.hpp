#pragma once
// The nine sub-scene patterns and per-scene composite signatures.
//
// A pattern contributes to a scene's signature when its marks include the
// root node (the segment the ego occupies). Hop-limited patterns are written
// as chains of statements, one mark label per hop, so each extra statement
// extends the marked region by exactly one Next step.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scenekg/pattern_eval.hpp"
#include "scenekg/pattern_parser.hpp"
#include "scenekg/scene_model.hpp"
#include "scenekg/util.hpp"

namespace scenekg {

inline constexpr std::string_view kUnknownSignature = "Unknown";
inline constexpr std::string_view kRoundaboutTurn = "roundabout";

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{
      "straight_road",    "on_roundabout",         "enter_roundabout",
      "leave_roundabout", "on_intersection",       "approach_intersection",
      "approach_crossing", "vehicle_ahead",        "vehicle_behind"};
  return names;
}

struct CatalogConfig {
  int approach_intersection_hops = 2;
  int approach_crossing_hops = 2;
  int vehicle_ahead_hops = 3;
  int vehicle_behind_hops = 3;
  std::vector<std::string> vehicle_types{"vehicle"};
  /// Pattern sources replacing the builtin rendering when non-empty.
  std::vector<std::string> pattern_sources;
};

namespace detail {

inline std::string string_set(const std::vector<std::string>& items) {
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + pattern::quote(items[i]);
  return out + "}";
}

inline std::string wrap(std::string_view name, const std::string& body) {
  return "pattern " + std::string(name) + " {\n" + body + "  count(root);\n}\n";
}

// Nodes (Lane or Connector) within `hops` Next steps of a seed set. `seed`
// holds the hop-0 statements marking label `name`; hop k marks `name_k`.
inline std::string hop_region(std::string_view name, const std::string& seed, int hops, bool downstream_of_seed) {
  std::string body = seed;
  std::string prev(name);
  for (int k = 1; k <= hops; ++k) {
    const std::string label = std::string(name) + "_" + std::to_string(k);
    for (const char* kind : {"Lane", "Connector"}) {
      if (downstream_of_seed) {
        body += "  match (s:@" + prev + ")-[NEXT]->(p:" + kind + ");\n";
      } else {
        body += "  match (p:" + std::string(kind) + ")-[NEXT]->(s:@" + prev + ");\n";
      }
      body += "  mark " + label + "(p);\n";
    }
    prev = label;
  }
  return body;
}

}  // namespace detail

/// DSL source of one builtin pattern under `config`.
inline std::string builtin_source(std::string_view name, const CatalogConfig& config = {}) {
  const std::string not_roundabout = "c.turn_type != " + pattern::quote(kRoundaboutTurn);
  const std::string roundabout = "c.turn_type = " + pattern::quote(kRoundaboutTurn);
  const std::string vehicles = detail::string_set(config.vehicle_types);
  if (name == "straight_road") {
    return detail::wrap(name,
                        "  match (a:Lane)-[NEXT]->(b:Lane);\n"
                        "  mark straight_road(a, b);\n");
  }
  if (name == "on_roundabout") {
    return detail::wrap(name, "  match (c:Connector)-[NEXT]->(d:Connector) where " + roundabout +
                                  " and d.turn_type = " + pattern::quote(kRoundaboutTurn) +
                                  ";\n  mark on_roundabout(c);\n");
  }
  if (name == "enter_roundabout") {
    return detail::wrap(name, "  match (a:Lane)-[NEXT]->(c:Connector) where " + roundabout +
                                  ";\n  mark enter_roundabout(a);\n");
  }
  if (name == "leave_roundabout") {
    return detail::wrap(name, "  match (c:Connector)-[NEXT]->(b:Lane) where " + roundabout +
                                  ";\n  mark leave_roundabout(c);\n");
  }
  if (name == "on_intersection") {
    return detail::wrap(name, "  match (c:Connector) where " + not_roundabout + ";\n  mark on_intersection(c);\n");
  }
  if (name == "approach_intersection") {
    // Lanes whose Next-path of Lanes reaches a non-roundabout Connector.
    std::string body = "  match (a:Lane)-[NEXT]->(c:Connector) where " + not_roundabout +
                       ";\n  mark approach_intersection(a);\n";
    for (int k = 2; k <= config.approach_intersection_hops; ++k)
      body += "  match (a:Lane)-[NEXT]->(b:@approach_intersection);\n  mark approach_intersection(a);\n";
    return detail::wrap(name, body);
  }
  if (name == "approach_crossing") {
    const std::string seed =
        "  match (w:Crosswalk)-[ON]->(s:Lane);\n  mark approach_crossing(s);\n"
        "  match (w:Crosswalk)-[ON]->(s:Connector);\n  mark approach_crossing(s);\n";
    return detail::wrap(name, detail::hop_region(name, seed, config.approach_crossing_hops, false));
  }
  if (name == "vehicle_ahead" || name == "vehicle_behind") {
    const std::string n(name);
    const std::string seed = "  match (o:Object)-[ON]->(s:Lane) where o.object_type in " + vehicles +
                             ";\n  mark " + n + "(s);\n" +
                             "  match (o:Object)-[ON]->(s:Connector) where o.object_type in " + vehicles +
                             ";\n  mark " + n + "(s);\n";
    const bool ahead = name == "vehicle_ahead";
    const int hops = ahead ? config.vehicle_ahead_hops : config.vehicle_behind_hops;
    // Ahead: the root lies upstream of the vehicle; behind: downstream.
    return detail::wrap(name, detail::hop_region(name, seed, hops, !ahead));
  }
  throw Error(Errc::InvalidConfig, "no builtin pattern named '" + std::string(name) + "'");
}

inline void validate_catalog_config(const CatalogConfig& config) {
  for (int h : {config.approach_intersection_hops, config.approach_crossing_hops, config.vehicle_ahead_hops,
                config.vehicle_behind_hops})
    if (h < 1 || h > 16) throw Error(Errc::InvalidConfig, "hop limits must lie in [1, 16]");
  if (config.vehicle_types.empty()) throw Error(Errc::InvalidConfig, "vehicle_types must not be empty");
}

/// The pattern catalog: the nine builtin patterns, or the configured sources.
inline std::vector<pattern::PatternQuery> catalog(const CatalogConfig& config = {}) {
  validate_catalog_config(config);
  std::vector<std::string> sources = config.pattern_sources;
  if (sources.empty())
    for (const auto& name : catalog_names()) sources.push_back(builtin_source(name, config));
  auto queries = pattern::parse_all(sources);
  for (const auto& q : queries) pattern::check_mark_labels(q);
  return queries;
}

/// FNV-1a over the canonical text of every pattern, as 16 hex digits.
inline std::string catalog_hash(const std::vector<pattern::PatternQuery>& queries) {
  std::uint64_t h = kFnvOffset;
  for (const auto& q : queries) h = fnv1a64(pattern::unparse(q), h);
  return hex64(h);
}

struct SubsceneSignature {
  std::vector<std::string> matched;  // sorted, unique
  bool is_unknown = true;

  static SubsceneSignature from_names(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    SubsceneSignature s;
    s.is_unknown = names.empty();
    s.matched = std::move(names);
    return s;
  }

  /// Names joined by '+', or "Unknown".
  std::string key() const {
    if (is_unknown) return std::string(kUnknownSignature);
    std::string out;
    for (std::size_t i = 0; i < matched.size(); ++i) out += (i ? "+" : "") + matched[i];
    return out;
  }

  static SubsceneSignature from_key(std::string_view key) {
    if (key == kUnknownSignature || key.empty()) return {};
    std::vector<std::string> names;
    std::size_t start = 0;
    for (;;) {
      const std::size_t plus = key.find('+', start);
      names.emplace_back(key.substr(start, plus - start));
      if (plus == std::string_view::npos) break;
      start = plus + 1;
    }
    return from_names(std::move(names));
  }

  bool contains(std::string_view name) const {
    return std::binary_search(matched.begin(), matched.end(), name, std::less<>{});
  }

  friend bool operator==(const SubsceneSignature&, const SubsceneSignature&) = default;
};

inline SubsceneSignature signature(const SceneGraph& graph, const std::vector<pattern::PatternQuery>& queries) {
  std::vector<std::string> names;
  for (const auto& q : queries)
    if (pattern::evaluate(q, graph).root_involved) names.push_back(q.name);
  return SubsceneSignature::from_names(std::move(names));
}

}  // namespace scenekg
