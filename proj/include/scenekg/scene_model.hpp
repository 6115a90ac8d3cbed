#pragma once
// Property-graph model of one driving scene.
//
// Nodes are typed (Lane, Connector, LaneMarker, Crosswalk, Ego, Object) and
// carry small attribute maps; edges are typed (Next, ConnectedTo, On) and must
// respect the endpoint-kind relation below. Every iteration order exposed here
// is id-sorted so pattern matching and reports are reproducible.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "scenekg/error.hpp"

namespace scenekg {

enum class NodeKind : std::uint8_t { Lane, Connector, LaneMarker, Crosswalk, Ego, Object };
enum class EdgeKind : std::uint8_t { Next, ConnectedTo, On };

inline constexpr std::array<NodeKind, 6> kAllNodeKinds{NodeKind::Lane,      NodeKind::Connector,
                                                       NodeKind::LaneMarker, NodeKind::Crosswalk,
                                                       NodeKind::Ego,       NodeKind::Object};
inline constexpr std::array<EdgeKind, 3> kAllEdgeKinds{EdgeKind::Next, EdgeKind::ConnectedTo,
                                                       EdgeKind::On};

/// Longest legal Lane segment, in meters.
inline constexpr double kMaxLaneLength = 10.0;

constexpr std::string_view to_string(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Lane: return "Lane";
    case NodeKind::Connector: return "Connector";
    case NodeKind::LaneMarker: return "LaneMarker";
    case NodeKind::Crosswalk: return "Crosswalk";
    case NodeKind::Ego: return "Ego";
    case NodeKind::Object: return "Object";
  }
  return "?";
}

constexpr std::string_view to_string(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::Next: return "Next";
    case EdgeKind::ConnectedTo: return "ConnectedTo";
    case EdgeKind::On: return "On";
  }
  return "?";
}

inline std::optional<NodeKind> parse_node_kind(std::string_view s) noexcept {
  for (NodeKind k : kAllNodeKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<EdgeKind> parse_edge_kind(std::string_view s) noexcept {
  for (EdgeKind k : kAllEdgeKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// True when (from, kind, to) is in the schema's edge relation.
constexpr bool edge_allowed(NodeKind from, EdgeKind kind, NodeKind to) noexcept {
  const bool from_infra = from == NodeKind::Lane || from == NodeKind::Connector;
  const bool to_infra = to == NodeKind::Lane || to == NodeKind::Connector;
  switch (kind) {
    case EdgeKind::Next: return from_infra && to_infra;
    case EdgeKind::ConnectedTo: return from_infra && to == NodeKind::LaneMarker;
    case EdgeKind::On:
      return (from == NodeKind::Crosswalk || from == NodeKind::Ego || from == NodeKind::Object) &&
             to_infra;
  }
  return false;
}

/// Ordered pair of reals, used for (longitudinal, lateral) distances and
/// (length, width) dimensions.
struct Pair {
  double first = 0.0;
  double second = 0.0;
  friend bool operator==(const Pair&, const Pair&) = default;
};

using AttrValue = std::variant<double, std::string, Pair>;
using Attributes = std::map<std::string, AttrValue, std::less<>>;

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Lane;
  Attributes attrs;

  const AttrValue* attr(std::string_view name) const {
    auto it = attrs.find(name);
    return it == attrs.end() ? nullptr : &it->second;
  }
  std::optional<double> number(std::string_view name) const {
    const AttrValue* v = attr(name);
    if (v == nullptr || !std::holds_alternative<double>(*v)) return std::nullopt;
    return std::get<double>(*v);
  }
  std::optional<std::string_view> text(std::string_view name) const {
    const AttrValue* v = attr(name);
    if (v == nullptr || !std::holds_alternative<std::string>(*v)) return std::nullopt;
    return std::string_view(std::get<std::string>(*v));
  }
  std::optional<Pair> pair(std::string_view name) const {
    const AttrValue* v = attr(name);
    if (v == nullptr || !std::holds_alternative<Pair>(*v)) return std::nullopt;
    return std::get<Pair>(*v);
  }

  friend bool operator==(const Node&, const Node&) = default;
};

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Edge {
  NodeIndex source = 0;
  EdgeKind kind = EdgeKind::Next;
  NodeIndex target = 0;
  Attributes attrs;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Direction : std::uint8_t { Out, In, Any };

struct Neighbor {
  EdgeIndex edge;
  NodeIndex node;
};

namespace detail {

enum class AttrType { Number, Text, Pair };

struct AttrRule {
  std::string_view name;
  AttrType type;
  // Inclusive lower bound for numbers; NaN disables.
  double min = std::nan("");
  // Exclusive lower bound when true.
  bool strict_min = false;
  double max = std::nan("");
};

inline std::span<const AttrRule> rules_for(NodeKind kind) {
  static const AttrRule lane[] = {{"speed_limit", AttrType::Number, 0.0},
                                  {"length", AttrType::Number, 0.0, true, kMaxLaneLength}};
  static const AttrRule connector[] = {{"turn_type", AttrType::Text},
                                       {"length", AttrType::Number, 0.0, true}};
  static const AttrRule marker[] = {{"boundary_type", AttrType::Text}};
  static const AttrRule ego[] = {{"velocity", AttrType::Number, 0.0},
                                 {"dimensions", AttrType::Pair}};
  static const AttrRule object[] = {{"object_type", AttrType::Text},
                                    {"distance", AttrType::Pair},
                                    {"velocity", AttrType::Number, 0.0},
                                    {"dimensions", AttrType::Pair}};
  switch (kind) {
    case NodeKind::Lane: return lane;
    case NodeKind::Connector: return connector;
    case NodeKind::LaneMarker: return marker;
    case NodeKind::Crosswalk: return {};
    case NodeKind::Ego: return ego;
    case NodeKind::Object: return object;
  }
  return {};
}

inline void check_attributes(const Node& node) {
  for (const AttrRule& rule : rules_for(node.kind)) {
    const AttrValue* v = node.attr(rule.name);
    const std::string where = std::string(to_string(node.kind)) + " '" + node.id + "' attribute '" +
                              std::string(rule.name) + "'";
    if (v == nullptr) throw Error(Errc::MissingRequiredAttribute, where);
    switch (rule.type) {
      case AttrType::Text:
        if (!std::holds_alternative<std::string>(*v)) throw Error(Errc::InvalidAttribute, where + " must be a string");
        break;
      case AttrType::Pair: {
        if (!std::holds_alternative<Pair>(*v)) throw Error(Errc::InvalidAttribute, where + " must be a pair");
        const Pair& p = std::get<Pair>(*v);
        if (!std::isfinite(p.first) || !std::isfinite(p.second))
          throw Error(Errc::InvalidAttribute, where + " must be finite");
        break;
      }
      case AttrType::Number: {
        if (!std::holds_alternative<double>(*v)) throw Error(Errc::InvalidAttribute, where + " must be a number");
        const double x = std::get<double>(*v);
        bool ok = std::isfinite(x);
        if (ok && !std::isnan(rule.min)) ok = rule.strict_min ? x > rule.min : x >= rule.min;
        if (ok && !std::isnan(rule.max)) ok = x <= rule.max;
        if (!ok) throw Error(Errc::InvalidAttribute, where + " out of range: " + std::to_string(x));
        break;
      }
    }
  }
}

}  // namespace detail

/// One timestamped scene. Built incrementally with add_node/add_edge, then
/// sealed by validate(); after that the graph is read-only.
class SceneGraph {
 public:
  SceneGraph() = default;
  explicit SceneGraph(std::string scene_id, std::int64_t timestamp_us = 0)
      : scene_id_(std::move(scene_id)), timestamp_us_(timestamp_us) {}

  const std::string& scene_id() const noexcept { return scene_id_; }
  std::int64_t timestamp_us() const noexcept { return timestamp_us_; }

  const std::string& add_node(Node node) {
    ensure_mutable();
    if (index_.contains(node.id)) throw Error(Errc::DuplicateId, "node '" + node.id + "'");
    detail::check_attributes(node);
    const auto idx = static_cast<NodeIndex>(nodes_.size());
    index_.emplace(node.id, idx);
    nodes_.push_back(std::move(node));
    out_.emplace_back();
    in_.emplace_back();
    insert_sorted(by_id_, idx);
    insert_sorted(by_kind_[static_cast<std::size_t>(nodes_[idx].kind)], idx);
    return nodes_[idx].id;
  }

  EdgeIndex add_edge(std::string_view source, EdgeKind kind, std::string_view target,
                     Attributes attrs = {}) {
    ensure_mutable();
    const NodeIndex s = require(source);
    const NodeIndex t = require(target);
    if (!edge_allowed(nodes_[s].kind, kind, nodes_[t].kind)) {
      throw Error(Errc::IllegalEndpointKinds,
                  std::string(to_string(kind)) + " from " + std::string(to_string(nodes_[s].kind)) +
                      " '" + nodes_[s].id + "' to " + std::string(to_string(nodes_[t].kind)) + " '" +
                      nodes_[t].id + "'");
    }
    if (kind == EdgeKind::ConnectedTo) {
      auto it = attrs.find("side");
      if (it == attrs.end())
        throw Error(Errc::MissingEdgeAttribute, "ConnectedTo '" + nodes_[s].id + "' -> '" + nodes_[t].id + "' needs side");
      const auto* side = std::get_if<std::string>(&it->second);
      if (side == nullptr || (*side != "left" && *side != "right"))
        throw Error(Errc::InvalidAttribute, "ConnectedTo side must be \"left\" or \"right\"");
    }
    for (EdgeIndex e : out_[s]) {
      if (edges_[e].target == t && edges_[e].kind == kind)
        throw Error(Errc::DuplicateEdge, std::string(to_string(kind)) + " '" + nodes_[s].id + "' -> '" + nodes_[t].id + "'");
    }
    const auto e = static_cast<EdgeIndex>(edges_.size());
    edges_.push_back(Edge{s, kind, t, std::move(attrs)});
    insert_edge(out_[s], e, [this](EdgeIndex x) { return edges_[x].target; });
    insert_edge(in_[t], e, [this](EdgeIndex x) { return edges_[x].source; });
    return e;
  }

  /// Pins the root explicitly (used when loading a stored scene); validate()
  /// then checks it against the ego's On-target.
  void set_root(std::string_view id) {
    ensure_mutable();
    root_hint_ = std::string(id);
  }

  /// Checks whole-graph invariants (one Ego, one outgoing On from it, root =
  /// its target) and seals the graph.
  void validate() {
    if (validated_) return;
    const auto& egos = nodes_of_kind(NodeKind::Ego);
    if (egos.size() != 1)
      throw Error(Errc::InvalidScene, "expected exactly one Ego node, found " + std::to_string(egos.size()));
    std::optional<NodeIndex> root;
    for (EdgeIndex e : out_[egos.front()]) {
      if (edges_[e].kind != EdgeKind::On) continue;
      if (root) throw Error(Errc::InvalidScene, "Ego has more than one On edge");
      root = edges_[e].target;
    }
    if (!root) throw Error(Errc::InvalidScene, "Ego has no On edge");
    if (root_hint_ && *root_hint_ != nodes_[*root].id)
      throw Error(Errc::InvalidScene, "root_id '" + *root_hint_ + "' is not the Ego's On target '" + nodes_[*root].id + "'");
    root_ = *root;
    validated_ = true;
  }

  bool validated() const noexcept { return validated_; }
  bool has_root() const noexcept { return root_.has_value(); }
  NodeIndex root() const {
    if (!root_) throw Error(Errc::InvalidScene, "graph '" + scene_id_ + "' has not been validated");
    return *root_;
  }
  const std::string& root_id() const { return nodes_[root()].id; }
  NodeIndex ego() const { return nodes_of_kind(NodeKind::Ego).at(0); }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::optional<NodeIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const Node& node(std::string_view id) const { return nodes_[require(id)]; }

  /// All nodes in id order.
  const std::vector<NodeIndex>& nodes_by_id() const noexcept { return by_id_; }
  const std::vector<NodeIndex>& nodes_of_kind(NodeKind kind) const noexcept {
    return by_kind_[static_cast<std::size_t>(kind)];
  }

  /// Outgoing/incoming edge lists, sorted by the opposite endpoint's id then edge kind.
  std::span<const EdgeIndex> out_edges(NodeIndex n) const { return out_.at(n); }
  std::span<const EdgeIndex> in_edges(NodeIndex n) const { return in_.at(n); }

  std::vector<Neighbor> neighbors(NodeIndex n, Direction dir,
                                  std::optional<EdgeKind> kind = std::nullopt) const {
    std::vector<Neighbor> result;
    auto collect = [&](std::span<const EdgeIndex> list, bool outgoing) {
      for (EdgeIndex e : list) {
        if (kind && edges_[e].kind != *kind) continue;
        result.push_back({e, outgoing ? edges_[e].target : edges_[e].source});
      }
    };
    if (dir != Direction::In) collect(out_.at(n), true);
    if (dir != Direction::Out) collect(in_.at(n), false);
    if (dir == Direction::Any) {
      std::stable_sort(result.begin(), result.end(), [this](const Neighbor& a, const Neighbor& b) {
        return nodes_[a.node].id < nodes_[b.node].id;
      });
    }
    return result;
  }
  std::vector<Neighbor> neighbors(std::string_view id, Direction dir,
                                  std::optional<EdgeKind> kind = std::nullopt) const {
    return neighbors(require(id), dir, kind);
  }

 private:
  NodeIndex require(std::string_view id) const {
    auto found = find(id);
    if (!found) throw Error(Errc::UnknownNode, "'" + std::string(id) + "'");
    return *found;
  }

  void ensure_mutable() const {
    if (validated_) throw Error(Errc::GraphFrozen, "graph '" + scene_id_ + "' is read-only after validation");
  }

  void insert_sorted(std::vector<NodeIndex>& list, NodeIndex idx) {
    auto pos = std::lower_bound(list.begin(), list.end(), idx, [this](NodeIndex a, NodeIndex b) {
      return nodes_[a].id < nodes_[b].id;
    });
    list.insert(pos, idx);
  }

  template <typename Other>
  void insert_edge(std::vector<EdgeIndex>& list, EdgeIndex e, Other other) {
    auto key = [&](EdgeIndex x) { return std::pair(std::string_view(nodes_[other(x)].id), edges_[x].kind); };
    auto pos = std::upper_bound(list.begin(), list.end(), e,
                                [&](EdgeIndex a, EdgeIndex b) { return key(a) < key(b); });
    list.insert(pos, e);
  }

  std::string scene_id_;
  std::int64_t timestamp_us_ = 0;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<EdgeIndex>> out_;
  std::vector<std::vector<EdgeIndex>> in_;
  std::vector<NodeIndex> by_id_;
  std::array<std::vector<NodeIndex>, kAllNodeKinds.size()> by_kind_;
  std::optional<std::string> root_hint_;
  std::optional<NodeIndex> root_;
  bool validated_ = false;
};

/// Structural equality: same scene header, same node set and same edge set
/// (compared by ids, independent of insertion order).
inline bool structurally_equal(const SceneGraph& a, const SceneGraph& b) {
  if (a.scene_id() != b.scene_id() || a.timestamp_us() != b.timestamp_us()) return false;
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (a.has_root() != b.has_root()) return false;
  if (a.has_root() && a.root_id() != b.root_id()) return false;
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    if (!(a.node(a.nodes_by_id()[i]) == b.node(b.nodes_by_id()[i]))) return false;
  }
  auto edge_keys = [](const SceneGraph& g) {
    std::vector<std::tuple<std::string, EdgeKind, std::string, Attributes>> keys;
    for (const Edge& e : g.edges()) keys.emplace_back(g.node(e.source).id, e.kind, g.node(e.target).id, e.attrs);
    std::sort(keys.begin(), keys.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x), std::get<2>(x)) <
             std::tie(std::get<0>(y), std::get<1>(y), std::get<2>(y));
    });
    return keys;
  };
  return edge_keys(a) == edge_keys(b);
}

}  // namespace scenekg
