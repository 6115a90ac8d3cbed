#pragma once
// AST for the sub-scene pattern language.
//
//   pattern straight_road {
//     match (a:Lane)-[NEXT]->(b:Lane) where a.speed_limit > 10;
//     mark straight_road(a, b);
//     count(root);
//   }

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scenekg/scene_model.hpp"

namespace scenekg::pattern {

/// Location of a construct in the source text. Spans never take part in AST
/// equality, so a reformatted query compares equal to the original.
struct Span {
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t offset = 0;
  std::size_t length = 0;

  friend constexpr bool operator==(const Span&, const Span&) noexcept { return true; }
};

using Literal = std::variant<double, std::string>;

enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate {
  std::string var;
  std::string attr;
  bool is_membership = false;  // `in { ... }` when true, otherwise `op values[0]`
  CmpOp op = CmpOp::Eq;
  std::vector<Literal> values;
  Span span;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct NodePattern {
  std::string var;
  std::optional<NodeKind> kind;  // set for kind labels
  std::string mark;              // set for `@label`
  Span span;

  friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

/// Edge between nodes[i] and nodes[i + 1] of the enclosing match.
struct EdgePattern {
  EdgeKind kind = EdgeKind::Next;
  bool directed = true;
  Span span;

  friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

struct MatchStmt {
  std::vector<NodePattern> nodes;
  std::vector<EdgePattern> edges;  // nodes.size() - 1 entries
  std::vector<Predicate> where;
  Span span;

  friend bool operator==(const MatchStmt&, const MatchStmt&) = default;
};

struct MarkStmt {
  std::string label;
  std::vector<std::string> vars;
  Span span;

  friend bool operator==(const MarkStmt&, const MarkStmt&) = default;
};

struct CountStmt {
  bool root = false;
  std::string var;  // when !root
  Span span;

  friend bool operator==(const CountStmt&, const CountStmt&) = default;
};

using Statement = std::variant<MatchStmt, MarkStmt, CountStmt>;

struct PatternQuery {
  std::string name;
  std::vector<Statement> statements;
  Span span;

  friend bool operator==(const PatternQuery&, const PatternQuery&) = default;
};

/// DSL spelling of an edge kind (`NEXT`, `CONNECTED_TO`, `ON`).
constexpr std::string_view edge_keyword(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::Next: return "NEXT";
    case EdgeKind::ConnectedTo: return "CONNECTED_TO";
    case EdgeKind::On: return "ON";
  }
  return "?";
}

inline std::optional<EdgeKind> parse_edge_keyword(std::string_view s) noexcept {
  for (EdgeKind k : kAllEdgeKinds)
    if (edge_keyword(k) == s) return k;
  return std::nullopt;
}

constexpr std::string_view to_string(CmpOp op) noexcept {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

}  // namespace scenekg::pattern
