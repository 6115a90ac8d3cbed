#pragma once
// Evaluates a PatternQuery against a SceneGraph.
//
// Semantics of one match statement: count every assignment of graph nodes to
// the statement's variables such that kind/mark labels and predicates hold
// and the edge patterns can be realized by pairwise distinct graph edges
// (edge-injective; two variables may bind the same node). Marks live in a
// per-evaluation table; the graph is never modified.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/pattern_ast.hpp"
#include "scenekg/pattern_parser.hpp"
#include "scenekg/scene_model.hpp"

namespace scenekg::pattern {

struct MatchResult {
  /// Assignments found, summed over all match statements.
  std::uint64_t match_count = 0;
  std::vector<std::uint64_t> statement_counts;
  /// label -> marked node ids, id-sorted.
  std::map<std::string, std::vector<std::string>> marks;
  /// One value per count statement, in order.
  std::vector<std::uint64_t> counts;
  bool root_involved = false;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Compares an attribute against a literal. Missing attributes and type
/// mismatches never match, whatever the operator.
inline bool compare_attr(const AttrValue& value, CmpOp op, const Literal& lit) {
  auto apply = [op](const auto& a, const auto& b) {
    switch (op) {
      case CmpOp::Eq: return a == b;
      case CmpOp::Ne: return a != b;
      case CmpOp::Lt: return a < b;
      case CmpOp::Le: return a <= b;
      case CmpOp::Gt: return a > b;
      case CmpOp::Ge: return a >= b;
    }
    return false;
  };
  if (const double* v = std::get_if<double>(&value)) {
    if (const double* l = std::get_if<double>(&lit)) return apply(*v, *l);
    return false;
  }
  if (const std::string* v = std::get_if<std::string>(&value)) {
    if (const std::string* l = std::get_if<std::string>(&lit)) return apply(*v, *l);
    return false;
  }
  return false;
}

inline bool predicate_holds(const Node& node, const Predicate& p) {
  AttrValue id_value;
  const AttrValue* value = node.attr(p.attr);
  if (value == nullptr && p.attr == "id") {
    id_value = node.id;
    value = &id_value;
  }
  if (value == nullptr) return false;
  if (p.is_membership) {
    return std::any_of(p.values.begin(), p.values.end(),
                       [&](const Literal& lit) { return compare_attr(*value, CmpOp::Eq, lit); });
  }
  return compare_attr(*value, p.op, p.values.at(0));
}

/// Rejects queries whose `@label` references precede every mark of that label.
inline void check_mark_labels(const PatternQuery& q) {
  std::set<std::string, std::less<>> produced;
  for (const Statement& st : q.statements) {
    if (const auto* m = std::get_if<MatchStmt>(&st)) {
      for (const NodePattern& n : m->nodes) {
        if (!n.kind && !produced.contains(n.mark))
          throw Error(Errc::UnknownMarkLabel, "'@" + n.mark + "' used before any 'mark " + n.mark + "'",
                      {n.span.line, n.span.column});
      }
    } else if (const auto* mk = std::get_if<MarkStmt>(&st)) {
      produced.insert(mk->label);
    }
  }
}

namespace detail {

using NodeSet = std::vector<char>;  // indexed by NodeIndex

struct EdgeConstraint {
  std::size_t from = 0;  // variable slots
  std::size_t to = 0;
  EdgeKind kind = EdgeKind::Next;
  bool directed = true;
};

/// Backtracking matcher for one match statement.
class StatementMatcher {
 public:
  StatementMatcher(const SceneGraph& g, const MatchStmt& stmt, const std::map<std::string, NodeSet, std::less<>>& marks)
      : g_(g) {
    for (const NodePattern& n : stmt.nodes) slot_of(n.var);
    candidates_.assign(vars_.size(), {});
    allowed_.assign(vars_.size(), NodeSet(g.node_count(), 1));
    for (const NodePattern& n : stmt.nodes) {
      NodeSet& allow = allowed_[slot_of(n.var)];
      if (n.kind) {
        for (NodeIndex i = 0; i < g.node_count(); ++i)
          if (g.node(i).kind != *n.kind) allow[i] = 0;
      } else {
        const NodeSet& marked = marks.at(n.mark);
        for (NodeIndex i = 0; i < g.node_count(); ++i) allow[i] &= marked[i];
      }
    }
    for (const Predicate& p : stmt.where) {
      NodeSet& allow = allowed_[slot_of(p.var)];
      for (NodeIndex i = 0; i < g.node_count(); ++i)
        if (allow[i] && !predicate_holds(g.node(i), p)) allow[i] = 0;
    }
    for (std::size_t v = 0; v < vars_.size(); ++v)
      for (NodeIndex i : g.nodes_by_id())
        if (allowed_[v][i]) candidates_[v].push_back(i);
    for (std::size_t i = 0; i < stmt.edges.size(); ++i) {
      constraints_.push_back({slot_of(stmt.nodes[i].var), slot_of(stmt.nodes[i + 1].var), stmt.edges[i].kind,
                              stmt.edges[i].directed});
    }
    order_variables();
  }

  std::size_t slot_of(const std::string& var) {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it != vars_.end()) return static_cast<std::size_t>(it - vars_.begin());
    vars_.push_back(var);
    return vars_.size() - 1;
  }

  std::size_t slot(const std::string& var) const {
    return static_cast<std::size_t>(std::find(vars_.begin(), vars_.end(), var) - vars_.begin());
  }

  /// Runs the search; `bound[v]` collects every node bound to variable v.
  std::uint64_t run(std::vector<NodeSet>& bound) {
    bound.assign(vars_.size(), NodeSet(g_.node_count(), 0));
    assignment_.assign(vars_.size(), kUnassigned);
    count_ = 0;
    search(0, bound);
    return count_;
  }

 private:
  static constexpr NodeIndex kUnassigned = std::numeric_limits<NodeIndex>::max();

  // Most-constrained first: smallest candidate list, preferring variables
  // adjacent (through an edge pattern) to ones already placed.
  void order_variables() {
    std::vector<char> placed(vars_.size(), 0);
    for (std::size_t step = 0; step < vars_.size(); ++step) {
      std::size_t best = vars_.size();
      bool best_linked = false;
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (placed[v]) continue;
        bool linked = false;
        for (const auto& c : constraints_)
          linked |= (c.from == v && placed[c.to]) || (c.to == v && placed[c.from]);
        const bool better = best == vars_.size() || (linked && !best_linked) ||
                            (linked == best_linked && candidates_[v].size() < candidates_[best].size());
        if (better) {
          best = v;
          best_linked = linked;
        }
      }
      placed[best] = 1;
      order_.push_back(best);
    }
  }

  // Graph edges realizing constraint c under the current assignment.
  void realizations(const EdgeConstraint& c, std::vector<EdgeIndex>& out) const {
    out.clear();
    const NodeIndex a = assignment_[c.from];
    const NodeIndex b = assignment_[c.to];
    for (EdgeIndex e : g_.out_edges(a)) {
      const Edge& edge = g_.edge(e);
      if (edge.kind == c.kind && edge.target == b) out.push_back(e);
    }
    if (!c.directed) {
      for (EdgeIndex e : g_.out_edges(b)) {
        const Edge& edge = g_.edge(e);
        if (edge.kind == c.kind && edge.target == a && a != b) out.push_back(e);
      }
    }
  }

  bool edges_injective() {
    std::vector<std::vector<EdgeIndex>> options(constraints_.size());
    for (std::size_t i = 0; i < constraints_.size(); ++i) realizations(constraints_[i], options[i]);
    std::vector<EdgeIndex> used;
    auto assign = [&](auto&& self, std::size_t i) -> bool {
      if (i == options.size()) return true;
      for (EdgeIndex e : options[i]) {
        if (std::find(used.begin(), used.end(), e) != used.end()) continue;
        used.push_back(e);
        if (self(self, i + 1)) return true;
        used.pop_back();
      }
      return false;
    };
    return assign(assign, 0);
  }

  bool consistent(std::size_t var) const {
    std::vector<EdgeIndex> tmp;
    for (const auto& c : constraints_) {
      if (c.from != var && c.to != var) continue;
      if (assignment_[c.from] == kUnassigned || assignment_[c.to] == kUnassigned) continue;
      realizations(c, tmp);
      if (tmp.empty()) return false;
    }
    return true;
  }

  void search(std::size_t depth, std::vector<NodeSet>& bound) {
    if (depth == order_.size()) {
      if (!edges_injective()) return;
      ++count_;
      for (std::size_t v = 0; v < vars_.size(); ++v) bound[v][assignment_[v]] = 1;
      return;
    }
    const std::size_t var = order_[depth];
    for (NodeIndex n : next_candidates(var)) {
      assignment_[var] = n;
      if (consistent(var)) search(depth + 1, bound);
    }
    assignment_[var] = kUnassigned;
  }

  // Candidates for `var`: neighbors of an already placed variable when an
  // edge pattern links them, otherwise the full filtered list.
  std::vector<NodeIndex> next_candidates(std::size_t var) const {
    for (const auto& c : constraints_) {
      std::size_t other;
      bool var_is_target;
      if (c.to == var && assignment_[c.from] != kUnassigned) {
        other = c.from;
        var_is_target = true;
      } else if (c.from == var && assignment_[c.to] != kUnassigned) {
        other = c.to;
        var_is_target = false;
      } else {
        continue;
      }
      const Direction dir = !c.directed ? Direction::Any : (var_is_target ? Direction::Out : Direction::In);
      std::vector<NodeIndex> out;
      for (const Neighbor& nb : g_.neighbors(assignment_[other], dir, c.kind))
        if (allowed_[var][nb.node]) out.push_back(nb.node);
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    return candidates_[var];
  }

  const SceneGraph& g_;
  std::vector<std::string> vars_;
  std::vector<NodeSet> allowed_;
  std::vector<std::vector<NodeIndex>> candidates_;
  std::vector<EdgeConstraint> constraints_;
  std::vector<std::size_t> order_;
  std::vector<NodeIndex> assignment_;
  std::uint64_t count_ = 0;
};

}  // namespace detail

/// Runs every statement of `query` in order. The graph should be validated so
/// that its root is known; otherwise root-related results are false/zero.
inline MatchResult evaluate(const PatternQuery& query, const SceneGraph& graph) {
  check_bindings(query);
  check_mark_labels(query);
  MatchResult result;
  std::map<std::string, detail::NodeSet, std::less<>> marks;
  std::optional<detail::StatementMatcher> last;
  std::vector<detail::NodeSet> bound;
  const bool has_root = graph.has_root();
  const NodeIndex root = has_root ? graph.root() : 0;

  for (const Statement& st : query.statements) {
    if (const auto* m = std::get_if<MatchStmt>(&st)) {
      last.emplace(graph, *m, marks);
      const std::uint64_t n = last->run(bound);
      result.statement_counts.push_back(n);
      result.match_count += n;
    } else if (const auto* mk = std::get_if<MarkStmt>(&st)) {
      detail::NodeSet& set = marks[mk->label];
      set.resize(graph.node_count(), 0);
      for (const auto& var : mk->vars) {
        const detail::NodeSet& b = bound.at(last->slot(var));
        for (NodeIndex i = 0; i < graph.node_count(); ++i) set[i] |= b[i];
      }
    } else {
      const auto& c = std::get<CountStmt>(st);
      std::uint64_t n = 0;
      if (c.root) {
        if (has_root)
          for (const auto& [label, set] : marks)
            if (set[root]) {
              n = 1;
              break;
            }
      } else {
        const detail::NodeSet& b = bound.at(last->slot(c.var));
        n = static_cast<std::uint64_t>(std::count(b.begin(), b.end(), 1));
      }
      result.counts.push_back(n);
    }
  }

  for (const auto& [label, set] : marks) {
    std::vector<std::string>& ids = result.marks[label];
    for (NodeIndex i : graph.nodes_by_id())
      if (set[i]) ids.push_back(graph.node(i).id);
    if (has_root && set[root]) result.root_involved = true;
  }
  return result;
}

}  // namespace scenekg::pattern
