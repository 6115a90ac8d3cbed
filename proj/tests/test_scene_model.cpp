#include <random>

#include "scenekg/scene_model.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace scenekg;
using namespace th;

TEST(AddNode, WellFormedLane) {
  SceneGraph g("s");
  EXPECT_EQ(g.add_node(lane("L1", 13.9, 10.0)), "L1");
  EXPECT_EQ(g.node("L1").kind, NodeKind::Lane);
  EXPECT_EQ(g.nodes_of_kind(NodeKind::Lane).size(), 1u);
}

TEST(AddNode, DuplicateId) {
  SceneGraph g("s");
  g.add_node(lane("L1"));
  EXPECT_ERRC(g.add_node(lane("L1")), Errc::DuplicateId);
}

TEST(AddNode, MissingDistance) {
  SceneGraph g("s");
  Node o = object("O1", "vehicle");
  o.attrs.erase("distance");
  EXPECT_ERRC(g.add_node(o), Errc::MissingRequiredAttribute);
}

TEST(AddNode, AttributeRanges) {
  SceneGraph g("s");
  EXPECT_ERRC(g.add_node(lane("a", 10.0, 10.5)), Errc::InvalidAttribute);
  EXPECT_ERRC(g.add_node(lane("b", 10.0, 0.0)), Errc::InvalidAttribute);
  EXPECT_ERRC(g.add_node(lane("c", -1.0, 5.0)), Errc::InvalidAttribute);
  EXPECT_ERRC(g.add_node(connector("d", "left", 0.0)), Errc::InvalidAttribute);
  Node bad = object("e", "vehicle");
  bad.attrs["distance"] = 3.0;
  EXPECT_ERRC(g.add_node(bad), Errc::InvalidAttribute);
  EXPECT_EQ(g.add_node(lane("f", 0.0, 10.0)), "f");
}

TEST(AddEdge, Examples) {
  SceneGraph g("s");
  g.add_node(lane("L1"));
  g.add_node(lane("L2"));
  g.add_node(ego());
  g.add_node(marker("M"));
  g.add_edge("L1", EdgeKind::Next, "L2");
  EXPECT_ERRC(g.add_edge("L1", EdgeKind::On, "ego"), Errc::IllegalEndpointKinds);
  EXPECT_ERRC(g.add_edge("L1", EdgeKind::ConnectedTo, "M"), Errc::MissingEdgeAttribute);
  EXPECT_ERRC(g.add_edge("L1", EdgeKind::ConnectedTo, "M", {{"side", "up"}}), Errc::InvalidAttribute);
  EXPECT_ERRC(g.add_edge("L1", EdgeKind::Next, "nope"), Errc::UnknownNode);
  EXPECT_ERRC(g.add_edge("L1", EdgeKind::Next, "L2"), Errc::DuplicateEdge);
  g.add_edge("L1", EdgeKind::ConnectedTo, "M", {{"side", "left"}});
}

TEST(Neighbors, Examples) {
  SceneGraph g("s");
  g.add_node(lane("L1"));
  g.add_node(lane("L2"));
  g.add_node(lane("L9"));
  g.add_edge("L1", EdgeKind::Next, "L2");
  auto out = g.neighbors("L1", Direction::Out, EdgeKind::Next);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(g.node(out[0].node).id, "L2");
  EXPECT_EQ(g.edge(out[0].edge).kind, EdgeKind::Next);
  EXPECT_TRUE(g.neighbors("L9", Direction::Any).empty());
  auto in = g.neighbors("L2", Direction::In, EdgeKind::Next);
  ASSERT_EQ(in.size(), 1u);
  EXPECT_EQ(g.node(in[0].node).id, "L1");
  EXPECT_ERRC(g.neighbors("zz", Direction::Any), Errc::UnknownNode);
}

TEST(Neighbors, SortedByIdRegardlessOfInsertion) {
  SceneGraph g("s");
  for (const char* id : {"L5", "L3", "L1", "L4", "L2"}) g.add_node(lane(id));
  for (const char* id : {"L5", "L2", "L4", "L3"}) g.add_edge("L1", EdgeKind::Next, id);
  g.add_edge("L2", EdgeKind::Next, "L1");
  std::vector<std::string> ids;
  for (auto nb : g.neighbors("L1", Direction::Out)) ids.push_back(g.node(nb.node).id);
  EXPECT_EQ(ids, (std::vector<std::string>{"L2", "L3", "L4", "L5"}));
  ids.clear();
  for (auto nb : g.neighbors("L1", Direction::Any)) ids.push_back(g.node(nb.node).id);
  EXPECT_EQ(ids, (std::vector<std::string>{"L2", "L2", "L3", "L4", "L5"}));
}

TEST(Validate, ExactlyOneRoot) {
  SceneGraph g("s");
  g.add_node(lane("L1"));
  EXPECT_ERRC(g.validate(), Errc::InvalidScene);  // no ego
  g.add_node(ego());
  EXPECT_ERRC(g.validate(), Errc::InvalidScene);  // ego not placed
  g.add_edge("ego", EdgeKind::On, "L1");
  g.validate();
  EXPECT_EQ(g.root_id(), "L1");
  EXPECT_ERRC(g.add_node(lane("L2")), Errc::GraphFrozen);
}

TEST(Validate, TwoOnEdgesRejected) {
  SceneGraph g("s");
  g.add_node(lane("L1"));
  g.add_node(lane("L2"));
  g.add_node(ego());
  g.add_edge("ego", EdgeKind::On, "L1");
  g.add_edge("ego", EdgeKind::On, "L2");
  EXPECT_ERRC(g.validate(), Errc::InvalidScene);
}

TEST(Validate, RootHintMustAgree) {
  SceneGraph g("s");
  g.add_node(lane("L1"));
  g.add_node(lane("L2"));
  g.add_node(ego());
  g.add_edge("ego", EdgeKind::On, "L1");
  g.set_root("L2");
  EXPECT_ERRC(g.validate(), Errc::InvalidScene);
}

// Random insert attempts: whatever is accepted obeys the endpoint relation,
// and everything rejected was illegal.
TEST(Property, SchemaSoundness) {
  const std::map<EdgeKind, std::pair<std::set<NodeKind>, std::set<NodeKind>>> table{
      {EdgeKind::Next, {{NodeKind::Lane, NodeKind::Connector}, {NodeKind::Lane, NodeKind::Connector}}},
      {EdgeKind::ConnectedTo, {{NodeKind::Lane, NodeKind::Connector}, {NodeKind::LaneMarker}}},
      {EdgeKind::On, {{NodeKind::Crosswalk, NodeKind::Ego, NodeKind::Object}, {NodeKind::Lane, NodeKind::Connector}}},
  };
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    SceneGraph g("s");
    std::vector<std::string> ids;
    for (int i = 0; i < 8; ++i) {
      const std::string id = "n" + std::to_string(i);
      switch (rng() % 6) {
        case 0: g.add_node(lane(id)); break;
        case 1: g.add_node(connector(id)); break;
        case 2: g.add_node(marker(id)); break;
        case 3: g.add_node(crosswalk(id)); break;
        case 4: g.add_node({id, NodeKind::Ego, {{"velocity", 1.0}, {"dimensions", Pair{4, 2}}}}); break;
        default: g.add_node(object(id, "vehicle")); break;
      }
      ids.push_back(id);
    }
    for (int k = 0; k < 40; ++k) {
      const auto& s = ids[rng() % ids.size()];
      const auto& t = ids[rng() % ids.size()];
      const EdgeKind kind = kAllEdgeKinds[rng() % 3];
      const auto& [from, to] = table.at(kind);
      const bool legal = from.contains(g.node(s).kind) && to.contains(g.node(t).kind);
      try {
        g.add_edge(s, kind, t, {{"side", "left"}});
        EXPECT_TRUE(legal);
      } catch (const Error& e) {
        if (e.code() == Errc::IllegalEndpointKinds) EXPECT_FALSE(legal);
        else EXPECT_EQ(e.code(), Errc::DuplicateEdge);
      }
    }
    for (const Edge& e : g.edges()) {
      const auto& [from, to] = table.at(e.kind);
      EXPECT_TRUE(from.contains(g.node(e.source).kind));
      EXPECT_TRUE(to.contains(g.node(e.target).kind));
    }
  }
}

TEST(Property, RandomGraphsHaveOneEgoAndRootIsItsTarget) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    SceneGraph g = oracle::random_graph(rng);
    ASSERT_EQ(g.nodes_of_kind(NodeKind::Ego).size(), 1u);
    auto on = g.neighbors(g.ego(), Direction::Out, EdgeKind::On);
    ASSERT_EQ(on.size(), 1u);
    EXPECT_EQ(on[0].node, g.root());
  }
}

TEST(StructuralEquality, IgnoresInsertionOrder) {
  auto make = [](bool reversed) {
    SceneGraph g("s", 7);
    std::vector<Node> nodes{lane("A"), lane("B"), ego()};
    if (reversed) std::reverse(nodes.begin(), nodes.end());
    for (auto& n : nodes) g.add_node(n);
    g.add_edge("A", EdgeKind::Next, "B");
    g.add_edge("ego", EdgeKind::On, "B");
    g.validate();
    return g;
  };
  EXPECT_TRUE(structurally_equal(make(false), make(true)));
}
