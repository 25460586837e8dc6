#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "storygen/errors.hpp"
#include "storygen/knowledge_graph.hpp"
#include "test_support.hpp"

using namespace storygen;

TEST_CASE("node ids are derived from labels") {
  CHECK(KnowledgeGraph::id_for("Hello World!") == "hello_world");
  CHECK(KnowledgeGraph::id_for("  spaced   out  ") == "spaced_out");
  CHECK(KnowledgeGraph::id_for("Route 66") == "route_66");
  CHECK(KnowledgeGraph::id_for("the lamp") == "the_lamp");
  CHECK(KnowledgeGraph::id_for("The Lamp?!") == "the_lamp");
  CHECK(KnowledgeGraph::id_for("") == "node");
  CHECK(KnowledgeGraph::id_for("?!?") == "node");
  // Non-ASCII bytes survive unchanged.
  CHECK(KnowledgeGraph::id_for("Café") == "café");
}

TEST_CASE("nodes with equal derived ids merge") {
  KnowledgeGraph graph;
  const auto first = graph.add_node("The Lamp");
  const auto second = graph.add_node("the lamp!");
  CHECK(first == second);
  CHECK(graph.nodes().size() == 1);
  // The first label wins; later merges only raise flags.
  CHECK(graph.find(first)->label == "The Lamp");

  graph.add_node("the lamp", false, true);
  CHECK(graph.nodes().size() == 1);
  CHECK(graph.find(first)->is_obstacle);
}

TEST_CASE("exactly one node carries the goal flag") {
  KnowledgeGraph graph;
  graph.add_node("old goal", true);
  CHECK(graph.goal_id() == "old_goal");
  graph.add_node("new goal", true);
  CHECK(graph.goal_id() == "new_goal");

  int goal_nodes = 0;
  for (const auto& node : graph.nodes()) {
    if (node.is_goal) {
      ++goal_nodes;
    }
  }
  CHECK(goal_nodes == 1);
  CHECK(graph.find("old_goal")->is_goal == false);

  CHECK_THROWS_AS(graph.set_goal("never_added"), FormatError);
}

TEST_CASE("edges require existing distinct endpoints") {
  KnowledgeGraph graph;
  const auto a = graph.add_node("alpha");
  const auto b = graph.add_node("beta");

  CHECK_THROWS_AS(graph.add_edge(a, "loops", a), std::invalid_argument);
  CHECK_THROWS_AS(graph.add_edge(a, "points", "ghost"),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph.add_edge("ghost", "points", b),
                  std::invalid_argument);

  graph.add_edge(a, "likes", b);
  CHECK(graph.edges().size() == 1);
  // Exact duplicates are ignored; a new relation is a new edge.
  graph.add_edge(a, "likes", b);
  CHECK(graph.edges().size() == 1);
  graph.add_edge(a, "fears", b);
  CHECK(graph.edges().size() == 2);
  CHECK(graph.has_edge(a, "fears", b));
  CHECK_FALSE(graph.has_edge(b, "fears", a));
}

TEST_CASE("parse_triples reads parenthesized lines and skips the rest") {
  const auto triples = parse_triples(
      "(Mara, tends, the lamp)\n"
      "- (Tomas, resents, Mara)\n"
      "* (the storm, threatens, the coast)\n"
      "2. (the town, depends on, the light)\n"
      "this line has no triple\n"
      "(missing a comma)\n"
      "(one, two)\n"
      "(, empty, subject)\n"
      "closing before opening) (\n");

  REQUIRE(triples.size() == 4);
  CHECK(triples[0] == Triple{"Mara", "tends", "the lamp"});
  CHECK(triples[1] == Triple{"Tomas", "resents", "Mara"});
  CHECK(triples[2] == Triple{"the storm", "threatens", "the coast"});
  CHECK(triples[3] == Triple{"the town", "depends on", "the light"});

  CHECK(parse_triples("").empty());
  CHECK(parse_triples("nothing to see").empty());

  // Prose around the parens does not matter.
  const auto embedded = parse_triples("I found (a, maps to, b) in the text");
  REQUIRE(embedded.size() == 1);
  CHECK(embedded[0].subject == "a");
}

TEST_CASE("graph_from_triples always seeds the goal node") {
  const auto graph = graph_from_triples({}, "keep the lamp burning");
  REQUIRE(graph.nodes().size() == 1);
  CHECK(graph.goal_id() == "keep_the_lamp_burning");
  CHECK(graph.nodes()[0].is_goal);
}

TEST_CASE("graph_from_triples merges endpoints into the goal") {
  const auto graph = graph_from_triples(
      {{"Mara", "protects", "the lamp"},
       {"The Lamp!", "lights", "the coast"},
       {"same thing", "is", "Same Thing"}},
      "the lamp");

  CHECK(graph.goal_id() == "the_lamp");
  CHECK(graph.find("the_lamp")->is_goal);
  // "the lamp" and "The Lamp!" merged; the self-loop triple was dropped.
  CHECK(graph.nodes().size() == 4);
  CHECK(graph.has_edge("mara", "protects", "the_lamp"));
  CHECK(graph.has_edge("the_lamp", "lights", "the_coast"));
  for (const auto& edge : graph.edges()) {
    CHECK(edge.source != edge.target);
  }
}

TEST_CASE("describe_graph marks goals and obstacles") {
  KnowledgeGraph graph;
  graph.add_node("the lamp", true);
  graph.add_node("a rogue wave", false, true);
  graph.add_node("Mara");
  graph.add_edge("a_rogue_wave", "threatens", "the_lamp");

  const auto text = describe_graph(graph);
  CHECK(text.find("- the lamp [goal]") != std::string::npos);
  CHECK(text.find("- a rogue wave [obstacle]") != std::string::npos);
  CHECK(text.find("- Mara\n") != std::string::npos);
  CHECK(text.find("- a rogue wave -[threatens]-> the lamp") !=
        std::string::npos);

  KnowledgeGraph edgeless;
  edgeless.add_node("only", true);
  const auto lone = describe_graph(edgeless);
  CHECK(lone.find("Nodes:") != std::string::npos);
  CHECK(lone.find("Edges:") == std::string::npos);
}

TEST_CASE("parse_obstacle accepts pipe and newline separators") {
  const auto piped = parse_obstacle(
      "NODE: a rogue wave | EDGE: a rogue wave -threatens-> the lamp");
  CHECK(piped.node_label == "a rogue wave");
  REQUIRE(piped.edges.size() == 1);
  CHECK(piped.edges[0] == KgEdge{"a rogue wave", "threatens", "the lamp"});

  const auto lined = parse_obstacle(
      "NODE: a mutiny\n"
      "EDGE: a mutiny -divides-> the crew\n"
      "EDGE: the crew -abandons-> the lamp\n");
  CHECK(lined.node_label == "a mutiny");
  REQUIRE(lined.edges.size() == 2);
  CHECK(lined.edges[1].relation == "abandons");

  // Relations may contain spaces; the delimiters are " -" and "->".
  const auto spaced = parse_obstacle(
      "NODE: a debt\nEDGE: a debt -calls due on-> the family");
  REQUIRE(spaced.edges.size() == 1);
  CHECK(spaced.edges[0].relation == "calls due on");
}

TEST_CASE("parse_obstacle keeps the first NODE and skips bad edges") {
  const auto parsed = parse_obstacle(
      "NODE: first\nNODE: second\nEDGE: missing arrow\nEDGE: a -b-> c");
  CHECK(parsed.node_label == "first");
  REQUIRE(parsed.edges.size() == 1);
  CHECK(parsed.edges[0] == KgEdge{"a", "b", "c"});
}

TEST_CASE("parse_obstacle without a NODE raises ParseError") {
  try {
    parse_obstacle("EDGE: a -b-> c");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.raw_response() == "EDGE: a -b-> c");
  }
}

TEST_CASE("graphs survive serialization round-trips") {
  std::mt19937 rng(60601);
  std::uniform_int_distribution<int> node_count(1, 12);
  std::uniform_int_distribution<int> edge_count(0, 20);
  std::uniform_int_distribution<int> flag(0, 4);

  for (int trial = 0; trial < 200; ++trial) {
    KnowledgeGraph graph;
    std::vector<std::string> ids;
    const int nodes = node_count(rng);
    for (int i = 0; i < nodes; ++i) {
      ids.push_back(graph.add_node(ts::random_word(rng) + " " +
                                       std::to_string(i),
                                   i == 0, flag(rng) == 0));
    }
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    const int edges = edge_count(rng);
    for (int i = 0; i < edges; ++i) {
      const auto& a = ids[pick(rng)];
      const auto& b = ids[pick(rng)];
      if (a == b) {
        continue;
      }
      graph.add_edge(a, ts::random_word(rng), b);
    }

    const auto restored = parse_graph(serialize_graph(graph));
    CHECK(restored.nodes() == graph.nodes());
    CHECK(restored.edges() == graph.edges());
    CHECK(restored.goal_id() == graph.goal_id());
  }
}

TEST_CASE("malformed graph data raises FormatError") {
  CHECK_THROWS_AS(parse_graph("not json"), FormatError);
  CHECK_THROWS_AS(parse_graph("{\"nodes\": \"wrong type\"}"), FormatError);

  const auto graph = graph_from_triples({{"a", "b", "c"}}, "goal");
  auto serialized = serialize_graph(graph);
  serialized.resize(serialized.size() / 2);
  CHECK_THROWS_AS(parse_graph(serialized), FormatError);
}

TEST_CASE("reachability treats edges as undirected") {
  KnowledgeGraph graph;
  graph.add_node("a", true);
  graph.add_node("b");
  graph.add_node("c");
  graph.add_node("island");
  graph.add_edge("a", "r1", "b");
  graph.add_edge("c", "r2", "b");

  auto reach = graph.reachable_from("a");
  std::sort(reach.begin(), reach.end());
  CHECK(reach == std::vector<std::string>{"a", "b", "c"});

  CHECK(graph.connected("a", "c"));
  CHECK(graph.connected("c", "a"));
  CHECK_FALSE(graph.connected("a", "island"));
  CHECK(graph.connected("island", "island"));
  CHECK_FALSE(graph.connected("a", "ghost"));
  CHECK(graph.reachable_from("ghost").empty());
}

TEST_CASE("graphs persist to disk") {
  ts::TempDir dir;
  auto graph = graph_from_triples(
      {{"Mara", "tends", "the lamp"}, {"Tomas", "leaves", "the island"}},
      "the lamp");
  graph.add_node("a rogue wave", false, true);
  graph.add_edge("a_rogue_wave", "threatens", "the_lamp");

  save_graph(graph, dir / "kg.json");
  const auto loaded = load_graph(dir / "kg.json");
  CHECK(loaded.nodes() == graph.nodes());
  CHECK(loaded.edges() == graph.edges());
  CHECK(loaded.goal_id() == graph.goal_id());

  CHECK_THROWS_AS(load_graph(dir / "missing.json"), FormatError);
}
