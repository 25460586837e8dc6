#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

struct KgNode {
  std::string id;
  std::string label;
  bool is_goal = false;
  bool is_obstacle = false;

  bool operator==(const KgNode&) const = default;
};

struct KgEdge {
  std::string source;
  std::string relation;
  std::string target;

  bool operator==(const KgEdge&) const = default;
};

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Triple&) const = default;
};

/// Story state as a graph. Node ids are derived from labels (lowercased,
/// non-alphanumerics collapsed to '_'), so equal labels merge into one node.
/// Exactly one node carries is_goal.
class KnowledgeGraph {
 public:
  /// Node id derived from a label.
  static std::string id_for(std::string_view label);

  const std::vector<KgNode>& nodes() const { return nodes_; }
  const std::vector<KgEdge>& edges() const { return edges_; }

  const KgNode* find(std::string_view id) const;
  bool has_node(std::string_view id) const;
  bool has_edge(std::string_view source, std::string_view relation,
                std::string_view target) const;

  /// Adds a node if its id is new; returns the id either way.
  std::string add_node(std::string_view label, bool is_goal = false,
                       bool is_obstacle = false);

  /// Endpoints must be existing node ids and must differ; self-loops and
  /// dangling edges are rejected with std::invalid_argument. Exact
  /// duplicates are ignored.
  void add_edge(std::string_view source, std::string_view relation,
                std::string_view target);

  std::string goal_id() const { return goal_id_; }
  void set_goal(std::string_view id);

  /// Ids of nodes reachable from `from` treating edges as undirected.
  std::vector<std::string> reachable_from(std::string_view from) const;
  bool connected(std::string_view a, std::string_view b) const;

 private:
  std::vector<KgNode> nodes_;
  std::vector<KgEdge> edges_;
  std::string goal_id_;
};

/// Parses "(subject, relation, object)" lines. Lines that do not match are
/// skipped; the return value preserves input order.
std::vector<Triple> parse_triples(std::string_view text);

/// Builds a graph from triples. The goal node is always created from
/// main_goal; triple endpoints merge into it when their derived ids match.
KnowledgeGraph graph_from_triples(const std::vector<Triple>& triples,
                                  std::string_view main_goal);

/// Human-readable rendering used inside prompts: a Nodes: section with one
/// "- label" line per node ([goal]/[obstacle] suffixes) and an Edges: section
/// with "- source -[relation]-> target" lines.
std::string describe_graph(const KnowledgeGraph& graph);

struct ObstacleParse {
  std::string node_label;
  std::vector<KgEdge> edges;
};

/// Parses the obstacle agent's output: a "NODE: label" line plus zero or more
/// "EDGE: source -relation-> target" lines, '|'-separated or on their own
/// lines. Throws ParseError when no NODE is present.
ObstacleParse parse_obstacle(std::string_view text);

std::string serialize_graph(const KnowledgeGraph& graph);
KnowledgeGraph parse_graph(std::string_view json_text);

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& file);
KnowledgeGraph load_graph(const std::filesystem::path& file);

}  // namespace storygen
