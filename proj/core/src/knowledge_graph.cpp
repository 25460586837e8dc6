#include "storygen/knowledge_graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>

#include "json_io.hpp"
#include "serialize.hpp"
#include "storygen/errors.hpp"
#include "text_util.hpp"

namespace storygen {

using detail::split_lines;
using detail::strip_bullet;
using detail::trim;

std::string KnowledgeGraph::id_for(std::string_view label) {
  std::string id;
  bool pending_sep = false;
  for (const char ch : label) {
    const auto byte = static_cast<unsigned char>(ch);
    const bool keep = byte >= 0x80 || (byte >= 'a' && byte <= 'z') ||
                      (byte >= '0' && byte <= '9') ||
                      (byte >= 'A' && byte <= 'Z');
    if (keep) {
      if (pending_sep && !id.empty()) {
        id.push_back('_');
      }
      pending_sep = false;
      id.push_back(byte >= 'A' && byte <= 'Z'
                       ? static_cast<char>(byte - 'A' + 'a')
                       : ch);
    } else {
      pending_sep = true;
    }
  }
  if (id.empty()) {
    return "node";
  }
  return id;
}

const KgNode* KnowledgeGraph::find(std::string_view id) const {
  for (const auto& node : nodes_) {
    if (node.id == id) {
      return &node;
    }
  }
  return nullptr;
}

bool KnowledgeGraph::has_node(std::string_view id) const {
  return find(id) != nullptr;
}

bool KnowledgeGraph::has_edge(std::string_view source,
                              std::string_view relation,
                              std::string_view target) const {
  return std::any_of(edges_.begin(), edges_.end(), [&](const KgEdge& e) {
    return e.source == source && e.relation == relation && e.target == target;
  });
}

std::string KnowledgeGraph::add_node(std::string_view label, bool is_goal,
                                     bool is_obstacle) {
  auto id = id_for(label);
  for (auto& node : nodes_) {
    if (node.id == id) {
      node.is_obstacle = node.is_obstacle || is_obstacle;
      if (is_goal) {
        set_goal(id);
      }
      return id;
    }
  }
  nodes_.push_back({id, trim(label), false, is_obstacle});
  if (is_goal) {
    set_goal(id);
  }
  return id;
}

void KnowledgeGraph::add_edge(std::string_view source,
                              std::string_view relation,
                              std::string_view target) {
  if (source == target) {
    throw std::invalid_argument("graph edges may not be self-loops");
  }
  if (!has_node(source) || !has_node(target)) {
    throw std::invalid_argument("edge endpoints must be existing node ids");
  }
  if (has_edge(source, relation, target)) {
    return;
  }
  edges_.push_back(
      {std::string(source), std::string(relation), std::string(target)});
}

void KnowledgeGraph::set_goal(std::string_view id) {
  KgNode* target = nullptr;
  for (auto& node : nodes_) {
    if (node.id == id) {
      target = &node;
    }
  }
  if (target == nullptr) {
    throw FormatError("goal node does not exist: " + std::string(id));
  }
  for (auto& node : nodes_) {
    node.is_goal = false;
  }
  target->is_goal = true;
  goal_id_ = id;
}

std::vector<std::string> KnowledgeGraph::reachable_from(
    std::string_view from) const {
  std::vector<std::string> out;
  if (!has_node(from)) {
    return out;
  }
  std::set<std::string> seen{std::string(from)};
  std::deque<std::string> queue{std::string(from)};
  while (!queue.empty()) {
    const auto current = queue.front();
    queue.pop_front();
    out.push_back(current);
    for (const auto& edge : edges_) {
      if (edge.source == current && has_node(edge.target) &&
          seen.insert(edge.target).second) {
        queue.push_back(edge.target);
      }
      if (edge.target == current && has_node(edge.source) &&
          seen.insert(edge.source).second) {
        queue.push_back(edge.source);
      }
    }
  }
  return out;
}

bool KnowledgeGraph::connected(std::string_view a, std::string_view b) const {
  if (!has_node(a) || !has_node(b)) {
    return false;
  }
  if (a == b) {
    return true;
  }
  const auto reachable = reachable_from(a);
  return std::find(reachable.begin(), reachable.end(), b) != reachable.end();
}

std::vector<Triple> parse_triples(std::string_view text) {
  std::vector<Triple> triples;
  for (const auto& raw_line : split_lines(text)) {
    const auto line = strip_bullet(raw_line);
    const auto open = line.find('(');
    const auto close = line.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos ||
        close <= open) {
      continue;
    }
    const auto inner = line.substr(open + 1, close - open - 1);
    const auto first = inner.find(',');
    if (first == std::string_view::npos) {
      continue;
    }
    const auto second = inner.find(',', first + 1);
    if (second == std::string_view::npos) {
      continue;
    }
    Triple triple{trim(inner.substr(0, first)),
                  trim(inner.substr(first + 1, second - first - 1)),
                  trim(inner.substr(second + 1))};
    if (triple.subject.empty() || triple.relation.empty() ||
        triple.object.empty()) {
      continue;
    }
    triples.push_back(std::move(triple));
  }
  return triples;
}

KnowledgeGraph graph_from_triples(const std::vector<Triple>& triples,
                                  std::string_view main_goal) {
  KnowledgeGraph graph;
  graph.add_node(main_goal, /*is_goal=*/true);
  for (const auto& triple : triples) {
    const auto subject = graph.add_node(triple.subject);
    const auto object = graph.add_node(triple.object);
    if (subject == object) {
      continue;
    }
    graph.add_edge(subject, triple.relation, object);
  }
  return graph;
}

std::string describe_graph(const KnowledgeGraph& graph) {
  std::map<std::string, std::string> labels;
  for (const auto& node : graph.nodes()) {
    labels[node.id] = node.label;
  }
  const auto label_of = [&](const std::string& id) {
    const auto it = labels.find(id);
    return it != labels.end() ? it->second : id;
  };

  std::string out = "Nodes:\n";
  for (const auto& node : graph.nodes()) {
    out += "- " + node.label;
    if (node.is_goal) {
      out += " [goal]";
    }
    if (node.is_obstacle) {
      out += " [obstacle]";
    }
    out += "\n";
  }
  if (!graph.edges().empty()) {
    out += "Edges:\n";
    for (const auto& edge : graph.edges()) {
      out += "- " + label_of(edge.source) + " -[" + edge.relation + "]-> " +
             label_of(edge.target) + "\n";
    }
  }
  return out;
}

namespace {

/// "A -relation-> B". The relation sits between the last " -" of the left
/// half and the "->", so relations may contain spaces and inner hyphens.
bool parse_edge_text(std::string_view text, KgEdge& out) {
  const auto arrow = text.find("->");
  if (arrow == std::string_view::npos) {
    return false;
  }
  const auto left = text.substr(0, arrow);
  const auto sep = left.rfind(" -");
  if (sep == std::string_view::npos) {
    return false;
  }
  out.source = trim(left.substr(0, sep));
  out.relation = trim(left.substr(sep + 2));
  out.target = trim(text.substr(arrow + 2));
  return !out.source.empty() && !out.relation.empty() && !out.target.empty();
}

}  // namespace

ObstacleParse parse_obstacle(std::string_view text) {
  ObstacleParse out;
  std::vector<std::string> parts;
  for (const auto& line : split_lines(text)) {
    std::size_t pos = 0;
    while (pos <= line.size()) {
      auto bar = line.find('|', pos);
      if (bar == std::string::npos) {
        bar = line.size();
      }
      parts.push_back(trim(std::string_view(line).substr(pos, bar - pos)));
      pos = bar + 1;
    }
  }

  for (const auto& part : parts) {
    if (part.starts_with("NODE:")) {
      if (out.node_label.empty()) {
        out.node_label = trim(std::string_view(part).substr(5));
      }
    } else if (part.starts_with("EDGE:")) {
      KgEdge edge;
      if (parse_edge_text(trim(std::string_view(part).substr(5)), edge)) {
        out.edges.push_back(std::move(edge));
      }
    }
  }

  if (out.node_label.empty()) {
    throw ParseError("obstacle response has no NODE line", std::string(text));
  }
  return out;
}

std::string serialize_graph(const KnowledgeGraph& graph) {
  return detail::to_json(graph).dump(2) + "\n";
}

KnowledgeGraph parse_graph(std::string_view json_text) {
  auto parsed = nlohmann::json::parse(json_text, nullptr, false);
  if (parsed.is_discarded()) {
    throw FormatError("graph is not valid JSON");
  }
  return detail::graph_from_json(parsed);
}

void save_graph(const KnowledgeGraph& graph,
                const std::filesystem::path& file) {
  detail::write_file_atomic(file, serialize_graph(graph));
}

KnowledgeGraph load_graph(const std::filesystem::path& file) {
  return parse_graph(detail::read_text_file(file));
}

}  // namespace storygen
