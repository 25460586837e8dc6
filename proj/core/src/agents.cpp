#include "storygen/agents.hpp"

#include <stdexcept>

#include "agent_call.hpp"
#include "storygen/errors.hpp"
#include "text_util.hpp"

namespace storygen {

using detail::call_role;
using detail::split_lines;
using detail::strip_bullet;
using detail::trim;

std::string to_string(ExtractionMode mode) {
  return mode == ExtractionMode::ThreeAgent ? "three" : "single";
}

ExtractionMode extraction_mode_from_string(std::string_view text) {
  if (text == "three") return ExtractionMode::ThreeAgent;
  if (text == "single") return ExtractionMode::SingleAgent;
  throw FormatError("unknown extraction mode: " + std::string(text));
}

namespace {

void warn(AgentRuntime& rt, std::string_view source, std::string_view message) {
  if (rt.trace != nullptr) {
    rt.trace->warning(rt.round, source, message);
  }
}

void trace_mutation(AgentRuntime& rt, std::string_view op, std::size_t before,
                    std::size_t after) {
  if (rt.trace != nullptr) {
    rt.trace->kg_mutation(rt.round, op, before, after);
  }
}

bool is_section_header(std::string_view line) {
  return line.starts_with("CHARACTERS:") || line.starts_with("GOAL:") ||
         line.starts_with("OUTLINE:");
}

}  // namespace

StorySettings run_starter(AgentRuntime& rt, std::string_view topic,
                          std::string_view language) {
  const auto raw = call_role(rt, "starter",
                             {{"topic", std::string(topic)},
                              {"language", std::string(language)}});

  StorySettings settings;
  settings.topic = std::string(topic);
  settings.language = std::string(language);

  enum class Section { None, Characters, Goal, Outline };
  Section section = Section::None;
  std::string goal;
  std::string outline;

  for (const auto& raw_line : split_lines(raw)) {
    const auto line = trim(raw_line);
    if (line.starts_with("CHARACTERS:")) {
      section = Section::Characters;
      continue;
    }
    if (line.starts_with("GOAL:")) {
      section = Section::Goal;
      goal = trim(line.substr(5));
      continue;
    }
    if (line.starts_with("OUTLINE:")) {
      section = Section::Outline;
      const auto inline_text = trim(line.substr(8));
      if (!inline_text.empty()) {
        outline = inline_text;
      }
      continue;
    }
    switch (section) {
      case Section::Characters: {
        const auto item = trim(strip_bullet(line));
        if (item.empty()) {
          break;
        }
        const auto colon = item.find(':');
        CharacterSpec character;
        if (colon == std::string::npos) {
          character.name = item;
        } else {
          character.name = trim(item.substr(0, colon));
          character.description = trim(item.substr(colon + 1));
        }
        if (!character.name.empty()) {
          settings.characters.push_back(std::move(character));
        }
        break;
      }
      case Section::Goal:
        if (!line.empty()) {
          goal += goal.empty() ? line : " " + line;
        }
        break;
      case Section::Outline:
        if (!line.empty()) {
          outline += outline.empty() ? line : "\n" + line;
        }
        break;
      case Section::None:
        break;
    }
  }

  if (goal.empty()) {
    throw ParseError("starter response has no GOAL", raw);
  }
  if (outline.empty()) {
    throw ParseError("starter response has no OUTLINE", raw);
  }
  if (settings.characters.empty()) {
    throw ParseError("starter response has no parseable characters", raw);
  }
  settings.main_goal = std::move(goal);
  settings.first_outline = std::move(outline);
  return settings;
}

Outline write_plain_outline(AgentRuntime& rt, const MemoryStore& memory,
                            int round) {
  const auto context = render_context(memory, rt.context_budget);
  const auto text =
      trim(call_role(rt, "plain_outline", {{"memory_context", context}}));
  if (text.empty()) {
    throw EmptyOutline("plain outline for round " + std::to_string(round) +
                       " came back empty");
  }
  return {round, text, OutlineOrigin::Plain};
}

KnowledgeGraph extract_graph(AgentRuntime& rt, const MemoryStore& memory,
                             std::string_view main_goal, ExtractionMode mode) {
  const auto context = render_context(memory, rt.context_budget);
  const auto goal = std::string(main_goal);

  std::string triples_text;
  if (mode == ExtractionMode::ThreeAgent) {
    const auto info = call_role(
        rt, "kg_info", {{"story_context", context}, {"main_goal", goal}});
    triples_text = call_role(rt, "kg_abstract",
                             {{"info", info}, {"main_goal", goal}});
  } else {
    triples_text = call_role(
        rt, "kg_extract", {{"story_context", context}, {"main_goal", goal}});
  }

  const auto triples = parse_triples(triples_text);
  if (triples.empty()) {
    warn(rt, "kg",
         "no parseable triples in the extraction response; continuing with a "
         "goal-only graph");
  }
  auto graph = graph_from_triples(triples, main_goal);
  trace_mutation(rt, "extract", 0, graph.nodes().size());
  return graph;
}

ObstacleResult generate_obstacle(AgentRuntime& rt,
                                 const KnowledgeGraph& base) {
  auto graph = base;
  const auto* goal_node = graph.find(graph.goal_id());
  if (goal_node == nullptr) {
    throw std::invalid_argument("graph has no goal node");
  }
  const auto before_nodes = graph.nodes().size();
  const auto goal_label = goal_node->label;

  const auto obstacle_raw =
      call_role(rt, "kg_obstacle",
                {{"graph", describe_graph(graph)}, {"main_goal", goal_label}});
  const auto parsed = parse_obstacle(obstacle_raw);

  // The obstacle must be a NEW node; suffix the label until its id is free.
  auto label = parsed.node_label;
  const auto original_id = KnowledgeGraph::id_for(label);
  int attempt = 0;
  while (graph.has_node(KnowledgeGraph::id_for(label))) {
    ++attempt;
    label = parsed.node_label + (attempt == 1
                                     ? " (obstacle)"
                                     : " (obstacle " + std::to_string(attempt) +
                                           ")");
  }
  if (attempt > 0 && rt.trace != nullptr) {
    rt.trace->kg_repair(rt.round, "relabel",
                        "obstacle label collided, renamed to '" + label + "'");
  }
  const auto obstacle_id =
      graph.add_node(label, /*is_goal=*/false, /*is_obstacle=*/true);

  const auto resolve = [&](const std::string& endpoint) {
    const auto id = KnowledgeGraph::id_for(endpoint);
    if (id == original_id) {
      return obstacle_id;
    }
    if (graph.has_node(id)) {
      return id;
    }
    if (rt.trace != nullptr) {
      rt.trace->kg_repair(rt.round, "rewire",
                          "edge endpoint '" + endpoint +
                              "' is not in the graph, rewired to the goal");
    }
    return graph.goal_id();
  };

  bool goal_touched = false;
  for (const auto& edge : parsed.edges) {
    const auto source = resolve(edge.source);
    const auto target = resolve(edge.target);
    if (source == target) {
      if (rt.trace != nullptr) {
        rt.trace->kg_repair(rt.round, "drop",
                            "edge collapsed to a self-loop, dropped");
      }
      continue;
    }
    graph.add_edge(source, edge.relation, target);
    goal_touched = goal_touched || source == graph.goal_id() ||
                   target == graph.goal_id();
  }

  // Guarantee: at least one new edge is incident to the goal, and the
  // obstacle has a path to it.
  if (!goal_touched || !graph.connected(obstacle_id, graph.goal_id())) {
    graph.add_edge(obstacle_id, "obstructs", graph.goal_id());
    if (rt.trace != nullptr) {
      rt.trace->kg_repair(rt.round, "connect",
                          "no new edge reached the goal, linked the obstacle "
                          "to it directly");
    }
  }

  trace_mutation(rt, "obstacle", before_nodes, graph.nodes().size());
  return {std::move(graph), obstacle_id};
}

Outline write_twist_outline(AgentRuntime& rt, const MemoryStore& memory,
                            const KnowledgeGraph& graph, int round) {
  const auto context = render_context(memory, rt.context_budget);
  const auto text = trim(call_role(
      rt, "twist_outline",
      {{"memory_context", context}, {"graph", describe_graph(graph)}}));
  if (text.empty()) {
    throw EmptyOutline("twist outline for round " + std::to_string(round) +
                       " came back empty");
  }
  return {round, text, OutlineOrigin::Twist};
}

StorySegment expand_with_dialogue(AgentRuntime& rt, const MemoryStore& memory,
                                  const Outline& outline, int dialogue_rounds,
                                  bool single_agent) {
  if (dialogue_rounds < 1) {
    throw std::invalid_argument("dialogue_rounds must be at least 1");
  }
  const auto context = render_context(memory, rt.context_budget);

  DialogueTranscript transcript;
  std::string revision_notes;

  if (single_agent) {
    const auto draft = trim(call_role(rt, "writer_sim",
                                      {{"memory_context", context},
                                       {"outline", outline.text},
                                       {"revision_notes", ""}}));
    transcript.rounds.push_back({draft, ""});
    transcript.final_text = draft;
  } else {
    std::string draft;
    std::string feedback;
    for (int i = 0; i < dialogue_rounds; ++i) {
      draft = trim(call_role(rt, "writer_sim",
                             {{"memory_context", context},
                              {"outline", outline.text},
                              {"revision_notes", revision_notes}}));
      feedback = trim(call_role(
          rt, "reader_sim", {{"memory_context", context}, {"draft", draft}}));
      transcript.rounds.push_back({draft, feedback});
      revision_notes = "\nYour previous draft:\n" + draft +
                       "\n\nReader feedback to address:\n" + feedback + "\n";
    }
    transcript.final_text = trim(call_role(rt, "writer_edit",
                                           {{"memory_context", context},
                                            {"draft", draft},
                                            {"feedback", feedback}}));
  }

  StorySegment segment;
  segment.round_index = outline.round_index;
  segment.text = transcript.final_text;
  segment.word_count = count_words(segment.text);
  segment.transcript = std::move(transcript);
  return segment;
}

std::vector<LongTermEntry> summarize_round(AgentRuntime& rt,
                                           const Outline& outline,
                                           const StorySegment& segment,
                                           int round) {
  const auto raw = call_role(rt, "memory_summarizer",
                             {{"round", std::to_string(round)},
                              {"outline", outline.text},
                              {"segment", segment.text}});

  std::vector<LongTermEntry> entries;
  for (const auto& raw_line : split_lines(raw)) {
    const auto trimmed = trim(raw_line);
    const auto line = std::string(strip_bullet(trimmed));
    if (!line.starts_with("FACT:")) {
      continue;
    }
    const auto fact = trim(std::string_view(line).substr(5));
    if (!fact.empty()) {
      entries.push_back({EntryKind::StoryFact, round, fact});
    }
  }

  if (entries.empty()) {
    const auto whole = trim(raw);
    if (whole.empty()) {
      warn(rt, "memory_summarizer", "empty summary, no facts recorded");
      return entries;
    }
    warn(rt, "memory_summarizer",
         "no FACT lines parsed, keeping the whole summary as one fact");
    entries.push_back({EntryKind::StoryFact, round, whole});
  }
  return entries;
}

std::string run_ender(AgentRuntime& rt, const MemoryStore& memory,
                      std::string_view recent_story) {
  const auto raw = call_role(rt, "ender",
                             {{"anchors", format_round0_anchors(memory.long_term)},
                              {"recent_story", std::string(recent_story)}});
  const auto text = trim(raw);
  if (text.empty()) {
    throw ParseError("ending came back empty", raw);
  }
  return text;
}

}  // namespace storygen
