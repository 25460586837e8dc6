#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "storygen/knowledge_graph.hpp"
#include "storygen/memory.hpp"
#include "storygen/runtime.hpp"
#include "storygen/story.hpp"

namespace storygen {

enum class ExtractionMode {
  ThreeAgent,
  SingleAgent,
};

std::string to_string(ExtractionMode mode);
ExtractionMode extraction_mode_from_string(std::string_view text);

/// Runs the starter agent and parses its CHARACTERS / GOAL / OUTLINE
/// sections. At least one character, the goal, and the outline are all
/// required; a missing section raises ParseError with the raw response
/// attached.
StorySettings run_starter(AgentRuntime& rt, std::string_view topic,
                          std::string_view language);

/// One plain outline continuing from memory. Throws EmptyOutline when the
/// agent returns only whitespace.
Outline write_plain_outline(AgentRuntime& rt, const MemoryStore& memory,
                            int round);

/// Builds the story-state graph from memory. ThreeAgent runs the info
/// extractor then the abstraction agent; SingleAgent runs one combined
/// extractor. The goal node always exists, even when no triples parse
/// (degrades to a goal-only graph with a trace warning).
KnowledgeGraph extract_graph(AgentRuntime& rt, const MemoryStore& memory,
                             std::string_view main_goal, ExtractionMode mode);

struct ObstacleResult {
  KnowledgeGraph graph;
  std::string obstacle_id;
};

/// Injects exactly one new obstacle node plus its edges into a copy of
/// `graph`. Guarantees afterwards: the goal node gains at least one new
/// incident edge and the obstacle is connected to the goal. Edges naming
/// unknown endpoints are rewired to the goal; every repair is traced.
ObstacleResult generate_obstacle(AgentRuntime& rt, const KnowledgeGraph& graph);

/// One twist outline written from the obstacle-augmented graph. The prompt
/// embeds the serialized graph (goal and obstacle labels verbatim) and the
/// rendered memory context.
Outline write_twist_outline(AgentRuntime& rt, const MemoryStore& memory,
                            const KnowledgeGraph& graph, int round);

/// Writer/reader dialogue expansion of one outline. `dialogue_rounds` pairs
/// of writer draft + reader feedback, then one final writer edit. With
/// single_agent the reader and the edit pass are skipped and the first draft
/// is final.
StorySegment expand_with_dialogue(AgentRuntime& rt, const MemoryStore& memory,
                                  const Outline& outline, int dialogue_rounds,
                                  bool single_agent);

/// Summarizes a finished round into long-term entries by parsing "FACT:"
/// lines. When none parse, the whole response becomes a single entry and a
/// warning is traced.
std::vector<LongTermEntry> summarize_round(AgentRuntime& rt,
                                           const Outline& outline,
                                           const StorySegment& segment,
                                           int round);

/// Ending agent. `recent_story` should be the tail of the body text; the
/// round-0 anchors are rendered from memory so the ending can resolve the
/// main goal.
std::string run_ender(AgentRuntime& rt, const MemoryStore& memory,
                      std::string_view recent_story);

}  // namespace storygen
