#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "storygen/runtime.hpp"
#include "storygen/story.hpp"

namespace storygen {

enum class Winner {
  A,
  B,
  Both,
  Neither,
};

std::string to_string(Winner winner);
Winner winner_from_string(std::string_view text);

/// The five comparison metrics, in report order.
const std::vector<std::string>& judge_metrics();

struct JudgeVerdict {
  /// metric name -> winner; always holds every judge_metrics() key.
  std::map<std::string, Winner> metrics;
  /// Overall pick is forced to a side: A or B only.
  Winner overall = Winner::A;
  std::string rationale;
  /// Parse degradations, e.g. a metric line that had to default to Neither.
  std::vector<std::string> warnings;
};

/// Two stories under one shared premise, with an optional provenance note
/// per side (method name, run id).
struct StoryPair {
  std::string story_a;
  std::string story_b;
  StorySettings settings;
  std::string provenance_a;
  std::string provenance_b;
};

/// One judge call comparing the pair. Throws EmptyInput when either story
/// is empty.
JudgeVerdict judge_pair(AgentRuntime& rt, const StoryPair& pair);

/// Position-debiased judging: judges twice with the stories swapped, maps
/// the swapped verdict back, and keeps per-metric agreement. Disagreements
/// become Neither; the overall pick falls back to the first call's.
JudgeVerdict judge_pair_debiased(AgentRuntime& rt, const StoryPair& pair);

/// Single-story quality score in [0, 10]. Throws ScoreParseError when no
/// number in range can be read from the response.
double score_story(AgentRuntime& rt, std::string_view story);

struct TallyCell {
  int a = 0;
  int b = 0;
  int both = 0;
  int neither = 0;
};

/// Aggregated verdicts. A side's percentage credits Both to both sides:
/// pct_a = 100 * (a + both) / total.
struct Tally {
  std::map<std::string, TallyCell> per_metric;
  TallyCell overall;
  int total = 0;

  double pct_a(std::string_view metric) const;
  double pct_b(std::string_view metric) const;
};

/// Throws EmptyInput on an empty verdict list.
Tally tally_verdicts(const std::vector<JudgeVerdict>& verdicts);

/// One verdict as a single JSON line, and back.
std::string serialize_verdict(const JudgeVerdict& verdict);
JudgeVerdict parse_verdict(std::string_view json_line);

std::string serialize_tally(const Tally& tally);

/// Human evaluation sheet for two stories: the shared settings, both texts,
/// and six multiple-choice questions (preference first, then one per
/// comparison axis with Both/Neither options).
std::string emit_questionnaire(const StoryPair& pair);

}  // namespace storygen
