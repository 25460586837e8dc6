#include "storygen/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>

#include "agent_call.hpp"
#include "json_io.hpp"
#include "serialize.hpp"
#include "storygen/errors.hpp"
#include "text_util.hpp"

namespace storygen {

using detail::call_role;
using detail::split_lines;
using detail::trim;

std::string to_string(Winner winner) {
  switch (winner) {
    case Winner::A:
      return "A";
    case Winner::B:
      return "B";
    case Winner::Both:
      return "Both";
    case Winner::Neither:
      return "Neither";
  }
  return "Neither";
}

Winner winner_from_string(std::string_view text) {
  if (text == "A") return Winner::A;
  if (text == "B") return Winner::B;
  if (text == "Both") return Winner::Both;
  if (text == "Neither") return Winner::Neither;
  throw FormatError("unknown winner: " + std::string(text));
}

const std::vector<std::string>& judge_metrics() {
  static const std::vector<std::string> metrics = {
      "interestingness", "commonsense", "no_theme_drift", "relevance",
      "readability"};
  return metrics;
}

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) {
    if (ch >= 'a' && ch <= 'z') {
      ch = static_cast<char>(ch - 'a' + 'A');
    }
  }
  return out;
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') {
      ch = static_cast<char>(ch - 'A' + 'a');
    }
  }
  return out;
}

/// "A." / "story b" / "BOTH" all parse; anything else is nullopt.
std::optional<Winner> parse_winner_token(std::string_view raw) {
  auto token = lower(trim(raw));
  while (!token.empty() && (token.back() == '.' || token.back() == '!')) {
    token.pop_back();
  }
  if (token.starts_with("story ")) {
    token = token.substr(6);
  }
  if (token == "a") return Winner::A;
  if (token == "b") return Winner::B;
  if (token == "both") return Winner::Both;
  if (token == "neither") return Winner::Neither;
  return std::nullopt;
}

std::string settings_block(const StorySettings& settings) {
  std::string names;
  for (const auto& character : settings.characters) {
    if (!names.empty()) {
      names += ", ";
    }
    names += character.name;
  }
  return "Topic: " + settings.topic + "\nMain character: " + names +
         "\nMain Goal: " + settings.main_goal;
}

}  // namespace

JudgeVerdict judge_pair(AgentRuntime& rt, const StoryPair& pair) {
  if (trim(pair.story_a).empty() || trim(pair.story_b).empty()) {
    throw EmptyInput("both stories must be non-empty to judge");
  }
  const auto raw =
      call_role(rt, "judge",
                {{"settings_block", settings_block(pair.settings)},
                 {"story_a", pair.story_a},
                 {"story_b", pair.story_b}});

  JudgeVerdict verdict;
  std::map<std::string, std::string> lines;
  std::string rationale;
  bool in_rationale = false;
  for (const auto& raw_line : split_lines(raw)) {
    const auto line = trim(raw_line);
    const auto colon = line.find(':');
    const auto key = colon == std::string::npos ? "" : upper(trim(line.substr(0, colon)));
    if (key == "RATIONALE") {
      rationale = trim(line.substr(colon + 1));
      in_rationale = true;
      continue;
    }
    if (!key.empty() && !lines.contains(key) &&
        (key == "OVERALL" ||
         std::find(judge_metrics().begin(), judge_metrics().end(),
                   lower(key)) != judge_metrics().end())) {
      lines[key] = trim(line.substr(colon + 1));
      in_rationale = false;
      continue;
    }
    if (in_rationale && !line.empty()) {
      rationale += " " + line;
    }
  }

  for (const auto& metric : judge_metrics()) {
    const auto it = lines.find(upper(metric));
    std::optional<Winner> parsed;
    if (it != lines.end()) {
      parsed = parse_winner_token(it->second);
    }
    if (parsed.has_value()) {
      verdict.metrics[metric] = *parsed;
    } else {
      verdict.metrics[metric] = Winner::Neither;
      verdict.warnings.push_back("metric '" + metric +
                                 "' not parseable, recorded as Neither");
    }
  }

  std::optional<Winner> overall;
  if (const auto it = lines.find("OVERALL"); it != lines.end()) {
    overall = parse_winner_token(it->second);
  }
  if (overall == Winner::A || overall == Winner::B) {
    verdict.overall = *overall;
  } else {
    verdict.overall = Winner::A;
    verdict.warnings.push_back("OVERALL not parseable as A or B, recorded as A");
  }
  verdict.rationale = rationale;
  return verdict;
}

namespace {

Winner unswap(Winner winner) {
  if (winner == Winner::A) return Winner::B;
  if (winner == Winner::B) return Winner::A;
  return winner;
}

}  // namespace

JudgeVerdict judge_pair_debiased(AgentRuntime& rt, const StoryPair& pair) {
  StoryPair swapped = pair;
  std::swap(swapped.story_a, swapped.story_b);
  std::swap(swapped.provenance_a, swapped.provenance_b);

  const auto first = judge_pair(rt, pair);
  const auto second = judge_pair(rt, swapped);

  JudgeVerdict merged;
  merged.warnings = first.warnings;
  for (const auto& warning : second.warnings) {
    merged.warnings.push_back("[swapped] " + warning);
  }

  for (const auto& metric : judge_metrics()) {
    const auto a = first.metrics.at(metric);
    const auto b = unswap(second.metrics.at(metric));
    if (a == b) {
      merged.metrics[metric] = a;
    } else {
      merged.metrics[metric] = Winner::Neither;
      merged.warnings.push_back("positions disagree on '" + metric +
                                "', recorded as Neither");
    }
  }

  const auto second_overall = unswap(second.overall);
  if (first.overall == second_overall) {
    merged.overall = first.overall;
  } else {
    merged.overall = first.overall;
    merged.warnings.push_back(
        "positions disagree on OVERALL, keeping the unswapped verdict");
  }
  merged.rationale = first.rationale;
  if (!second.rationale.empty()) {
    merged.rationale += "\n[swapped] " + second.rationale;
  }
  return merged;
}

double score_story(AgentRuntime& rt, std::string_view story) {
  if (trim(story).empty()) {
    throw EmptyInput("cannot score an empty story");
  }
  const auto raw = call_role(rt, "scorer", {{"story", std::string(story)}});

  // Prefer the SCORE: line; fall back to the first number in the response.
  std::string candidate;
  for (const auto& raw_line : split_lines(raw)) {
    const auto line = trim(raw_line);
    if (upper(line).starts_with("SCORE:")) {
      candidate = trim(line.substr(6));
      break;
    }
  }
  if (candidate.empty()) {
    candidate = trim(raw);
  }

  const char* begin = candidate.c_str();
  const char* scan = begin;
  while (*scan != '\0' &&
         !(std::isdigit(static_cast<unsigned char>(*scan)) != 0 ||
           (*scan == '-' &&
            std::isdigit(static_cast<unsigned char>(scan[1])) != 0))) {
    ++scan;
  }
  char* end = nullptr;
  const double value = std::strtod(scan, &end);
  if (end == scan) {
    throw ScoreParseError("no number in scorer response: " + raw);
  }
  if (value < 0.0 || value > 10.0) {
    throw ScoreParseError("score out of range [0, 10]: " +
                          std::to_string(value));
  }
  return value;
}

namespace {

void credit(TallyCell& cell, Winner winner) {
  switch (winner) {
    case Winner::A:
      ++cell.a;
      break;
    case Winner::B:
      ++cell.b;
      break;
    case Winner::Both:
      ++cell.both;
      break;
    case Winner::Neither:
      ++cell.neither;
      break;
  }
}

double pct(int credited, int total) {
  return total > 0 ? 100.0 * credited / total : 0.0;
}

}  // namespace

double Tally::pct_a(std::string_view metric) const {
  const auto it = per_metric.find(std::string(metric));
  if (it == per_metric.end()) {
    return 0.0;
  }
  return pct(it->second.a + it->second.both, total);
}

double Tally::pct_b(std::string_view metric) const {
  const auto it = per_metric.find(std::string(metric));
  if (it == per_metric.end()) {
    return 0.0;
  }
  return pct(it->second.b + it->second.both, total);
}

Tally tally_verdicts(const std::vector<JudgeVerdict>& verdicts) {
  if (verdicts.empty()) {
    throw EmptyInput("cannot tally zero verdicts");
  }
  Tally tally;
  tally.total = static_cast<int>(verdicts.size());
  for (const auto& metric : judge_metrics()) {
    tally.per_metric[metric];
  }
  for (const auto& verdict : verdicts) {
    for (const auto& metric : judge_metrics()) {
      const auto it = verdict.metrics.find(metric);
      credit(tally.per_metric[metric],
             it != verdict.metrics.end() ? it->second : Winner::Neither);
    }
    credit(tally.overall, verdict.overall);
  }
  return tally;
}

std::string serialize_verdict(const JudgeVerdict& verdict) {
  return detail::to_json(verdict).dump();
}

JudgeVerdict parse_verdict(std::string_view json_line) {
  auto parsed = nlohmann::json::parse(json_line, nullptr, false);
  if (parsed.is_discarded()) {
    throw FormatError("verdict line is not valid JSON");
  }
  return detail::verdict_from_json(parsed);
}

std::string serialize_tally(const Tally& tally) {
  return detail::to_json(tally).dump(2) + "\n";
}

std::string emit_questionnaire(const StoryPair& pair) {
  std::string out = "# Story Comparison Questionnaire\n\n";
  out += "## Shared premise\n\n";
  out += settings_block(pair.settings) + "\n\n";
  out += "## Story A\n\n" + pair.story_a + "\n\n";
  out += "## Story B\n\n" + pair.story_b + "\n\n";
  out += "## Questions\n\n";
  out +=
      "Q1. Which story do you prefer overall?\n"
      "  1. Story A\n"
      "  2. Story B\n\n";
  out +=
      "Q2. Which story is more interesting?\n"
      "  1. Story A\n"
      "  2. Story B\n"
      "  3. Both are equally interesting\n"
      "  4. Neither is interesting\n\n";
  out +=
      "Q3. In which story do events follow each other more believably?\n"
      "  1. Story A\n"
      "  2. Story B\n"
      "  3. Both are equally believable\n"
      "  4. Neither is believable\n\n";
  out +=
      "Q4. Which story stays closer to its theme from start to finish?\n"
      "  1. Story A\n"
      "  2. Story B\n"
      "  3. Both stay on theme\n"
      "  4. Neither stays on theme\n\n";
  out +=
      "Q5. Which story matches the shared premise above more closely?\n"
      "  1. Story A\n"
      "  2. Story B\n"
      "  3. Both match it equally\n"
      "  4. Neither matches it\n\n";
  out +=
      "Q6. Which story is easier to read?\n"
      "  1. Story A\n"
      "  2. Story B\n"
      "  3. Both read equally well\n"
      "  4. Neither reads well\n";
  return out;
}

}  // namespace storygen
