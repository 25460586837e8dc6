#include "storygen/prompts.hpp"

#include <algorithm>

#include "json_io.hpp"
#include "storygen/errors.hpp"

namespace storygen {

std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    const auto close = text.find('}', open + 1);
    if (close == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const auto key = std::string(text.substr(open + 1, close - open - 1));
    const auto it = values.find(key);
    if (it != values.end()) {
      out.append(it->second);
    } else {
      out.append(text.substr(open, close - open + 1));
    }
    pos = close + 1;
  }
  return out;
}

namespace {

constexpr const char* kWriterSystem =
    "You are a novelist who writes vivid, coherent long-form fiction. Keep "
    "every detail consistent with the story anchors and facts you are given. "
    "Write in the story's language.";

constexpr const char* kPlannerSystem =
    "You are a story planner. You produce compact outlines that move the "
    "plot forward without contradicting anything established so far.";

constexpr const char* kAnalystSystem =
    "You are a careful analyst. You follow output format instructions "
    "exactly, with no commentary outside the requested format.";

PromptTemplate starter_template() {
  return {
      kPlannerSystem,
      "Invent the premise for a long story about this topic: {topic}\n"
      "The story will be written in {language}.\n"
      "\n"
      "Answer in exactly this layout:\n"
      "CHARACTERS:\n"
      "- <name>: <one-line description>\n"
      "(list 2 to 4 characters)\n"
      "GOAL: <the single main goal that drives the whole story>\n"
      "OUTLINE:\n"
      "<a short outline of the opening situation, 3 to 6 sentences>\n"};
}

PromptTemplate plain_outline_template() {
  return {
      kPlannerSystem,
      "{memory_context}\n"
      "\n"
      "Write the outline for the next part of the story. Continue from the "
      "most recent outline, advance the plot toward the main goal, and stay "
      "consistent with every fact above. Reply with the outline text only, "
      "3 to 6 sentences.\n"};
}

PromptTemplate kg_info_template() {
  return {
      kAnalystSystem,
      "{story_context}\n"
      "\n"
      "Main goal of the story: {main_goal}\n"
      "\n"
      "List the concrete pieces of story information that matter right now: "
      "characters, places, objects, and the relations between them. One "
      "item per line, plain statements only.\n"};
}

PromptTemplate kg_abstract_template() {
  return {
      kAnalystSystem,
      "Story information:\n"
      "{info}\n"
      "\n"
      "Main goal of the story: {main_goal}\n"
      "\n"
      "Abstract this information into knowledge-graph triples. Output one "
      "triple per line in exactly this form, nothing else:\n"
      "(subject, relation, object)\n"};
}

PromptTemplate kg_extract_template() {
  return {
      kAnalystSystem,
      "{story_context}\n"
      "\n"
      "Main goal of the story: {main_goal}\n"
      "\n"
      "Extract the current story state as knowledge-graph triples. Output "
      "one triple per line in exactly this form, nothing else:\n"
      "(subject, relation, object)\n"};
}

PromptTemplate kg_obstacle_template() {
  return {
      kPlannerSystem,
      "Current story state as a graph:\n"
      "{graph}\n"
      "\n"
      "Main goal of the story: {main_goal}\n"
      "\n"
      "Invent ONE new obstacle that blocks the path to the main goal. "
      "Answer in exactly this form:\n"
      "NODE: <short label for the obstacle> | EDGE: <source> -<relation>-> "
      "<target>\n"
      "The edge must connect the obstacle into the existing graph. You may "
      "add more EDGE parts separated by ' | '.\n"};
}

PromptTemplate twist_outline_template() {
  return {
      kPlannerSystem,
      "{memory_context}\n"
      "\n"
      "Updated story graph, including a brand-new obstacle:\n"
      "{graph}\n"
      "\n"
      "The recent outlines were too repetitive. Write the outline for the "
      "next part of the story so that the new obstacle disrupts the "
      "expected course of events. Keep all established facts intact. Reply "
      "with the outline text only, 3 to 6 sentences.\n"};
}

PromptTemplate writer_sim_template() {
  return {
      kWriterSystem,
      "{memory_context}\n"
      "\n"
      "Outline for this part:\n"
      "{outline}\n"
      "{revision_notes}"
      "\n"
      "Write this part of the story in full prose. Aim for roughly 800 "
      "words. Do not summarize; dramatize scenes with dialogue and detail. "
      "Reply with the story text only.\n"};
}

PromptTemplate reader_sim_template() {
  return {
      "You are a demanding reader giving notes to the author. Be specific "
      "and brief.",
      "{memory_context}\n"
      "\n"
      "Draft of the next part:\n"
      "{draft}\n"
      "\n"
      "Give your reaction in 3 to 5 bullet points: what is confusing, what "
      "contradicts established facts, what falls flat, and what you want "
      "more of.\n"};
}

PromptTemplate writer_edit_template() {
  return {
      kWriterSystem,
      "{memory_context}\n"
      "\n"
      "Your draft:\n"
      "{draft}\n"
      "\n"
      "Reader feedback:\n"
      "{feedback}\n"
      "\n"
      "Rewrite the draft into its final form, addressing the feedback "
      "without shrinking the text. Reply with the story text only.\n"};
}

PromptTemplate memory_summarizer_template() {
  return {
      kAnalystSystem,
      "Story part {round} was just written.\n"
      "\n"
      "Its outline:\n"
      "{outline}\n"
      "\n"
      "Its full text:\n"
      "{segment}\n"
      "\n"
      "Record the durable facts this part established: events that "
      "happened, changes to characters, new places or objects. Output one "
      "line per fact in exactly this form, nothing else:\n"
      "FACT: <one sentence>\n"};
}

PromptTemplate ender_template() {
  return {
      kWriterSystem,
      "{anchors}\n"
      "\n"
      "The story so far ends with:\n"
      "{recent_story}\n"
      "\n"
      "Write the final part of the story. Resolve the main goal explicitly "
      "and give the characters a closing beat. Reply with the story text "
      "only.\n"};
}

PromptTemplate judge_template() {
  return {
      kAnalystSystem,
      "Two stories were generated from the same premise.\n"
      "\n"
      "{settings_block}\n"
      "\n"
      "=== STORY A ===\n"
      "{story_a}\n"
      "\n"
      "=== STORY B ===\n"
      "{story_b}\n"
      "\n"
      "Compare them on each dimension. For every line answer A, B, Both, "
      "or Neither. OVERALL must be A or B.\n"
      "INTERESTINGNESS: <answer>\n"
      "COMMONSENSE: <answer>\n"
      "NO_THEME_DRIFT: <answer>\n"
      "RELEVANCE: <answer>\n"
      "READABILITY: <answer>\n"
      "OVERALL: <A or B>\n"
      "RATIONALE: <one or two sentences>\n"};
}

PromptTemplate scorer_template() {
  return {
      kAnalystSystem,
      "Rate the overall quality of this story on a scale from 0 to 10, "
      "where 10 is outstanding published fiction. Reply with exactly one "
      "line:\n"
      "SCORE: <number>\n"
      "\n"
      "=== STORY ===\n"
      "{story}\n"};
}

}  // namespace

PromptLibrary::PromptLibrary() {
  templates_["starter"] = starter_template();
  templates_["plain_outline"] = plain_outline_template();
  templates_["kg_info"] = kg_info_template();
  templates_["kg_abstract"] = kg_abstract_template();
  templates_["kg_extract"] = kg_extract_template();
  templates_["kg_obstacle"] = kg_obstacle_template();
  templates_["twist_outline"] = twist_outline_template();
  templates_["writer_sim"] = writer_sim_template();
  templates_["reader_sim"] = reader_sim_template();
  templates_["writer_edit"] = writer_edit_template();
  templates_["memory_summarizer"] = memory_summarizer_template();
  templates_["ender"] = ender_template();
  templates_["judge"] = judge_template();
  templates_["scorer"] = scorer_template();
}

bool PromptLibrary::has(std::string_view role_tag) const {
  return templates_.contains(std::string(role_tag));
}

const PromptTemplate& PromptLibrary::get(std::string_view role_tag) const {
  const auto it = templates_.find(std::string(role_tag));
  if (it == templates_.end()) {
    throw FormatError("no prompt template for role_tag '" +
                      std::string(role_tag) + "'");
  }
  return it->second;
}

void PromptLibrary::set(const std::string& role_tag, PromptTemplate tmpl) {
  templates_[role_tag] = std::move(tmpl);
}

namespace {

std::string strip_outer_newlines(std::string text) {
  while (!text.empty() && (text.front() == '\n' || text.front() == '\r')) {
    text.erase(text.begin());
  }
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  return text;
}

}  // namespace

std::vector<std::string> PromptLibrary::load_overrides(
    const std::filesystem::path& dir) {
  std::vector<std::string> overridden;
  if (!std::filesystem::is_directory(dir)) {
    return overridden;
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
      continue;
    }
    const auto role = entry.path().stem().string();
    const auto content = detail::read_text_file(entry.path());

    PromptTemplate tmpl;
    if (templates_.contains(role)) {
      tmpl.system_text = templates_[role].system_text;
    }
    const auto system_pos = content.find("SYSTEM:");
    const auto user_pos = content.find("USER:");
    if (system_pos != std::string::npos && user_pos != std::string::npos &&
        system_pos < user_pos) {
      tmpl.system_text = strip_outer_newlines(
          content.substr(system_pos + 7, user_pos - system_pos - 7));
      tmpl.user_text = strip_outer_newlines(content.substr(user_pos + 5));
    } else {
      tmpl.user_text = content;
    }
    templates_[role] = std::move(tmpl);
    overridden.push_back(role);
  }
  std::sort(overridden.begin(), overridden.end());
  return overridden;
}

std::vector<std::string> PromptLibrary::role_tags() const {
  std::vector<std::string> tags;
  tags.reserve(templates_.size());
  for (const auto& [tag, tmpl] : templates_) {
    tags.push_back(tag);
  }
  return tags;
}

}  // namespace storygen
