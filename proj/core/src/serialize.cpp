#include "serialize.hpp"

#include "storygen/agents.hpp"
#include "storygen/errors.hpp"

namespace storygen::detail {

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(std::string("missing key: ") + key);
  }
  return obj.at(key);
}

nlohmann::json to_json(const CharacterSpec& value) {
  return {{"name", value.name}, {"description", value.description}};
}

CharacterSpec character_from_json(const nlohmann::json& j) {
  return {require(j, "name").get<std::string>(),
          require(j, "description").get<std::string>()};
}

nlohmann::json to_json(const StorySettings& value) {
  auto characters = nlohmann::json::array();
  for (const auto& c : value.characters) {
    characters.push_back(to_json(c));
  }
  return {{"topic", value.topic},
          {"language", value.language},
          {"characters", characters},
          {"main_goal", value.main_goal},
          {"first_outline", value.first_outline}};
}

StorySettings settings_from_json(const nlohmann::json& j) {
  StorySettings out;
  out.topic = require(j, "topic").get<std::string>();
  out.language = require(j, "language").get<std::string>();
  for (const auto& c : require(j, "characters")) {
    out.characters.push_back(character_from_json(c));
  }
  out.main_goal = require(j, "main_goal").get<std::string>();
  out.first_outline = require(j, "first_outline").get<std::string>();
  return out;
}

nlohmann::json to_json(const Outline& value) {
  return {{"round_index", value.round_index},
          {"text", value.text},
          {"origin", std::string(to_string(value.origin))}};
}

Outline outline_from_json(const nlohmann::json& j) {
  Outline out;
  out.round_index = require(j, "round_index").get<int>();
  out.text = require(j, "text").get<std::string>();
  out.origin =
      outline_origin_from_string(require(j, "origin").get<std::string>());
  return out;
}

nlohmann::json to_json(const DialogueTranscript& value) {
  auto rounds = nlohmann::json::array();
  for (const auto& r : value.rounds) {
    rounds.push_back({{"writer_draft", r.writer_draft},
                      {"reader_feedback", r.reader_feedback}});
  }
  return {{"rounds", rounds}, {"final_text", value.final_text}};
}

DialogueTranscript transcript_from_json(const nlohmann::json& j) {
  DialogueTranscript out;
  for (const auto& r : require(j, "rounds")) {
    out.rounds.push_back(
        {require(r, "writer_draft").get<std::string>(),
         require(r, "reader_feedback").get<std::string>()});
  }
  out.final_text = require(j, "final_text").get<std::string>();
  return out;
}

nlohmann::json to_json(const StorySegment& value) {
  return {{"round_index", value.round_index},
          {"text", value.text},
          {"word_count", value.word_count},
          {"transcript", to_json(value.transcript)}};
}

StorySegment segment_from_json(const nlohmann::json& j) {
  StorySegment out;
  out.round_index = require(j, "round_index").get<int>();
  out.text = require(j, "text").get<std::string>();
  out.word_count = require(j, "word_count").get<std::size_t>();
  out.transcript = transcript_from_json(require(j, "transcript"));
  return out;
}

nlohmann::json to_json(const LongTermEntry& value) {
  return {{"kind", to_string(value.kind)},
          {"round", value.round},
          {"text", value.text}};
}

LongTermEntry entry_from_json(const nlohmann::json& j) {
  LongTermEntry out;
  out.kind = entry_kind_from_string(require(j, "kind").get<std::string>());
  out.round = require(j, "round").get<int>();
  out.text = require(j, "text").get<std::string>();
  return out;
}

nlohmann::json to_json(const KnowledgeGraph& value) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : value.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"label", n.label},
                     {"is_goal", n.is_goal},
                     {"is_obstacle", n.is_obstacle}});
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : value.edges()) {
    edges.push_back({{"source", e.source},
                     {"relation", e.relation},
                     {"target", e.target}});
  }
  return {{"goal_id", value.goal_id()}, {"nodes", nodes}, {"edges", edges}};
}

KnowledgeGraph graph_from_json(const nlohmann::json& j) {
  KnowledgeGraph out;
  for (const auto& n : require(j, "nodes")) {
    const auto id = out.add_node(require(n, "label").get<std::string>(),
                                 require(n, "is_goal").get<bool>(),
                                 require(n, "is_obstacle").get<bool>());
    if (id != require(n, "id").get<std::string>()) {
      throw FormatError("graph node id does not match its label: " + id);
    }
  }
  for (const auto& e : require(j, "edges")) {
    out.add_edge(require(e, "source").get<std::string>(),
                 require(e, "relation").get<std::string>(),
                 require(e, "target").get<std::string>());
  }
  const auto goal = require(j, "goal_id").get<std::string>();
  if (!goal.empty()) {
    out.set_goal(goal);
  }
  return out;
}

nlohmann::json to_json(const TraceEvent& value) {
  return {{"kind", value.kind},
          {"round", value.round},
          {"text", value.text},
          {"number", value.number}};
}

TraceEvent event_from_json(const nlohmann::json& j) {
  TraceEvent out;
  out.kind = require(j, "kind").get<std::string>();
  out.round = require(j, "round").get<int>();
  out.text = require(j, "text").get<std::map<std::string, std::string>>();
  out.number = require(j, "number").get<std::map<std::string, double>>();
  return out;
}

nlohmann::json to_json(const HttpBackendConfig& value) {
  return {{"endpoint", value.endpoint},
          {"model", value.model},
          {"wire_format", to_string(value.wire_format)},
          {"api_key_env", value.api_key_env},
          {"max_retries", value.max_retries},
          {"backoff_base_ms", value.backoff_base_ms},
          {"timeout_seconds", value.timeout_seconds}};
}

HttpBackendConfig http_config_from_json(const nlohmann::json& j) {
  HttpBackendConfig out;
  out.endpoint = require(j, "endpoint").get<std::string>();
  out.model = require(j, "model").get<std::string>();
  out.wire_format =
      wire_format_from_string(require(j, "wire_format").get<std::string>());
  out.api_key_env = require(j, "api_key_env").get<std::string>();
  out.max_retries = require(j, "max_retries").get<int>();
  out.backoff_base_ms = require(j, "backoff_base_ms").get<int>();
  out.timeout_seconds = require(j, "timeout_seconds").get<int>();
  return out;
}

nlohmann::json to_json(const BackendSettings& value) {
  return {{"kind", value.kind},
          {"script_path", value.script_path.string()},
          {"http", to_json(value.http)}};
}

BackendSettings backend_settings_from_json(const nlohmann::json& j) {
  BackendSettings out;
  out.kind = require(j, "kind").get<std::string>();
  out.script_path = require(j, "script_path").get<std::string>();
  out.http = http_config_from_json(require(j, "http"));
  return out;
}

nlohmann::json to_json(const RunConfig& value) {
  return {{"topic", value.topic},
          {"language", value.language},
          {"target_words", value.target_words},
          {"similarity_threshold", value.similarity_threshold},
          {"invert_gate", value.invert_gate},
          {"dialogue_rounds", value.dialogue_rounds},
          {"extraction_mode", to_string(value.extraction_mode)},
          {"disable_twist", value.disable_twist},
          {"single_agent_expander", value.single_agent_expander},
          {"context_budget", value.context_budget},
          {"stall_limit", value.stall_limit},
          {"stop_after_round", value.stop_after_round},
          {"backend", to_json(value.backend)},
          {"out_dir", value.out_dir.string()},
          {"prompt_dir", value.prompt_dir.string()}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig out;
  out.topic = require(j, "topic").get<std::string>();
  out.language = require(j, "language").get<std::string>();
  out.target_words = require(j, "target_words").get<std::size_t>();
  out.similarity_threshold = require(j, "similarity_threshold").get<double>();
  out.invert_gate = require(j, "invert_gate").get<bool>();
  out.dialogue_rounds = require(j, "dialogue_rounds").get<int>();
  out.extraction_mode =
      extraction_mode_from_string(require(j, "extraction_mode").get<std::string>());
  out.disable_twist = require(j, "disable_twist").get<bool>();
  out.single_agent_expander =
      require(j, "single_agent_expander").get<bool>();
  out.context_budget = require(j, "context_budget").get<std::size_t>();
  out.stall_limit = require(j, "stall_limit").get<int>();
  out.stop_after_round = require(j, "stop_after_round").get<int>();
  out.backend = backend_settings_from_json(require(j, "backend"));
  out.out_dir = require(j, "out_dir").get<std::string>();
  out.prompt_dir = require(j, "prompt_dir").get<std::string>();
  return out;
}

nlohmann::json to_json(const JudgeVerdict& value) {
  auto metrics = nlohmann::json::object();
  for (const auto& [name, winner] : value.metrics) {
    metrics[name] = to_string(winner);
  }
  return {{"metrics", metrics},
          {"overall", to_string(value.overall)},
          {"rationale", value.rationale},
          {"warnings", value.warnings}};
}

JudgeVerdict verdict_from_json(const nlohmann::json& j) {
  JudgeVerdict out;
  for (const auto& [name, winner] : require(j, "metrics").items()) {
    out.metrics[name] = winner_from_string(winner.get<std::string>());
  }
  out.overall = winner_from_string(require(j, "overall").get<std::string>());
  out.rationale = require(j, "rationale").get<std::string>();
  out.warnings = require(j, "warnings").get<std::vector<std::string>>();
  return out;
}

namespace {

nlohmann::json cell_to_json(const TallyCell& cell, int total) {
  const double denom = total > 0 ? static_cast<double>(total) : 1.0;
  return {{"a", cell.a},
          {"b", cell.b},
          {"both", cell.both},
          {"neither", cell.neither},
          {"pct_a", 100.0 * (cell.a + cell.both) / denom},
          {"pct_b", 100.0 * (cell.b + cell.both) / denom}};
}

}  // namespace

nlohmann::json to_json(const Tally& value) {
  auto per_metric = nlohmann::json::object();
  for (const auto& [name, cell] : value.per_metric) {
    per_metric[name] = cell_to_json(cell, value.total);
  }
  return {{"per_metric", per_metric},
          {"overall", cell_to_json(value.overall, value.total)},
          {"total", value.total}};
}

}  // namespace storygen::detail
