#pragma once

#include <json.hpp>

#include "storygen/eval.hpp"
#include "storygen/knowledge_graph.hpp"
#include "storygen/memory.hpp"
#include "storygen/pipeline.hpp"
#include "storygen/story.hpp"
#include "storygen/trace.hpp"

namespace storygen::detail {

/// obj.at(key) with a FormatError instead of nlohmann's exception, so load
/// failures name the offending key.
const nlohmann::json& require(const nlohmann::json& obj, const char* key);

nlohmann::json to_json(const CharacterSpec& value);
CharacterSpec character_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StorySettings& value);
StorySettings settings_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Outline& value);
Outline outline_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DialogueTranscript& value);
DialogueTranscript transcript_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StorySegment& value);
StorySegment segment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LongTermEntry& value);
LongTermEntry entry_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KnowledgeGraph& value);
KnowledgeGraph graph_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TraceEvent& value);
TraceEvent event_from_json(const nlohmann::json& j);

/// api_key is deliberately not serialized; run artifacts must never carry
/// credentials. The env-var name round-trips instead.
nlohmann::json to_json(const HttpBackendConfig& value);
HttpBackendConfig http_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BackendSettings& value);
BackendSettings backend_settings_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& value);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const JudgeVerdict& value);
JudgeVerdict verdict_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Tally& value);

}  // namespace storygen::detail
