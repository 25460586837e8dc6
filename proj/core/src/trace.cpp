#include "storygen/trace.hpp"

#include "json_io.hpp"
#include "serialize.hpp"

namespace storygen {

void RunTrace::append(TraceEvent event) { events_.push_back(std::move(event)); }

std::vector<TraceEvent> RunTrace::of_kind(std::string_view kind) const {
  std::vector<TraceEvent> out;
  for (const auto& event : events_) {
    if (event.kind == kind) {
      out.push_back(event);
    }
  }
  return out;
}

void RunTrace::stage(int round, std::string_view from, std::string_view to) {
  TraceEvent event;
  event.kind = "stage";
  event.round = round;
  event.text["from"] = std::string(from);
  event.text["to"] = std::string(to);
  append(std::move(event));
}

void RunTrace::call(int round, const CallLogEntry& entry) {
  TraceEvent event;
  event.kind = "call";
  event.round = round;
  event.text["role_tag"] = entry.role_tag;
  event.text["request_digest"] = entry.request_digest;
  event.text["response_digest"] = entry.response_digest;
  event.text["ok"] = entry.ok ? "true" : "false";
  if (!entry.ok) {
    event.text["error"] = entry.error;
  }
  append(std::move(event));
}

void RunTrace::gate(int round, const GateDecision& decision) {
  TraceEvent event;
  event.kind = "gate";
  event.round = round;
  event.number["score"] = decision.score;
  event.number["threshold"] = decision.threshold;
  event.text["twist"] = decision.twist ? "true" : "false";
  append(std::move(event));
}

void RunTrace::warning(int round, std::string_view source,
                       std::string_view message) {
  TraceEvent event;
  event.kind = "warning";
  event.round = round;
  event.text["source"] = std::string(source);
  event.text["message"] = std::string(message);
  append(std::move(event));
}

void RunTrace::kg_repair(int round, std::string_view action,
                         std::string_view detail) {
  TraceEvent event;
  event.kind = "kg_repair";
  event.round = round;
  event.text["action"] = std::string(action);
  event.text["detail"] = std::string(detail);
  append(std::move(event));
}

void RunTrace::kg_mutation(int round, std::string_view op,
                           std::size_t before_nodes, std::size_t after_nodes) {
  TraceEvent event;
  event.kind = "kg_mutation";
  event.round = round;
  event.text["op"] = std::string(op);
  event.number["before_nodes"] = static_cast<double>(before_nodes);
  event.number["after_nodes"] = static_cast<double>(after_nodes);
  append(std::move(event));
}

void RunTrace::word_count(int round, std::size_t round_words,
                          std::size_t total_words) {
  TraceEvent event;
  event.kind = "word_count";
  event.round = round;
  event.number["round_words"] = static_cast<double>(round_words);
  event.number["total_words"] = static_cast<double>(total_words);
  append(std::move(event));
}

void save_trace(const RunTrace& trace, const std::filesystem::path& file) {
  auto events = nlohmann::json::array();
  for (const auto& event : trace.events()) {
    events.push_back(detail::to_json(event));
  }
  detail::write_json_atomic(file, {{"events", events}});
}

RunTrace load_trace(const std::filesystem::path& file) {
  RunTrace trace;
  const auto parsed = detail::read_json_file(file);
  for (const auto& event : detail::require(parsed, "events")) {
    trace.append(detail::event_from_json(event));
  }
  return trace;
}

}  // namespace storygen
