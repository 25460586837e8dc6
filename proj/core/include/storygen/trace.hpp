#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "storygen/backend.hpp"
#include "storygen/similarity.hpp"

namespace storygen {

/// One run event. `kind` is one of "stage", "call", "gate", "warning",
/// "kg_repair", "kg_mutation", "word_count". String payloads live in `text`,
/// numeric ones in `number`, so serialization keeps real numbers as numbers.
struct TraceEvent {
  std::string kind;
  int round = -1;
  std::map<std::string, std::string> text;
  std::map<std::string, double> number;

  bool operator==(const TraceEvent&) const = default;
};

/// Ordered, append-only event log for a run. Persisted alongside the
/// checkpoint so an interrupted run keeps its history.
class RunTrace {
 public:
  void append(TraceEvent event);
  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> of_kind(std::string_view kind) const;

  void stage(int round, std::string_view from, std::string_view to);
  void call(int round, const CallLogEntry& entry);
  void gate(int round, const GateDecision& decision);
  void warning(int round, std::string_view source, std::string_view message);
  void kg_repair(int round, std::string_view action, std::string_view detail);
  void kg_mutation(int round, std::string_view op, std::size_t before_nodes,
                   std::size_t after_nodes);
  void word_count(int round, std::size_t round_words, std::size_t total_words);

 private:
  std::vector<TraceEvent> events_;
};

void save_trace(const RunTrace& trace, const std::filesystem::path& file);
RunTrace load_trace(const std::filesystem::path& file);

}  // namespace storygen
