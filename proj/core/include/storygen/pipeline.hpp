#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storygen/agents.hpp"
#include "storygen/http_backend.hpp"
#include "storygen/knowledge_graph.hpp"
#include "storygen/memory.hpp"
#include "storygen/story.hpp"
#include "storygen/trace.hpp"

namespace storygen {

enum class Stage {
  Starter,
  OutlineWriting,
  Expanding,
  LengthCheck,
  Ending,
  Done,
};

std::string to_string(Stage stage);
Stage stage_from_string(std::string_view text);

/// Legal stage graph: Starter -> OutlineWriting -> Expanding -> LengthCheck,
/// then back to OutlineWriting or on to Ending -> Done.
bool valid_transition(Stage from, Stage to);

struct BackendSettings {
  /// "mock" or "http".
  std::string kind = "mock";
  std::filesystem::path script_path;
  HttpBackendConfig http;
};

struct RunConfig {
  std::string topic;
  std::string language = "English";
  std::size_t target_words = 10000;
  double similarity_threshold = 0.7;
  /// Default gate fires a twist when outlines are too similar
  /// (score > threshold); inverted it fires when they diverge.
  bool invert_gate = false;
  int dialogue_rounds = 1;
  ExtractionMode extraction_mode = ExtractionMode::ThreeAgent;
  bool disable_twist = false;
  bool single_agent_expander = false;
  std::size_t context_budget = 6000;
  /// Consecutive zero-word rounds tolerated before the run aborts.
  int stall_limit = 3;
  /// Stop cleanly after this round's length check commits; 0 runs to the end.
  int stop_after_round = 0;
  BackendSettings backend;
  std::filesystem::path out_dir;
  /// Optional prompt override directory; see PromptLibrary::load_overrides.
  std::filesystem::path prompt_dir;
};

/// Full pipeline state. Persisted artifacts mirror this struct; the
/// checkpoint records (stage, round) as the NEXT unit of work, so everything
/// on disk belongs to committed stages only.
struct RunState {
  RunConfig config;
  Stage stage = Stage::Starter;
  int round = 0;
  StorySettings settings;
  MemoryStore memory;
  std::vector<Outline> outlines;
  std::vector<StorySegment> segments;
  std::optional<std::string> ending;
  std::map<int, KnowledgeGraph> kg_by_round;
  RunTrace trace;
  /// Per role_tag, successful backend calls committed so far. Lets a mock
  /// script fast-forward to the right position on resume.
  std::map<std::string, int> script_cursors;
  int zero_progress_rounds = 0;

  std::size_t body_words() const;
};

/// Run-directory layout.
namespace run_paths {
std::filesystem::path settings(const std::filesystem::path& dir);
std::filesystem::path outline(const std::filesystem::path& dir, int round);
std::filesystem::path segment(const std::filesystem::path& dir, int round);
std::filesystem::path memory_dir(const std::filesystem::path& dir);
std::filesystem::path kg(const std::filesystem::path& dir, int round);
std::filesystem::path trace(const std::filesystem::path& dir);
std::filesystem::path checkpoint(const std::filesystem::path& dir);
std::filesystem::path story(const std::filesystem::path& dir);
}  // namespace run_paths

void save_outline(const Outline& outline, const std::filesystem::path& file);
Outline load_outline(const std::filesystem::path& file);
void save_segment(const StorySegment& segment,
                  const std::filesystem::path& file);
StorySegment load_segment(const std::filesystem::path& file);

/// Serializes checkpoint.json plus every artifact the state owns. Writes are
/// atomic per file (temp + rename).
void write_checkpoint(const RunState& state);

/// Rebuilds a RunState from a run directory. Throws CorruptCheckpoint when a
/// file the checkpoint implies is missing or inconsistent.
RunState load_checkpoint(const std::filesystem::path& dir);

/// The assembled story: "# topic", the round segments, then the ending.
/// Requires state.ending.
std::string compose_story(const RunState& state);

std::unique_ptr<Backend> make_backend(const BackendSettings& settings);

/// Runs a fresh story generation. Returns with stage Done, or earlier when
/// config.stop_after_round is set. The out directory must not already hold a
/// checkpoint (AlreadyInitialized).
RunState run_pipeline(const RunConfig& config, Backend& backend);

/// Continues a checkpointed run until Done, or until stop_after_round when
/// nonzero. The stored stop_after_round is replaced by the argument, so a
/// resumed run does not re-trigger the stop that paused it.
RunState resume_pipeline(const std::filesystem::path& dir, Backend& backend,
                         int stop_after_round = 0);

}  // namespace storygen
