#include "storygen/pipeline.hpp"

#include <stdexcept>

#include "json_io.hpp"
#include "serialize.hpp"
#include "storygen/errors.hpp"
#include "storygen/prompts.hpp"
#include "storygen/runtime.hpp"
#include "storygen/scripted_backend.hpp"
#include "storygen/similarity.hpp"

namespace storygen {

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Starter:
      return "starter";
    case Stage::OutlineWriting:
      return "outline_writing";
    case Stage::Expanding:
      return "expanding";
    case Stage::LengthCheck:
      return "length_check";
    case Stage::Ending:
      return "ending";
    case Stage::Done:
      return "done";
  }
  return "done";
}

Stage stage_from_string(std::string_view text) {
  if (text == "starter") return Stage::Starter;
  if (text == "outline_writing") return Stage::OutlineWriting;
  if (text == "expanding") return Stage::Expanding;
  if (text == "length_check") return Stage::LengthCheck;
  if (text == "ending") return Stage::Ending;
  if (text == "done") return Stage::Done;
  throw FormatError("unknown stage: " + std::string(text));
}

bool valid_transition(Stage from, Stage to) {
  switch (from) {
    case Stage::Starter:
      return to == Stage::OutlineWriting;
    case Stage::OutlineWriting:
      return to == Stage::Expanding;
    case Stage::Expanding:
      return to == Stage::LengthCheck;
    case Stage::LengthCheck:
      return to == Stage::OutlineWriting || to == Stage::Ending;
    case Stage::Ending:
      return to == Stage::Done;
    case Stage::Done:
      return false;
  }
  return false;
}

std::size_t RunState::body_words() const {
  std::size_t total = 0;
  for (const auto& segment : segments) {
    total += segment.word_count;
  }
  return total;
}

namespace run_paths {

std::filesystem::path settings(const std::filesystem::path& dir) {
  return dir / "settings.json";
}
std::filesystem::path outline(const std::filesystem::path& dir, int round) {
  return dir / "outlines" / ("round_" + std::to_string(round) + ".json");
}
std::filesystem::path segment(const std::filesystem::path& dir, int round) {
  return dir / "segments" / ("round_" + std::to_string(round) + ".json");
}
std::filesystem::path memory_dir(const std::filesystem::path& dir) {
  return dir / "memory";
}
std::filesystem::path kg(const std::filesystem::path& dir, int round) {
  return dir / "kg" / ("round_" + std::to_string(round) + ".json");
}
std::filesystem::path trace(const std::filesystem::path& dir) {
  return dir / "trace.json";
}
std::filesystem::path checkpoint(const std::filesystem::path& dir) {
  return dir / "checkpoint.json";
}
std::filesystem::path story(const std::filesystem::path& dir) {
  return dir / "story.md";
}

}  // namespace run_paths

void save_outline(const Outline& outline, const std::filesystem::path& file) {
  detail::write_json_atomic(file, detail::to_json(outline));
}

Outline load_outline(const std::filesystem::path& file) {
  return detail::outline_from_json(detail::read_json_file(file));
}

void save_segment(const StorySegment& segment,
                  const std::filesystem::path& file) {
  detail::write_json_atomic(file, detail::to_json(segment));
}

StorySegment load_segment(const std::filesystem::path& file) {
  return detail::segment_from_json(detail::read_json_file(file));
}

void write_checkpoint(const RunState& state) {
  const auto& dir = state.config.out_dir;
  std::filesystem::create_directories(dir);

  if (!state.settings.main_goal.empty()) {
    save_story_settings(state.settings, run_paths::settings(dir));
  }
  for (const auto& outline : state.outlines) {
    save_outline(outline, run_paths::outline(dir, outline.round_index));
  }
  for (const auto& segment : state.segments) {
    save_segment(segment, run_paths::segment(dir, segment.round_index));
  }
  if (!state.memory.long_term.entries().empty()) {
    std::filesystem::create_directories(run_paths::memory_dir(dir));
    save_memory(state.memory, run_paths::memory_dir(dir));
  }
  for (const auto& [round, graph] : state.kg_by_round) {
    save_graph(graph, run_paths::kg(dir, round));
  }
  save_trace(state.trace, run_paths::trace(dir));

  nlohmann::json cp = {
      {"format_version", 1},
      {"stage", to_string(state.stage)},
      {"round", state.round},
      {"zero_progress_rounds", state.zero_progress_rounds},
      {"script_cursors", state.script_cursors},
      {"ending",
       state.ending.has_value() ? nlohmann::json(*state.ending)
                                : nlohmann::json(nullptr)},
      {"config", detail::to_json(state.config)},
  };
  detail::write_json_atomic(run_paths::checkpoint(dir), cp);
}

namespace {

struct ArtifactRange {
  int outline_max;  // outlines 0..outline_max exist; -1 for none
  int segment_max;  // segments 1..segment_max exist
};

ArtifactRange expected_artifacts(Stage stage, int round) {
  switch (stage) {
    case Stage::OutlineWriting:
      return {round - 1, round - 1};
    case Stage::Expanding:
      return {round, round - 1};
    case Stage::LengthCheck:
    case Stage::Ending:
    case Stage::Done:
      return {round, round};
    case Stage::Starter:
      break;
  }
  return {-1, 0};
}

}  // namespace

RunState load_checkpoint(const std::filesystem::path& dir) {
  RunState state;
  try {
    const auto cp = detail::read_json_file(run_paths::checkpoint(dir));
    state.config = detail::run_config_from_json(detail::require(cp, "config"));
    state.stage =
        stage_from_string(detail::require(cp, "stage").get<std::string>());
    state.round = detail::require(cp, "round").get<int>();
    state.zero_progress_rounds =
        detail::require(cp, "zero_progress_rounds").get<int>();
    state.script_cursors = detail::require(cp, "script_cursors")
                               .get<std::map<std::string, int>>();
    if (const auto& ending = detail::require(cp, "ending"); !ending.is_null()) {
      state.ending = ending.get<std::string>();
    }
  } catch (const FormatError& ex) {
    throw CorruptCheckpoint(std::string("unreadable checkpoint: ") + ex.what());
  }

  if (state.stage == Stage::Starter) {
    throw CorruptCheckpoint("checkpoint precedes the first committed stage");
  }
  if (state.stage == Stage::Done && !state.ending.has_value()) {
    throw CorruptCheckpoint("run is marked done but has no ending");
  }
  state.config.out_dir = dir;

  const auto range = expected_artifacts(state.stage, state.round);
  try {
    state.settings = load_story_settings(run_paths::settings(dir));
    for (int k = 0; k <= range.outline_max; ++k) {
      auto outline = load_outline(run_paths::outline(dir, k));
      if (outline.round_index != k) {
        throw FormatError("outline file for round " + std::to_string(k) +
                          " holds round " +
                          std::to_string(outline.round_index));
      }
      state.outlines.push_back(std::move(outline));
    }
    for (int k = 1; k <= range.segment_max; ++k) {
      auto segment = load_segment(run_paths::segment(dir, k));
      if (segment.round_index != k) {
        throw FormatError("segment file for round " + std::to_string(k) +
                          " holds round " +
                          std::to_string(segment.round_index));
      }
      state.segments.push_back(std::move(segment));
    }
    state.memory = load_memory(run_paths::memory_dir(dir));
    for (const auto& outline : state.outlines) {
      if (outline.origin == OutlineOrigin::Twist) {
        state.kg_by_round[outline.round_index] =
            load_graph(run_paths::kg(dir, outline.round_index));
      }
    }
    state.trace = load_trace(run_paths::trace(dir));
  } catch (const FormatError& ex) {
    throw CorruptCheckpoint(std::string("inconsistent run directory: ") +
                            ex.what());
  }
  return state;
}

std::string compose_story(const RunState& state) {
  if (!state.ending.has_value()) {
    throw std::logic_error("cannot compose a story without an ending");
  }
  std::string out = "# " + state.settings.topic + "\n";
  for (const auto& segment : state.segments) {
    out += "\n" + segment.text + "\n";
  }
  out += "\n" + *state.ending + "\n";
  return out;
}

std::unique_ptr<Backend> make_backend(const BackendSettings& settings) {
  if (settings.kind == "mock") {
    if (settings.script_path.empty()) {
      throw FormatError("mock backend needs a script file");
    }
    return std::make_unique<ScriptedBackend>(load_script(settings.script_path));
  }
  if (settings.kind == "http") {
    return std::make_unique<HttpBackend>(settings.http);
  }
  throw FormatError("unknown backend kind: " + settings.kind);
}

namespace {

void validate_config(const RunConfig& config) {
  if (config.topic.empty()) {
    throw EmptyInput("topic must not be empty");
  }
  if (config.language.empty()) {
    throw std::invalid_argument("language must not be empty");
  }
  if (config.out_dir.empty()) {
    throw std::invalid_argument("out_dir must not be empty");
  }
  if (config.target_words == 0) {
    throw std::invalid_argument("target_words must be positive");
  }
  if (config.similarity_threshold <= 0.0 ||
      config.similarity_threshold >= 1.0) {
    throw std::invalid_argument(
        "similarity_threshold must lie strictly between 0 and 1");
  }
  if (config.dialogue_rounds < 1) {
    throw std::invalid_argument("dialogue_rounds must be at least 1");
  }
  if (config.stall_limit < 1) {
    throw std::invalid_argument("stall_limit must be at least 1");
  }
  if (config.context_budget < 500) {
    throw std::invalid_argument("context_budget must be at least 500");
  }
}

/// Executes stages and owns the commit discipline: backend calls enter the
/// trace and the script cursors only when a stage transition commits, and
/// every commit persists the whole state. An exception mid-stage therefore
/// leaves the directory exactly at the previous commit, plus trace events
/// for the failed calls.
class Driver {
 public:
  Driver(RunState& state, Backend& backend, const PromptLibrary& prompts)
      : st_(state), backend_(backend), prompts_(prompts) {}

  void run_to_stop() {
    try {
      while (st_.stage != Stage::Done) {
        switch (st_.stage) {
          case Stage::Starter:
            do_starter();
            break;
          case Stage::OutlineWriting:
            do_outline();
            break;
          case Stage::Expanding:
            do_expand();
            break;
          case Stage::LengthCheck:
            if (do_length_check()) {
              return;
            }
            break;
          case Stage::Ending:
            do_ending();
            break;
          case Stage::Done:
            break;
        }
      }
    } catch (...) {
      flush_calls();
      write_checkpoint(st_);
      throw;
    }
  }

 private:
  AgentRuntime runtime(int round) {
    AgentRuntime rt;
    rt.backend = &backend_;
    rt.prompts = &prompts_;
    rt.context_budget = st_.config.context_budget;
    rt.trace = &st_.trace;
    rt.round = round;
    return rt;
  }

  void flush_calls() {
    const auto log = backend_.call_log();
    for (; trace_seen_ < log.size(); ++trace_seen_) {
      st_.trace.call(st_.round, log[trace_seen_]);
    }
  }

  void merge_cursors() {
    const auto log = backend_.call_log();
    for (; cursor_seen_ < log.size(); ++cursor_seen_) {
      if (log[cursor_seen_].ok) {
        ++st_.script_cursors[log[cursor_seen_].role_tag];
      }
    }
  }

  void commit(Stage next, int next_round) {
    if (!valid_transition(st_.stage, next)) {
      throw std::logic_error("illegal stage transition: " +
                             to_string(st_.stage) + " -> " + to_string(next));
    }
    flush_calls();
    merge_cursors();
    st_.trace.stage(next_round, to_string(st_.stage), to_string(next));
    st_.stage = next;
    st_.round = next_round;
    write_checkpoint(st_);
  }

  void do_starter() {
    auto rt = runtime(0);
    st_.settings = run_starter(rt, st_.config.topic, st_.config.language);
    st_.memory.seed_from_settings(st_.settings);

    Outline first;
    first.round_index = 0;
    first.text = st_.settings.first_outline;
    first.origin = OutlineOrigin::Starter;
    st_.outlines.push_back(first);
    st_.memory.add_outline(first);

    commit(Stage::OutlineWriting, 1);
  }

  void do_outline() {
    const int k = st_.round;
    auto rt = runtime(k);

    // Round 1 has a single outline in the window; the gate needs two.
    bool twist = false;
    if (k >= 2 && !st_.config.disable_twist) {
      const auto pair = st_.memory.short_term.last_two();
      const auto decision = decide_strategy(pair[1].text, pair[0].text,
                                            st_.config.similarity_threshold,
                                            st_.config.invert_gate);
      st_.trace.gate(k, decision);
      twist = decision.twist;
    }

    Outline outline;
    if (twist) {
      const auto base = extract_graph(rt, st_.memory, st_.settings.main_goal,
                                      st_.config.extraction_mode);
      auto augmented = generate_obstacle(rt, base);
      outline = write_twist_outline(rt, st_.memory, augmented.graph, k);
      st_.kg_by_round[k] = std::move(augmented.graph);
    } else {
      outline = write_plain_outline(rt, st_.memory, k);
    }

    st_.outlines.push_back(outline);
    st_.memory.add_outline(outline);
    commit(Stage::Expanding, k);
  }

  void do_expand() {
    const int k = st_.round;
    auto rt = runtime(k);
    auto segment =
        expand_with_dialogue(rt, st_.memory, st_.outlines.back(),
                             st_.config.dialogue_rounds,
                             st_.config.single_agent_expander);
    st_.segments.push_back(std::move(segment));
    commit(Stage::LengthCheck, k);
  }

  // Returns true when the run should pause after this round.
  bool do_length_check() {
    const int k = st_.round;
    const auto& segment = st_.segments.back();

    if (segment.word_count == 0) {
      ++st_.zero_progress_rounds;
    } else {
      st_.zero_progress_rounds = 0;
    }
    if (st_.zero_progress_rounds >= st_.config.stall_limit) {
      st_.trace.warning(k, "pipeline",
                        std::to_string(st_.zero_progress_rounds) +
                            " consecutive rounds added no words, aborting");
      throw PipelineStalled("no words added for " +
                            std::to_string(st_.zero_progress_rounds) +
                            " consecutive rounds");
    }

    auto rt = runtime(k);
    auto facts = summarize_round(rt, st_.outlines.back(), segment, k);
    for (auto& fact : facts) {
      st_.memory.long_term.append(std::move(fact));
    }

    flush_calls();
    const auto total = st_.body_words();
    st_.trace.word_count(k, segment.word_count, total);

    if (total >= st_.config.target_words) {
      commit(Stage::Ending, k);
    } else {
      commit(Stage::OutlineWriting, k + 1);
    }
    return st_.config.stop_after_round == k;
  }

  void do_ending() {
    const int k = st_.round;
    auto rt = runtime(k);

    std::string body;
    for (const auto& segment : st_.segments) {
      if (!body.empty()) {
        body += "\n\n";
      }
      body += segment.text;
    }
    const std::size_t tail = 4000;
    const auto recent =
        body.size() > tail ? body.substr(body.size() - tail) : body;

    st_.ending = run_ender(rt, st_.memory, recent);
    detail::write_file_atomic(run_paths::story(st_.config.out_dir),
                              compose_story(st_));
    commit(Stage::Done, k);
  }

  RunState& st_;
  Backend& backend_;
  const PromptLibrary& prompts_;
  std::size_t trace_seen_ = 0;
  std::size_t cursor_seen_ = 0;
};

PromptLibrary prompts_for(const RunConfig& config) {
  PromptLibrary prompts;
  if (!config.prompt_dir.empty()) {
    prompts.load_overrides(config.prompt_dir);
  }
  return prompts;
}

}  // namespace

RunState run_pipeline(const RunConfig& config, Backend& backend) {
  validate_config(config);
  if (std::filesystem::exists(run_paths::checkpoint(config.out_dir))) {
    throw AlreadyInitialized("run directory already holds a checkpoint: " +
                             config.out_dir.string());
  }
  std::filesystem::create_directories(config.out_dir);

  RunState state;
  state.config = config;
  const auto prompts = prompts_for(config);
  Driver driver(state, backend, prompts);
  driver.run_to_stop();
  return state;
}

RunState resume_pipeline(const std::filesystem::path& dir, Backend& backend,
                         int stop_after_round) {
  auto state = load_checkpoint(dir);
  state.config.stop_after_round = stop_after_round;

  if (auto* scripted = dynamic_cast<ScriptedBackend*>(&backend)) {
    scripted->fast_forward(state.script_cursors);
  }
  if (state.stage == Stage::Done) {
    return state;
  }

  const auto prompts = prompts_for(state.config);
  Driver driver(state, backend, prompts);
  driver.run_to_stop();
  return state;
}

}  // namespace storygen
