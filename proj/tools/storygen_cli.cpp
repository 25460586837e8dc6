#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "storygen/errors.hpp"
#include "storygen/eval.hpp"
#include "storygen/pipeline.hpp"
#include "storygen/prompts.hpp"
#include "storygen/runtime.hpp"

namespace {

namespace fs = std::filesystem;
using namespace storygen;

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + file.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

struct BackendFlags {
  std::string kind = "mock";
  std::string script;
  std::string endpoint;
  std::string model;
  std::string wire = "openai";
  std::string api_key_env;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "Backend kind: mock or http")
        ->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--script", script,
                    "Response script for the mock backend (JSON array)");
    cmd->add_option("--endpoint", endpoint, "HTTP chat-completions endpoint");
    cmd->add_option("--model", model, "Model name for the HTTP backend");
    cmd->add_option("--wire-format", wire,
                    "HTTP request shape: openai or anthropic")
        ->check(CLI::IsMember({"openai", "anthropic"}));
    cmd->add_option("--api-key-env", api_key_env,
                    "Environment variable holding the API key");
  }

  BackendSettings to_settings() const {
    BackendSettings settings;
    settings.kind = kind;
    settings.script_path = script;
    if (!endpoint.empty()) {
      settings.http.endpoint = endpoint;
    }
    if (!model.empty()) {
      settings.http.model = model;
    }
    settings.http.wire_format = wire_format_from_string(wire);
    if (!api_key_env.empty()) {
      settings.http.api_key_env = api_key_env;
    }
    return settings;
  }
};

int run_generate(const RunConfig& config) {
  const auto backend = make_backend(config.backend);
  const auto state = run_pipeline(config, *backend);
  std::cout << "run directory: " << config.out_dir.string() << "\n"
            << "rounds: " << state.round << "\n"
            << "body words: " << state.body_words() << "\n";
  if (state.stage == Stage::Done) {
    std::cout << "story: " << run_paths::story(config.out_dir).string()
              << "\n";
  } else {
    std::cout << "paused at stage: " << to_string(state.stage) << "\n";
  }
  return 0;
}

int run_resume(const fs::path& dir, const std::string& script_override) {
  auto state = load_checkpoint(dir);
  if (!script_override.empty()) {
    state.config.backend.script_path = script_override;
    write_checkpoint(state);
  }
  const auto backend = make_backend(state.config.backend);
  const auto resumed = resume_pipeline(dir, *backend);
  std::cout << "run directory: " << dir.string() << "\n"
            << "rounds: " << resumed.round << "\n"
            << "body words: " << resumed.body_words() << "\n";
  if (resumed.stage == Stage::Done) {
    std::cout << "story: " << run_paths::story(dir).string() << "\n";
  }
  return 0;
}

int run_judge(const fs::path& a, const fs::path& b, const fs::path& settings,
              bool debias, const fs::path& out_dir,
              const BackendFlags& flags) {
  const auto backend = make_backend(flags.to_settings());
  PromptLibrary prompts;
  AgentRuntime rt;
  rt.backend = backend.get();
  rt.prompts = &prompts;

  StoryPair pair;
  pair.settings = load_story_settings(settings);
  pair.story_a = read_file(a);
  pair.story_b = read_file(b);
  pair.provenance_a = a.string();
  pair.provenance_b = b.string();
  const auto verdict =
      debias ? judge_pair_debiased(rt, pair) : judge_pair(rt, pair);

  fs::create_directories(out_dir);
  const auto verdicts_path = out_dir / "verdicts.jsonl";

  std::vector<JudgeVerdict> all;
  if (fs::exists(verdicts_path)) {
    std::ifstream in(verdicts_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) {
        all.push_back(parse_verdict(line));
      }
    }
  }
  all.push_back(verdict);

  {
    std::ofstream out(verdicts_path, std::ios::app);
    out << serialize_verdict(verdict) << "\n";
  }
  const auto tally = tally_verdicts(all);
  const auto tally_text = serialize_tally(tally);
  std::ofstream(out_dir / "tally.json") << tally_text;

  std::cout << tally_text;
  for (const auto& warning : verdict.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return 0;
}

int run_score(const fs::path& story, const BackendFlags& flags) {
  const auto backend = make_backend(flags.to_settings());
  PromptLibrary prompts;
  AgentRuntime rt;
  rt.backend = backend.get();
  rt.prompts = &prompts;

  const auto score = score_story(rt, read_file(story));
  std::cout << score << "\n";
  return 0;
}

int run_questionnaire(const fs::path& a, const fs::path& b,
                      const fs::path& settings, const fs::path& out) {
  StoryPair pair;
  pair.settings = load_story_settings(settings);
  pair.story_a = read_file(a);
  pair.story_b = read_file(b);
  const auto doc = emit_questionnaire(pair);
  fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  std::ofstream(out) << doc;
  std::cout << "questionnaire: " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent long story generation"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a story");
  RunConfig config;
  std::string kg_mode = "three";
  BackendFlags generate_backend;
  generate->add_option("--topic", config.topic, "Story topic")->required();
  generate->add_option("--language", config.language, "Story language");
  generate->add_option("--target-words", config.target_words,
                       "Stop expanding once the body reaches this many words");
  generate->add_option("--threshold", config.similarity_threshold,
                       "Similarity gate threshold, strictly between 0 and 1");
  generate->add_flag("--invert-gate", config.invert_gate,
                     "Fire the twist when outlines diverge instead");
  generate->add_option("--rounds", config.dialogue_rounds,
                       "Writer/reader dialogue rounds per segment");
  generate->add_option("--kg-mode", kg_mode, "Twist graph mode")
      ->check(CLI::IsMember({"three", "single"}));
  generate->add_flag("--disable-twist", config.disable_twist,
                     "Always write plain outlines");
  generate->add_flag("--single-agent-expander", config.single_agent_expander,
                     "Expand with the writer alone, no reader feedback");
  generate->add_option("--context-budget", config.context_budget,
                       "Character budget for memory context blocks");
  generate->add_option("--out", config.out_dir, "Run directory")->required();
  generate->add_option("--prompts", config.prompt_dir,
                       "Directory of prompt override files");
  generate_backend.attach(generate);

  // resume
  auto* resume = app.add_subcommand("resume", "Continue a checkpointed run");
  fs::path resume_dir;
  std::string resume_script;
  resume->add_option("--dir", resume_dir, "Run directory")->required();
  resume->add_option("--script", resume_script,
                     "Replace the stored mock script path");

  // judge
  auto* judge = app.add_subcommand("judge", "Compare two stories");
  fs::path judge_a;
  fs::path judge_b;
  fs::path judge_settings;
  fs::path judge_out = ".";
  bool debias = false;
  BackendFlags judge_backend;
  judge->add_option("--a", judge_a, "Story A file")->required();
  judge->add_option("--b", judge_b, "Story B file")->required();
  judge->add_option("--settings", judge_settings, "settings.json of the run")
      ->required();
  judge->add_flag("--debias", debias,
                  "Judge twice with positions swapped and merge");
  judge->add_option("--out", judge_out,
                    "Directory for verdicts.jsonl and tally.json");
  judge_backend.attach(judge);

  // score
  auto* score = app.add_subcommand("score", "Score one story from 0 to 10");
  fs::path score_story;
  BackendFlags score_backend;
  score->add_option("--story", score_story, "Story file")->required();
  score_backend.attach(score);

  // questionnaire
  auto* questionnaire =
      app.add_subcommand("questionnaire", "Build a human evaluation sheet");
  fs::path q_a;
  fs::path q_b;
  fs::path q_settings;
  fs::path q_out;
  questionnaire->add_option("--a", q_a, "Story A file")->required();
  questionnaire->add_option("--b", q_b, "Story B file")->required();
  questionnaire->add_option("--settings", q_settings, "settings.json")
      ->required();
  questionnaire->add_option("--out", q_out, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      config.extraction_mode = extraction_mode_from_string(kg_mode);
      config.backend = generate_backend.to_settings();
      return run_generate(config);
    }
    if (resume->parsed()) {
      return run_resume(resume_dir, resume_script);
    }
    if (judge->parsed()) {
      return run_judge(judge_a, judge_b, judge_settings, debias, judge_out,
                       judge_backend);
    }
    if (score->parsed()) {
      return run_score(score_story, score_backend);
    }
    if (questionnaire->parsed()) {
      return run_questionnaire(q_a, q_b, q_settings, q_out);
    }
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
