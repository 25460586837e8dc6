#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "storygen/pipeline.hpp"
#include "storygen/scripted_backend.hpp"

namespace fs = std::filesystem;

namespace {

std::string counted_words(int n) {
  std::string out;
  for (int i = 1; i <= n; ++i) {
    if (!out.empty()) {
      out += ' ';
    }
    out += "word" + std::to_string(i);
  }
  return out;
}

/// Script for a run of `rounds` plain rounds at 60 words each.
std::vector<storygen::ScriptEntry> run_script(int rounds) {
  std::vector<storygen::ScriptEntry> script;
  script.push_back(
      {"starter",
       "CHARACTERS:\n- Mara: a stubborn lighthouse keeper\n"
       "- Tomas: her restless younger brother\n"
       "GOAL: keep the lighthouse burning through the storm season\n"
       "OUTLINE:\nMara inherits the lighthouse after their father vanishes "
       "at sea.\n"});
  for (int k = 1; k <= rounds; ++k) {
    script.push_back(
        {"plain_outline", "Round " + std::to_string(k) + " outline, a fresh "
                          "complication " + std::to_string(k) + "."});
    script.push_back({"writer_sim", counted_words(60)});
    script.push_back({"reader_sim", "- tighten the middle scene"});
    script.push_back({"writer_edit", counted_words(60)});
    script.push_back({"memory_summarizer",
                      "FACT: Storm " + std::to_string(k) + " passes."});
  }
  script.push_back({"ender", "The lamp holds. the end"});
  return script;
}

fs::path fresh_dir() {
  static std::mt19937_64 rng{std::random_device{}()};
  return fs::temp_directory_path() /
         ("storygen-bench-" + std::to_string(rng() & 0xffffffff));
}

void BM_MockRun(benchmark::State& state) {
  const int rounds = static_cast<int>(state.range(0));
  const auto script = run_script(rounds);

  for (auto _ : state) {
    storygen::ScriptedBackend backend(script);
    storygen::RunConfig config;
    config.topic = "a lighthouse that eats storms";
    config.target_words = static_cast<std::size_t>(rounds) * 60;
    config.out_dir = fresh_dir();
    const auto run = storygen::run_pipeline(config, backend);
    benchmark::DoNotOptimize(run.body_words());
    fs::remove_all(config.out_dir);
  }
}
BENCHMARK(BM_MockRun)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CheckpointRoundTrip(benchmark::State& state) {
  const auto script = run_script(4);
  storygen::ScriptedBackend backend(script);
  storygen::RunConfig config;
  config.topic = "a lighthouse that eats storms";
  config.target_words = 4 * 60;
  config.out_dir = fresh_dir();
  const auto run = storygen::run_pipeline(config, backend);

  for (auto _ : state) {
    storygen::write_checkpoint(run);
    benchmark::DoNotOptimize(storygen::load_checkpoint(config.out_dir));
  }
  fs::remove_all(config.out_dir);
}
BENCHMARK(BM_CheckpointRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
