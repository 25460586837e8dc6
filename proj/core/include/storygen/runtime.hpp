#pragma once

#include <cstddef>

#include "storygen/backend.hpp"
#include "storygen/prompts.hpp"
#include "storygen/trace.hpp"

namespace storygen {

/// Everything an agent call needs, bundled so agent functions stay free
/// functions. `trace` may be null when no run trace is being kept (eval
/// commands); warnings are then dropped or surfaced through return values.
struct AgentRuntime {
  Backend* backend = nullptr;
  const PromptLibrary* prompts = nullptr;
  double temperature = 0.7;
  int max_tokens = 2048;
  /// Character budget for rendered memory context blocks.
  std::size_t context_budget = 6000;
  RunTrace* trace = nullptr;
  /// Round tagged onto trace events; -1 outside the pipeline loop.
  int round = -1;
};

}  // namespace storygen
