#pragma once

#include <map>
#include <string>

#include "storygen/runtime.hpp"

namespace storygen::detail {

/// Renders the role's prompt template and runs it through the backend.
/// Returns the raw response text.
inline std::string call_role(AgentRuntime& rt, const std::string& role_tag,
                             const std::map<std::string, std::string>& values) {
  const auto& tmpl = rt.prompts->get(role_tag);
  ChatRequest request;
  request.role_tag = role_tag;
  request.system_text = render_template(tmpl.system_text, values);
  request.user_text = render_template(tmpl.user_text, values);
  request.temperature = rt.temperature;
  request.max_tokens = rt.max_tokens;
  return rt.backend->complete(request).text;
}

}  // namespace storygen::detail
