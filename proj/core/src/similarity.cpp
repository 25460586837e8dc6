#include "storygen/similarity.hpp"

#include <cmath>

#include "storygen/errors.hpp"

namespace storygen {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (const char ch : text) {
    const auto byte = static_cast<unsigned char>(ch);
    if (byte >= 0x80) {
      current.push_back(ch);
    } else if ((byte >= 'a' && byte <= 'z') || (byte >= '0' && byte <= '9')) {
      current.push_back(ch);
    } else if (byte >= 'A' && byte <= 'Z') {
      current.push_back(static_cast<char>(byte - 'A' + 'a'));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::map<std::string, double> term_frequencies(std::string_view text) {
  std::map<std::string, double> tf;
  for (auto& token : tokenize(text)) {
    tf[std::move(token)] += 1.0;
  }
  return tf;
}

double cosine(const std::map<std::string, double>& u,
              const std::map<std::string, double>& v) {
  if (u.empty() || v.empty()) {
    return 0.0;
  }
  double dot = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
  for (const auto& [term, weight] : u) {
    norm_u += weight * weight;
    const auto it = v.find(term);
    if (it != v.end()) {
      dot += weight * it->second;
    }
  }
  for (const auto& [term, weight] : v) {
    norm_v += weight * weight;
  }
  if (norm_u == 0.0 || norm_v == 0.0) {
    return 0.0;
  }
  return dot / (std::sqrt(norm_u) * std::sqrt(norm_v));
}

double text_similarity(std::string_view a, std::string_view b) {
  return cosine(term_frequencies(a), term_frequencies(b));
}

GateDecision decide_twist(double score, double threshold,
                          bool invert_direction) {
  GateDecision decision;
  decision.score = score;
  decision.threshold = threshold;
  decision.twist =
      invert_direction ? score < threshold : score > threshold;
  return decision;
}

GateDecision decide_strategy(std::string_view latest, std::string_view previous,
                             double threshold, bool invert_direction) {
  if (latest.empty() || previous.empty()) {
    throw EmptyOutline("gate needs two non-empty outlines");
  }
  return decide_twist(text_similarity(latest, previous), threshold,
                      invert_direction);
}

}  // namespace storygen
