#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

/// Splits text into lowercase tokens. ASCII letters and digits are token
/// characters, bytes >= 0x80 pass through unchanged (so non-ASCII scripts
/// survive), everything else separates.
std::vector<std::string> tokenize(std::string_view text);

/// Term-frequency vector over tokenize(text).
std::map<std::string, double> term_frequencies(std::string_view text);

/// Cosine of two sparse vectors. Returns 0 when either is empty.
double cosine(const std::map<std::string, double>& u,
              const std::map<std::string, double>& v);

/// Bag-of-words cosine similarity of two texts, in [0, 1].
double text_similarity(std::string_view a, std::string_view b);

struct GateDecision {
  double score = 0.0;
  double threshold = 0.0;
  bool twist = false;
};

/// Twist gate on a precomputed score. By default a twist fires when the
/// latest two outlines are too similar: score > threshold, strictly. With
/// invert_direction a twist fires when they diverge: score < threshold.
/// Equality picks plain either way.
GateDecision decide_twist(double score, double threshold,
                          bool invert_direction = false);

/// Full gate: scores the two outline texts and decides. Throws EmptyOutline
/// when either text is empty.
GateDecision decide_strategy(std::string_view latest, std::string_view previous,
                             double threshold, bool invert_direction = false);

}  // namespace storygen
