#pragma once

#include <cmath>
#include <vector>

#include "gstqa/nn/tape.hpp"

namespace gstqa::nn {

struct ScoredPassage {
  double score;  // strictly inside (0,1)
  int label;     // 0 or 1
};

// Double-average rerank cross entropy: mean over questions of the mean
// over that question's passages of -[y log s + (1-y) log(1-s)]. With equal
// group sizes this equals 1/(N_q * (N_pos + N_neg)) * the double sum.
inline double cross_entropy_rerank(const std::vector<std::vector<ScoredPassage>>& questions) {
  if (questions.empty()) throw ShapeMismatch("cross_entropy_rerank: no questions");
  double total = 0.0;
  for (const auto& group : questions) {
    if (group.empty()) throw ShapeMismatch("cross_entropy_rerank: empty question group");
    double inner = 0.0;
    for (const ScoredPassage& p : group) {
      if (!(p.score > 0.0 && p.score < 1.0))
        throw ScoreOutOfRange("cross_entropy_rerank: score not strictly inside (0,1)");
      const double y = static_cast<double>(p.label);
      inner += -(y * std::log(p.score) + (1.0 - y) * std::log(1.0 - p.score));
    }
    total += inner / static_cast<double>(group.size());
  }
  return total / static_cast<double>(questions.size());
}

}  // namespace gstqa::nn
