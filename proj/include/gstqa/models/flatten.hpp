#pragma once

#include <vector>

#include "gstqa/models/example.hpp"
#include "gstqa/models/transformer.hpp"

namespace gstqa::models {

// Flattened-graph scoring: the graph's PENMAN stream is appended to the
// text tokens (already truncated to flatten_max during preparation) and
// the result goes through the standard text encoder and head. With no
// graph this is exactly the baseline forward.
inline Tape::Id flatten_logit(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                              const PreparedExample& ex) {
  std::vector<int> ids;
  ids.reserve(ex.flat_ids.size() + 1);
  ids.push_back(amr::Vocabulary::kBos);
  ids.insert(ids.end(), ex.flat_ids.begin(), ex.flat_ids.end());
  const Tape::Id embeds = t.gather_rows(bp["embed.tok"], ids);
  const Tape::Id x = t.add(embeds, t.input(sinusoidal_positions(ids.size(), cfg.d_h)));
  const Tape::Id h = encoder_forward(t, x, bp, cfg);
  return head_logit(t, h, bp);
}

}  // namespace gstqa::models
