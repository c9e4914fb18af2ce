#pragma once

#include <map>
#include <string>
#include <vector>

#include "gstqa/models/example.hpp"
#include "gstqa/models/transformer.hpp"

namespace gstqa::models {

// Relations known to an RGCN model: the sorted ':'-prefixed vocabulary
// units. Deterministic given the vocabulary file; the index past the end
// is reserved for the virtual CLS link.
inline std::vector<std::string> relation_registry(const amr::Vocabulary& vocab) {
  std::vector<std::string> rels;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string& t = vocab.token(static_cast<int>(i));
    if (!t.empty() && t[0] == ':') rels.push_back(t);
  }
  std::sort(rels.begin(), rels.end());
  return rels;
}

inline std::map<std::string, std::size_t> relation_index(const std::vector<std::string>& rels) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < rels.size(); ++i) idx[rels[i]] = i;
  return idx;
}

// RGCN stacked on the text encoder. Node states start from the mean of
// the encoder rows aligned to the node's surface span (sequence mean when
// unaligned); a virtual CLS node, initialized from the start position, is
// linked to every node by a dedicated relation and its final state feeds
// the scoring head. Updates follow
//   h_i' = relu(W0 h_i + sum_r mean_{j in N_r(i)} W_r h_j)
// where the per-relation neighbor mean carries the 1/c_{i,r}
// normalization. Neighborhoods are undirected. Relations absent from the
// registry contribute no message.
inline Tape::Id rgcn_logit(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                           const PreparedExample& ex,
                           const std::map<std::string, std::size_t>& rel_index,
                           std::size_t n_relations) {
  const Tape::Id table = bp["embed.tok"];
  const Tape::Id embeds = t.gather_rows(table, ex.text_ids);
  const Tape::Id x = t.add(embeds, t.input(sinusoidal_positions(ex.text_ids.size(), cfg.d_h)));
  const Tape::Id h_text = encoder_forward(t, x, bp, cfg);
  const std::size_t rows = t.val(h_text).rows();

  const std::size_t n_nodes = ex.graph ? ex.graph->nodes.size() : 0;
  std::vector<Tape::Id> state(n_nodes + 1);  // node states + trailing CLS
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const auto [s, e] = i < ex.node_spans.size() ? ex.node_spans[i] : std::pair<long, long>{-1, -1};
    if (s >= 0 && static_cast<std::size_t>(e) + 1 <= rows)
      state[i] = t.mean_rows(t.slice_rows(h_text, static_cast<std::size_t>(s) + 1,
                                          static_cast<std::size_t>(e) + 1));
    else
      state[i] = t.mean_rows(h_text);
  }
  const std::size_t cls = n_nodes;
  state[cls] = t.slice_rows(h_text, 0, 1);

  // per-target neighbor lists grouped by relation id
  std::vector<std::map<std::size_t, std::vector<std::size_t>>> nbrs(n_nodes + 1);
  if (ex.graph) {
    std::map<std::string, std::size_t> node_pos;
    for (std::size_t i = 0; i < n_nodes; ++i) node_pos[ex.graph->nodes[i].id] = i;
    for (const amr::AmrEdge& e : ex.graph->edges) {
      auto rit = rel_index.find(e.relation);
      if (rit == rel_index.end()) continue;
      const std::size_t hi = node_pos.at(e.head), ti = node_pos.at(e.tail);
      nbrs[hi][rit->second].push_back(ti);
      nbrs[ti][rit->second].push_back(hi);
    }
  }
  const std::size_t cls_rel = n_relations;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    nbrs[i][cls_rel].push_back(cls);
    nbrs[cls][cls_rel].push_back(i);
  }

  for (std::size_t l = 0; l < cfg.rgcn_layers; ++l) {
    const std::string prefix = "rgcn.l" + std::to_string(l);
    std::vector<Tape::Id> next(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
      Tape::Id acc = t.matmul(state[i], bp[prefix + ".w0"]);
      for (const auto& [rel, js] : nbrs[i]) {
        std::vector<Tape::Id> gathered;
        gathered.reserve(js.size());
        for (std::size_t j : js) gathered.push_back(state[j]);
        const Tape::Id pooled =
            gathered.size() == 1 ? gathered[0] : t.mean_rows(t.concat_rows(gathered));
        acc = t.add(acc, t.matmul(pooled, bp[prefix + ".rel" + std::to_string(rel)]));
      }
      next[i] = t.relu(acc);
    }
    state = std::move(next);
  }

  const Tape::Id hidden =
      t.tanh_op(affine(t, state[cls], bp["rgcn.head.w1"], bp["rgcn.head.b1"]));
  return affine(t, hidden, bp["rgcn.head.w2"], bp["rgcn.head.b2"]);
}

}  // namespace gstqa::models
