#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gstqa/amr/tokenize.hpp"
#include "gstqa/models/config.hpp"
#include "gstqa/models/transformer.hpp"
#include "gstqa/nn/tape.hpp"

namespace gstqa::gst {

using models::AttnRefs;
using models::ModelConfig;
using nn::BoundParams;
using nn::Tape;

class EmptySegment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-edge token-embedding segments: one row per subword token of the
// head concept, the relation label, and the tail concept.
struct EdgeSegments {
  Tape::Id head;
  Tape::Id rel;
  Tape::Id tail;
};

inline Tape::Id lookup_segment(Tape& t, Tape::Id table, const std::vector<int>& ids,
                               const char* what) {
  if (ids.empty()) throw EmptySegment(std::string("empty token segment: ") + what);
  return t.gather_rows(table, ids);
}

// Embedding initialization is a plain table lookup; no transformation.
inline EdgeSegments init_edge_tokens(Tape& t, Tape::Id table, const amr::EdgeTokenTriple& e) {
  return {lookup_segment(t, table, e.head, "edge head"),
          lookup_segment(t, table, e.relation, "edge relation"),
          lookup_segment(t, table, e.tail, "edge tail")};
}

inline Tape::Id init_node_tokens(Tape& t, Tape::Id table, const std::vector<int>& ids) {
  return lookup_segment(t, table, ids, "node");
}

// Edge projection: average each segment, concatenate [u, r, v] into 3d,
// then one affine layer down to d.
inline Tape::Id mlp_project_edge(Tape& t, const EdgeSegments& seg, Tape::Id w, Tape::Id b) {
  const Tape::Id u = t.mean_rows(seg.head);
  const Tape::Id r = t.mean_rows(seg.rel);
  const Tape::Id v = t.mean_rows(seg.tail);
  return models::affine(t, t.concat_cols({u, r, v}), w, b);
}

// Node projection reuses the same 3d->d weights: the averaged node
// embedding is stacked three times.
inline Tape::Id mlp_project_node(Tape& t, Tape::Id node_tokens, Tape::Id w, Tape::Id b) {
  const Tape::Id n = t.mean_rows(node_tokens);
  return models::affine(t, t.concat_cols({n, n, n}), w, b);
}

// One self-attention layer over [summary token, segments...]; the summary
// token's output row is the projected embedding. Graph tokens carry no
// positional encoding, so the projection is permutation-invariant over
// each segment's tokens.
inline Tape::Id attn_project(Tape& t, const std::vector<Tape::Id>& segments, Tape::Id special,
                             const AttnRefs& attn, std::size_t heads) {
  if (segments.empty()) throw EmptySegment("attention projection with no segments");
  std::vector<Tape::Id> rows{special};
  rows.insert(rows.end(), segments.begin(), segments.end());
  const Tape::Id seq = t.concat_rows(rows);
  const Tape::Id out = models::multi_head_attention(t, seq, seq, attn, heads);
  return t.slice_rows(out, 0, 1);
}

inline Tape::Id attn_project_edge(Tape& t, const EdgeSegments& seg, const BoundParams& bp,
                                  std::size_t heads) {
  return attn_project(t, {seg.head, seg.rel, seg.tail}, bp["gst.attn_edge.special"],
                      models::attn_refs(bp, "gst.attn_edge"), heads);
}

inline Tape::Id attn_project_node(Tape& t, Tape::Id node_tokens, const BoundParams& bp,
                                  std::size_t heads) {
  return attn_project(t, {node_tokens}, bp["gst.attn_node.special"],
                      models::attn_refs(bp, "gst.attn_node"), heads);
}

// Projects every kept node and edge of a tokenized graph to one d_h row.
struct ProjectedGraph {
  std::vector<Tape::Id> nodes;
  std::vector<Tape::Id> edges;
};

inline ProjectedGraph project_graph(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                                    const amr::TokenizedGraph& tg) {
  ProjectedGraph out;
  const Tape::Id table = bp["embed.tok"];
  const bool mlp = cfg.mode == models::Mode::GstMlp;
  if (cfg.use_nodes) {
    for (const std::vector<int>& ids : tg.node_tokens) {
      const Tape::Id seg = init_node_tokens(t, table, ids);
      out.nodes.push_back(mlp ? mlp_project_node(t, seg, bp["gst.proj.w"], bp["gst.proj.b"])
                              : attn_project_node(t, seg, bp, cfg.heads));
    }
  }
  if (cfg.use_edges) {
    for (const amr::EdgeTokenTriple& e : tg.edge_tokens) {
      const EdgeSegments seg = init_edge_tokens(t, table, e);
      out.edges.push_back(mlp ? mlp_project_edge(t, seg, bp["gst.proj.w"], bp["gst.proj.b"])
                              : attn_project_edge(t, seg, bp, cfg.heads));
    }
  }
  return out;
}

// Row-concatenation [text, nodes, edges]; ablation flags drop whole
// blocks. Graph rows receive no positional encoding.
inline Tape::Id assemble_input(Tape& t, Tape::Id text, const ProjectedGraph& graph,
                               bool use_nodes, bool use_edges) {
  std::vector<Tape::Id> blocks{text};
  if (use_nodes)
    for (Tape::Id n : graph.nodes) blocks.push_back(n);
  if (use_edges)
    for (Tape::Id e : graph.edges) blocks.push_back(e);
  return blocks.size() == 1 ? text : t.concat_rows(blocks);
}

}  // namespace gstqa::gst
