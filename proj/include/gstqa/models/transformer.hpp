#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gstqa/models/config.hpp"
#include "gstqa/nn/params.hpp"
#include "gstqa/nn/tape.hpp"

namespace gstqa::models {

using nn::BoundParams;
using nn::ModelParams;
using nn::Tape;
using nn::Tensor;

inline Tape::Id affine(Tape& t, Tape::Id x, Tape::Id w, Tape::Id b) {
  return t.add_rowvec(t.matmul(x, w), b);
}

struct AttnRefs {
  Tape::Id wq, bq, wk, bk, wv, bv, wo, bo;
};

inline AttnRefs attn_refs(const BoundParams& bp, const std::string& prefix) {
  return {bp[prefix + ".wq"], bp[prefix + ".bq"], bp[prefix + ".wk"], bp[prefix + ".bk"],
          bp[prefix + ".wv"], bp[prefix + ".bv"], bp[prefix + ".wo"], bp[prefix + ".bo"]};
}

// Multi-head scaled dot-product attention. `add_mask` is additive on the
// pre-softmax scores (Lq x Lkv); masked key columns get a large negative
// value so they receive zero weight from every query.
inline Tape::Id multi_head_attention(Tape& t, Tape::Id x_q, Tape::Id x_kv, const AttnRefs& w,
                                     std::size_t heads, const Tensor* add_mask = nullptr) {
  const std::size_t d = t.val(x_q).cols();
  if (d % heads != 0) throw nn::ShapeMismatch("attention: d_h not divisible by heads");
  const std::size_t dk = d / heads;
  const Tape::Id q = affine(t, x_q, w.wq, w.bq);
  const Tape::Id k = affine(t, x_kv, w.wk, w.bk);
  const Tape::Id v = affine(t, x_kv, w.wv, w.bv);
  std::vector<Tape::Id> head_outs;
  head_outs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Tape::Id qh = t.slice_cols(q, h * dk, (h + 1) * dk);
    const Tape::Id kh = t.slice_cols(k, h * dk, (h + 1) * dk);
    const Tape::Id vh = t.slice_cols(v, h * dk, (h + 1) * dk);
    const Tape::Id scores = t.scale(t.matmul(qh, t.transpose(kh)), 1.0 / std::sqrt(double(dk)));
    const Tape::Id attn = t.softmax_rows(scores, add_mask);
    head_outs.push_back(t.matmul(attn, vh));
  }
  const Tape::Id merged = heads == 1 ? head_outs[0] : t.concat_cols(head_outs);
  return affine(t, merged, w.wo, w.bo);
}

// Boolean key mask (true = masked out) expanded to an additive Lq x Lkv
// score mask.
inline Tensor key_mask(std::size_t lq, const std::vector<bool>& masked) {
  Tensor m(lq, masked.size());
  for (std::size_t r = 0; r < lq; ++r)
    for (std::size_t c = 0; c < masked.size(); ++c)
      if (masked[c]) m.at(r, c) = -1e30;
  return m;
}

inline Tensor causal_mask(std::size_t len) {
  Tensor m(len, len);
  for (std::size_t r = 0; r < len; ++r)
    for (std::size_t c = r + 1; c < len; ++c) m.at(r, c) = -1e30;
  return m;
}

inline Tensor sinusoidal_positions(std::size_t len, std::size_t d) {
  Tensor pe(len, d);
  for (std::size_t pos = 0; pos < len; ++pos) {
    for (std::size_t i = 0; i < d; i += 2) {
      const double angle =
          static_cast<double>(pos) / std::pow(10000.0, static_cast<double>(i) / double(d));
      pe.at(pos, i) = std::sin(angle);
      if (i + 1 < d) pe.at(pos, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

inline Tape::Id ffn_forward(Tape& t, Tape::Id x, const BoundParams& bp,
                            const std::string& prefix) {
  const Tape::Id hidden = t.gelu(affine(t, x, bp[prefix + ".w1"], bp[prefix + ".b1"]));
  return affine(t, hidden, bp[prefix + ".w2"], bp[prefix + ".b2"]);
}

// Pre-norm encoder stack with a final layer norm.
inline Tape::Id encoder_forward(Tape& t, Tape::Id x, const BoundParams& bp,
                                const ModelConfig& cfg, const Tensor* add_mask = nullptr) {
  Tape::Id h = x;
  for (std::size_t l = 0; l < cfg.enc_layers; ++l) {
    const std::string p = "enc.l" + std::to_string(l);
    const Tape::Id n1 = t.layer_norm(h, bp[p + ".ln1.g"], bp[p + ".ln1.b"]);
    h = t.add(h, multi_head_attention(t, n1, n1, attn_refs(bp, p + ".attn"), cfg.heads, add_mask));
    const Tape::Id n2 = t.layer_norm(h, bp[p + ".ln2.g"], bp[p + ".ln2.b"]);
    h = t.add(h, ffn_forward(t, n2, bp, p + ".ffn"));
  }
  return t.layer_norm(h, bp["enc.final_ln.g"], bp["enc.final_ln.b"]);
}

// Pre-norm decoder with causal self-attention and cross-attention over
// `memory`; returns vocabulary logits (T x V).
inline Tape::Id decoder_logits(Tape& t, Tape::Id y, Tape::Id memory, const BoundParams& bp,
                               const ModelConfig& cfg, const Tensor& self_mask) {
  Tape::Id h = y;
  for (std::size_t l = 0; l < cfg.dec_layers; ++l) {
    const std::string p = "dec.l" + std::to_string(l);
    const Tape::Id n1 = t.layer_norm(h, bp[p + ".ln1.g"], bp[p + ".ln1.b"]);
    h = t.add(h, multi_head_attention(t, n1, n1, attn_refs(bp, p + ".self"), cfg.heads, &self_mask));
    const Tape::Id n2 = t.layer_norm(h, bp[p + ".ln2.g"], bp[p + ".ln2.b"]);
    h = t.add(h, multi_head_attention(t, n2, memory, attn_refs(bp, p + ".cross"), cfg.heads));
    const Tape::Id n3 = t.layer_norm(h, bp[p + ".ln3.g"], bp[p + ".ln3.b"]);
    h = t.add(h, ffn_forward(t, n3, bp, p + ".ffn"));
  }
  h = t.layer_norm(h, bp["dec.final_ln.g"], bp["dec.final_ln.b"]);
  return affine(t, h, bp["lm.w"], bp["lm.b"]);
}

// Two-layer classification head over the sequence-start hidden state:
// tanh projection, then a scalar logit.
inline Tape::Id head_logit(Tape& t, Tape::Id h, const BoundParams& bp,
                           const std::string& prefix = "head") {
  const Tape::Id start = t.slice_rows(h, 0, 1);
  const Tape::Id hidden = t.tanh_op(affine(t, start, bp[prefix + ".w1"], bp[prefix + ".b1"]));
  return affine(t, hidden, bp[prefix + ".w2"], bp[prefix + ".b2"]);
}

// ---- parameter factories ----
// Construction order is fixed so that two models built from the same seed
// share every tensor they have in common.

inline void add_weight(ModelParams& p, const std::string& name, std::size_t rows,
                       std::size_t cols, std::mt19937_64& rng, double stddev = 0.02) {
  Tensor t(rows, cols);
  nn::fill_normal(t, rng, stddev);
  p.emplace(name, std::move(t));
}

inline void add_bias(ModelParams& p, const std::string& name, std::size_t cols) {
  p.emplace(name, Tensor(1, cols));
}

inline void add_layer_norm(ModelParams& p, const std::string& prefix, std::size_t d) {
  p.emplace(prefix + ".g", Tensor(1, d, 1.0));
  p.emplace(prefix + ".b", Tensor(1, d));
}

inline void add_attention_params(ModelParams& p, const std::string& prefix, std::size_t d,
                                 std::mt19937_64& rng) {
  for (const char* w : {".wq", ".wk", ".wv", ".wo"}) add_weight(p, prefix + w, d, d, rng);
  for (const char* b : {".bq", ".bk", ".bv", ".bo"}) add_bias(p, prefix + b, d);
}

inline void add_ffn_params(ModelParams& p, const std::string& prefix, std::size_t d,
                           std::size_t mult, std::mt19937_64& rng) {
  add_weight(p, prefix + ".w1", d, d * mult, rng);
  add_bias(p, prefix + ".b1", d * mult);
  add_weight(p, prefix + ".w2", d * mult, d, rng);
  add_bias(p, prefix + ".b2", d);
}

inline void add_encoder_params(ModelParams& p, const ModelConfig& cfg, std::mt19937_64& rng) {
  for (std::size_t l = 0; l < cfg.enc_layers; ++l) {
    const std::string prefix = "enc.l" + std::to_string(l);
    add_layer_norm(p, prefix + ".ln1", cfg.d_h);
    add_attention_params(p, prefix + ".attn", cfg.d_h, rng);
    add_layer_norm(p, prefix + ".ln2", cfg.d_h);
    add_ffn_params(p, prefix + ".ffn", cfg.d_h, cfg.ffn_mult, rng);
  }
  add_layer_norm(p, "enc.final_ln", cfg.d_h);
}

inline void add_decoder_params(ModelParams& p, const ModelConfig& cfg, std::size_t vocab_size,
                               std::mt19937_64& rng) {
  for (std::size_t l = 0; l < cfg.dec_layers; ++l) {
    const std::string prefix = "dec.l" + std::to_string(l);
    add_layer_norm(p, prefix + ".ln1", cfg.d_h);
    add_attention_params(p, prefix + ".self", cfg.d_h, rng);
    add_layer_norm(p, prefix + ".ln2", cfg.d_h);
    add_attention_params(p, prefix + ".cross", cfg.d_h, rng);
    add_layer_norm(p, prefix + ".ln3", cfg.d_h);
    add_ffn_params(p, prefix + ".ffn", cfg.d_h, cfg.ffn_mult, rng);
  }
  add_layer_norm(p, "dec.final_ln", cfg.d_h);
  add_weight(p, "lm.w", cfg.d_h, vocab_size, rng);
  add_bias(p, "lm.b", vocab_size);
}

inline void add_head_params(ModelParams& p, const ModelConfig& cfg, std::mt19937_64& rng,
                            const std::string& prefix = "head") {
  add_weight(p, prefix + ".w1", cfg.d_h, cfg.d_h, rng);
  add_bias(p, prefix + ".b1", cfg.d_h);
  add_weight(p, prefix + ".w2", cfg.d_h, 1, rng);
  add_bias(p, prefix + ".b2", 1);
}

// Shared 3d->d projection MLP plus the two projection attention layers
// with their learned summary tokens.
inline void add_gst_params(ModelParams& p, const ModelConfig& cfg, std::mt19937_64& rng) {
  add_weight(p, "gst.proj.w", 3 * cfg.d_h, cfg.d_h, rng);
  add_bias(p, "gst.proj.b", cfg.d_h);
  add_weight(p, "gst.attn_edge.special", 1, cfg.d_h, rng);
  add_attention_params(p, "gst.attn_edge", cfg.d_h, rng);
  add_weight(p, "gst.attn_node.special", 1, cfg.d_h, rng);
  add_attention_params(p, "gst.attn_node", cfg.d_h, rng);
}

inline void add_rgcn_params(ModelParams& p, const ModelConfig& cfg, std::size_t n_relations,
                            std::mt19937_64& rng) {
  for (std::size_t l = 0; l < cfg.rgcn_layers; ++l) {
    const std::string prefix = "rgcn.l" + std::to_string(l);
    add_weight(p, prefix + ".w0", cfg.d_h, cfg.d_h, rng);
    // slot n_relations is the dedicated virtual-CLS relation
    for (std::size_t r = 0; r <= n_relations; ++r)
      add_weight(p, prefix + ".rel" + std::to_string(r), cfg.d_h, cfg.d_h, rng);
  }
  add_head_params(p, cfg, rng, "rgcn.head");
}

enum class ModelKind { Reranker, Reader };

// n_relations only matters for Mode::Rgcn rerankers.
inline ModelParams build_params(const ModelConfig& cfg, std::size_t vocab_size,
                                ModelKind kind, std::size_t n_relations = 0) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  ModelParams p;
  add_weight(p, "embed.tok", vocab_size, cfg.d_h, rng);
  add_encoder_params(p, cfg, rng);
  if (kind == ModelKind::Reader) {
    add_decoder_params(p, cfg, vocab_size, rng);
  } else {
    add_head_params(p, cfg, rng);
  }
  add_gst_params(p, cfg, rng);
  if (kind == ModelKind::Reranker && cfg.mode == Mode::Rgcn)
    add_rgcn_params(p, cfg, n_relations, rng);
  return p;
}

}  // namespace gstqa::models
