#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gstqa/models/reader.hpp"
#include "gstqa/models/reranker.hpp"

namespace gstqa::models {

// Fixed small fixtures exercising every trainable path; used by the
// gradcheck command and the acceptance suite.

struct GradCheckCase {
  std::string name;
  nn::GradReport report;
};

namespace gradfix {

inline amr::Vocabulary fixture_vocab() {
  return amr::Vocabulary::with_tokens({"who", "won", "the", "ribbon", "cup", "Mira", "Voss",
                                       "Question:", "Title:", "Context:", "win", "person",
                                       "amr-unknown", ":ARG0", ":ARG1", ":same", "final",
                                       "ordinal", "entity", "-"});
}

inline ModelConfig fixture_config(Mode mode) {
  ModelConfig cfg;
  cfg.d_h = 32;
  cfg.heads = 4;
  cfg.enc_layers = 2;
  cfg.dec_layers = 2;
  cfg.ffn_mult = 2;
  cfg.text_max = 24;
  cfg.node_max = 145;
  cfg.edge_max = 165;
  cfg.n1 = 8;
  cfg.n2 = 2;
  cfg.mode = mode;
  cfg.seed = 11;
  return cfg;
}

inline QPExample fixture_example(int label, bool flip) {
  QPExample e;
  e.question = "who won the ribbon cup ?";
  e.title = "ribbon cup";
  e.text = "the ribbon cup final , Mira Voss won the ribbon cup .";
  e.label = label;
  e.penman = flip ? "(w / win-01 :ARG0-of (p / \"Mira Voss\") :ARG1 (c / \"ribbon cup\"))"
                  : "(w / win-01 :ARG0 (p / \"Mira Voss\") :ARG1 (c / \"ribbon cup\"))";
  e.formatted = pipeline::format_input(e.question, e.title, e.text);
  return e;
}

// Rerank loss over one positive and one negative pair, per the training
// step's double-average denominator.
inline double rerank_fixture_loss(const nn::ModelParams& params, const RerankScorer& scorer,
                                  const std::vector<PreparedExample>& prepared,
                                  std::map<std::string, nn::Tensor>* grads_out = nullptr) {
  nn::Tape t;
  const nn::BoundParams bp = nn::bind_params(t, params);
  std::vector<nn::Tape::Id> logits;
  std::vector<double> labels;
  for (const PreparedExample& p : prepared) {
    logits.push_back(scorer.logit_node(t, bp, p));
    labels.push_back(p.example.label);
  }
  const nn::Tape::Id stacked = logits.size() == 1 ? logits[0] : t.concat_rows(logits);
  const nn::Tape::Id loss = t.bce_with_logits(stacked, labels, double(labels.size()));
  const double value = t.val(loss).scalar();
  if (grads_out) {
    t.backward(loss);
    *grads_out = nn::collect_grads(t, bp);
  }
  return value;
}

inline double reader_fixture_loss(const nn::ModelParams& params, const ModelConfig& cfg,
                                  const std::vector<PreparedExample>& pairs,
                                  const std::vector<int>& answer_ids,
                                  std::map<std::string, nn::Tensor>* grads_out = nullptr) {
  nn::Tape t;
  const nn::BoundParams bp = nn::bind_params(t, params);
  const nn::Tape::Id loss = reader_loss_node(t, bp, cfg, pairs, answer_ids);
  const double value = t.val(loss).scalar();
  if (grads_out) {
    t.backward(loss);
    *grads_out = nn::collect_grads(t, bp);
  }
  return value;
}

inline GradCheckCase rerank_case(const std::string& name, Mode mode, std::size_t enc_layers,
                                 bool with_negative, double eps, std::size_t samples) {
  const amr::Vocabulary vocab = fixture_vocab();
  ModelConfig cfg = fixture_config(mode);
  cfg.enc_layers = enc_layers;
  const RerankScorer scorer(cfg, vocab);
  nn::ModelParams params = build_params(cfg, vocab.size(), ModelKind::Reranker,
                                        scorer.n_relations);
  std::vector<PreparedExample> prepared{scorer.prepare(fixture_example(1, false))};
  if (with_negative) prepared.push_back(scorer.prepare(fixture_example(0, true)));
  std::map<std::string, nn::Tensor> analytic;
  rerank_fixture_loss(params, scorer, prepared, &analytic);
  auto loss_fn = [&](const nn::ModelParams& p) {
    return rerank_fixture_loss(p, scorer, prepared);
  };
  return {name, nn::grad_check(params, loss_fn, analytic, eps, samples)};
}

inline GradCheckCase reader_case(const std::string& name, Mode mode, double eps,
                                 std::size_t samples) {
  const amr::Vocabulary vocab = fixture_vocab();
  ModelConfig cfg = fixture_config(mode);
  nn::ModelParams params = build_params(cfg, vocab.size(), ModelKind::Reader);
  std::vector<PreparedExample> pairs{
      prepare_example(fixture_example(1, false), cfg, vocab),
      prepare_example(fixture_example(0, true), cfg, vocab)};
  const std::vector<int> answer_ids = vocab.encode("Mira Voss");
  std::map<std::string, nn::Tensor> analytic;
  reader_fixture_loss(params, cfg, pairs, answer_ids, &analytic);
  auto loss_fn = [&](const nn::ModelParams& p) {
    return reader_fixture_loss(p, cfg, pairs, answer_ids);
  };
  return {name, nn::grad_check(params, loss_fn, analytic, eps, samples)};
}

}  // namespace gradfix

// (a) mlp projection path, (b) attention projection path, (c) the full
// rerank cross entropy, (d) the reader loss through decoder and
// cross-attention.
inline std::vector<GradCheckCase> run_standard_grad_checks(double eps = 1e-5,
                                                           std::size_t samples = 32) {
  std::vector<GradCheckCase> cases;
  cases.push_back(
      gradfix::rerank_case("gst-mlp projection + rerank loss", Mode::GstMlp, 1, false, eps, samples));
  cases.push_back(
      gradfix::rerank_case("gst-attn projection + rerank loss", Mode::GstAttn, 1, false, eps, samples));
  cases.push_back(
      gradfix::rerank_case("full reranker cross entropy", Mode::GstMlp, 2, true, eps, samples));
  cases.push_back(gradfix::reader_case("fid reader loss", Mode::Baseline, eps, samples));
  return cases;
}

}  // namespace gstqa::models
