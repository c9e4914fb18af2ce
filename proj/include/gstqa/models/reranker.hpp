#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gstqa/eval/metrics.hpp"
#include "gstqa/gst/projection.hpp"
#include "gstqa/models/example.hpp"
#include "gstqa/models/flatten.hpp"
#include "gstqa/models/rgcn.hpp"
#include "gstqa/models/transformer.hpp"
#include "gstqa/nn/loss.hpp"

namespace gstqa::models {

class NoTrainableQuestions : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text token rows: embedding lookup plus sinusoidal positions.
inline Tape::Id text_block(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                           const std::vector<int>& ids) {
  const Tape::Id embeds = t.gather_rows(bp["embed.tok"], ids);
  return t.add(embeds, t.input(sinusoidal_positions(ids.size(), cfg.d_h)));
}

// Encoder input for baseline and gst modes; graph rows are appended
// position-free after the text block.
inline Tape::Id encoder_input(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                              const PreparedExample& ex) {
  const Tape::Id text = text_block(t, bp, cfg, ex.text_ids);
  if (!uses_gst(cfg.mode)) return text;
  if (!ex.graph_tokens) throw MissingGraph("prepared example lacks graph tokens in gst mode");
  const gst::ProjectedGraph projected = gst::project_graph(t, bp, cfg, *ex.graph_tokens);
  return gst::assemble_input(t, text, projected, cfg.use_nodes, cfg.use_edges);
}

// Scoring front end for every reranking path. Holds the relation registry
// needed by the RGCN head; everything else is stateless.
struct RerankScorer {
  ModelConfig cfg;
  const amr::Vocabulary* vocab = nullptr;
  std::map<std::string, std::size_t> rel_index;
  std::size_t n_relations = 0;

  RerankScorer(ModelConfig config, const amr::Vocabulary& v) : cfg(std::move(config)), vocab(&v) {
    cfg.validate();
    if (cfg.mode == Mode::Rgcn) {
      const std::vector<std::string> rels = relation_registry(v);
      rel_index = relation_index(rels);
      n_relations = rels.size();
    }
  }

  PreparedExample prepare(const QPExample& e) const { return prepare_example(e, cfg, *vocab); }

  Tape::Id logit_node(Tape& t, const BoundParams& bp, const PreparedExample& ex) const {
    switch (cfg.mode) {
      case Mode::Rgcn:
        return rgcn_logit(t, bp, cfg, ex, rel_index, n_relations);
      case Mode::Flatten:
        return flatten_logit(t, bp, cfg, ex);
      default: {
        const Tape::Id x = encoder_input(t, bp, cfg, ex);
        const Tape::Id h = encoder_forward(t, x, bp, cfg);
        return head_logit(t, h, bp);
      }
    }
  }

  double score_prepared(const ModelParams& params, const PreparedExample& ex) const {
    Tape t;
    const BoundParams bp = nn::bind_params(t, params);
    const Tape::Id z = logit_node(t, bp, ex);
    return Tape::sigmoid_scalar(t.val(z).scalar());
  }

  // Deterministic scalar in (0,1).
  double score(const ModelParams& params, const QPExample& e) const {
    return score_prepared(params, prepare(e));
  }
};

// Full ranking of one question's passages: descending score, ties broken
// by original retrieval order. The top-K prefix is the reranked slate;
// the full order is kept for metrics.
inline eval::RankedQuestion rank_passages(const std::vector<double>& scores,
                                          const std::vector<int>& labels,
                                          const std::string& qid) {
  std::vector<int> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    return a < b;
  });
  eval::RankedQuestion rq;
  rq.qid = qid;
  rq.order = order;
  for (int idx : order) rq.positive.push_back(labels[static_cast<std::size_t>(idx)] == 1);
  return rq;
}

inline eval::RankedQuestion rerank_question(const RerankScorer& scorer, const ModelParams& params,
                                            const pipeline::DatasetRecord& record,
                                            const std::string& qid,
                                            bool use_paraphrased = false) {
  const std::vector<QPExample> examples = make_examples(record, use_paraphrased);
  const std::size_t n = std::min(scorer.cfg.n1, examples.size());
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    scores.push_back(scorer.score(params, examples[i]));
    labels.push_back(examples[i].label);
  }
  return rank_passages(scores, labels, qid);
}

inline eval::RankedRun rerank_dataset(const RerankScorer& scorer, const ModelParams& params,
                                      const std::vector<pipeline::DatasetRecord>& records,
                                      bool use_paraphrased = false) {
  eval::RankedRun run;
  for (std::size_t i = 0; i < records.size(); ++i)
    run.questions.push_back(
        rerank_question(scorer, params, records[i], "q" + std::to_string(i), use_paraphrased));
  return run;
}

struct RerankTrainStats {
  std::vector<double> epoch_mean_loss;
  std::vector<double> dev_top10;
  std::size_t skipped_questions = 0;
  std::size_t steps = 0;
  std::size_t best_epoch = 0;
  double best_dev_top10 = -1.0;
};

// One optimizer step per question: n_pos positives and n_neg negatives
// sampled without replacement, scored on a shared tape, cross-entropy
// averaged over the group. Checkpoint selection uses dev Top10.
inline RerankTrainStats train_reranker(const std::vector<pipeline::DatasetRecord>& train,
                                       const std::vector<pipeline::DatasetRecord>& dev,
                                       ModelParams& params, const RerankScorer& scorer) {
  const ModelConfig& cfg = scorer.cfg;
  struct TrainQuestion {
    std::vector<PreparedExample> prepared;
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
  };
  std::vector<TrainQuestion> questions;
  std::size_t skipped = 0;
  for (const pipeline::DatasetRecord& record : train) {
    TrainQuestion tq;
    const std::vector<QPExample> examples = make_examples(record);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      tq.prepared.push_back(scorer.prepare(examples[i]));
      if (examples[i].label == 1)
        tq.positives.push_back(i);
      else
        tq.negatives.push_back(i);
    }
    if (tq.positives.size() < cfg.n_pos || tq.negatives.size() < cfg.n_neg) {
      ++skipped;
      continue;
    }
    questions.push_back(std::move(tq));
  }
  if (questions.empty())
    throw NoTrainableQuestions("no question has enough positive and negative passages");

  RerankTrainStats stats;
  stats.skipped_questions = skipped;
  nn::AdamOptimizer opt({cfg.lr});
  std::mt19937_64 rng(cfg.seed);
  ModelParams best;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(questions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t qi : order) {
      TrainQuestion& tq = questions[qi];
      std::shuffle(tq.positives.begin(), tq.positives.end(), rng);
      std::shuffle(tq.negatives.begin(), tq.negatives.end(), rng);
      std::vector<std::size_t> batch(tq.positives.begin(), tq.positives.begin() + cfg.n_pos);
      batch.insert(batch.end(), tq.negatives.begin(), tq.negatives.begin() + cfg.n_neg);

      Tape t;
      const BoundParams bp = nn::bind_params(t, params);
      std::vector<Tape::Id> logits;
      std::vector<double> labels;
      for (std::size_t idx : batch) {
        logits.push_back(scorer.logit_node(t, bp, tq.prepared[idx]));
        labels.push_back(tq.prepared[idx].example.label);
      }
      const Tape::Id stacked = logits.size() == 1 ? logits[0] : t.concat_rows(logits);
      const Tape::Id loss =
          t.bce_with_logits(stacked, labels, static_cast<double>(labels.size()));
      loss_sum += t.val(loss).scalar();
      t.backward(loss);
      opt.step(params, nn::collect_grads(t, bp));
      ++stats.steps;
    }
    stats.epoch_mean_loss.push_back(loss_sum / static_cast<double>(order.size()));
    if (!dev.empty()) {
      const eval::RankedRun run = rerank_dataset(scorer, params, dev);
      const double top10 = eval::top_n(run, 10);
      stats.dev_top10.push_back(top10);
      if (top10 > stats.best_dev_top10) {
        stats.best_dev_top10 = top10;
        stats.best_epoch = epoch;
        best = params;
      }
    }
  }
  if (!dev.empty() && !best.empty()) params = best;
  return stats;
}

}  // namespace gstqa::models
