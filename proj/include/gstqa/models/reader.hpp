#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "gstqa/models/reranker.hpp"

namespace gstqa::models {

class EmptyPassageList : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReadBatch {
  std::string question;
  std::vector<QPExample> passages;  // the N2 pairs fed to the encoders
  std::vector<std::string> golds;
};

inline ReadBatch make_read_batch(const pipeline::DatasetRecord& record, std::size_t n2,
                                 bool use_paraphrased = false) {
  ReadBatch b;
  b.question = record.question;
  b.golds = record.answers;
  const std::vector<QPExample> examples = make_examples(record, use_paraphrased);
  for (std::size_t i = 0; i < examples.size() && i < n2; ++i) b.passages.push_back(examples[i]);
  return b;
}

// Fusion-in-decoder memory: each pair is encoded independently (shared
// encoder weights) and the hidden states are row-concatenated, so the
// memory has sum_i L_i rows. Graph rows are included in gst modes.
inline Tape::Id fid_memory(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                           const std::vector<PreparedExample>& pairs) {
  if (pairs.empty()) throw EmptyPassageList("reader needs at least one passage");
  std::vector<Tape::Id> states;
  states.reserve(pairs.size());
  for (const PreparedExample& p : pairs) {
    const Tape::Id x = encoder_input(t, bp, cfg, p);
    states.push_back(encoder_forward(t, x, bp, cfg));
  }
  return states.size() == 1 ? states[0] : t.concat_rows(states);
}

inline Tape::Id decoder_input(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                              const std::vector<int>& ids) {
  const Tape::Id embeds = t.gather_rows(bp["embed.tok"], ids);
  return t.add(embeds, t.input(sinusoidal_positions(ids.size(), cfg.d_h)));
}

// Teacher-forced token cross entropy against the first gold answer.
inline Tape::Id reader_loss_node(Tape& t, const BoundParams& bp, const ModelConfig& cfg,
                                 const std::vector<PreparedExample>& pairs,
                                 const std::vector<int>& answer_ids) {
  const Tape::Id memory = fid_memory(t, bp, cfg, pairs);
  std::vector<int> dec_ids{amr::Vocabulary::kBos};
  dec_ids.insert(dec_ids.end(), answer_ids.begin(), answer_ids.end());
  std::vector<int> targets(answer_ids.begin(), answer_ids.end());
  targets.push_back(amr::Vocabulary::kEos);
  const Tensor mask = causal_mask(dec_ids.size());
  const Tape::Id y = decoder_input(t, bp, cfg, dec_ids);
  const Tape::Id logits = decoder_logits(t, y, memory, bp, cfg, mask);
  return t.softmax_xent(logits, targets);
}

// Greedy decoding: lowest id wins ties, stops at </s> or decode_max.
inline std::string fid_read(const ReadBatch& batch, const ModelParams& params,
                            const ModelConfig& cfg, const amr::Vocabulary& vocab) {
  if (batch.passages.empty()) throw EmptyPassageList("reader needs at least one passage");
  Tape t;
  const BoundParams bp = nn::bind_params(t, params);
  std::vector<PreparedExample> pairs;
  pairs.reserve(batch.passages.size());
  for (const QPExample& e : batch.passages) pairs.push_back(prepare_example(e, cfg, vocab));
  const Tape::Id memory = fid_memory(t, bp, cfg, pairs);
  std::vector<int> ids{amr::Vocabulary::kBos};
  std::vector<int> generated;
  for (std::size_t step = 0; step < cfg.decode_max; ++step) {
    const Tensor mask = causal_mask(ids.size());
    const Tape::Id y = decoder_input(t, bp, cfg, ids);
    const Tape::Id logits = decoder_logits(t, y, memory, bp, cfg, mask);
    const Tensor& lv = t.val(logits);
    const std::size_t last = lv.rows() - 1;
    int best = 0;
    double best_score = lv.at(last, 0);
    for (std::size_t v = 1; v < lv.cols(); ++v) {
      if (lv.at(last, v) > best_score) {
        best_score = lv.at(last, v);
        best = static_cast<int>(v);
      }
    }
    if (best == amr::Vocabulary::kEos) break;
    generated.push_back(best);
    ids.push_back(best);
  }
  return vocab.decode(generated);
}

struct ReaderTrainStats {
  std::vector<double> losses;    // one entry per step
  std::vector<double> dev_em;    // per evaluation point
  std::size_t best_step = 0;
  double best_dev_em = -1.0;
};

inline double evaluate_reader_em(const std::vector<pipeline::DatasetRecord>& records,
                                 const ModelParams& params, const ModelConfig& cfg,
                                 const amr::Vocabulary& vocab, bool use_paraphrased = false) {
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const pipeline::DatasetRecord& r : records) {
    const ReadBatch batch = make_read_batch(r, cfg.n2, use_paraphrased);
    const std::string prediction = fid_read(batch, params, cfg, vocab);
    total += eval::exact_match(prediction, r.answers);
  }
  return total / static_cast<double>(records.size());
}

// One optimizer step per question, cycling in seeded shuffled order.
// Dev EM is the pivot metric, evaluated every eval_every steps.
inline ReaderTrainStats train_reader(const std::vector<pipeline::DatasetRecord>& train,
                                     const std::vector<pipeline::DatasetRecord>& dev,
                                     ModelParams& params, const ModelConfig& cfg,
                                     const amr::Vocabulary& vocab) {
  struct Prepared {
    std::vector<PreparedExample> pairs;
    std::vector<int> answer_ids;
  };
  std::vector<Prepared> questions;
  for (const pipeline::DatasetRecord& r : train) {
    if (r.answers.empty() || r.passages.empty()) continue;
    Prepared p;
    const ReadBatch batch = make_read_batch(r, cfg.n2);
    for (const QPExample& e : batch.passages) p.pairs.push_back(prepare_example(e, cfg, vocab));
    p.answer_ids = vocab.encode(r.answers.front());
    questions.push_back(std::move(p));
  }
  if (questions.empty()) throw NoTrainableQuestions("no readable training questions");

  ReaderTrainStats stats;
  nn::AdamOptimizer opt({cfg.lr});
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order;
  std::size_t cursor = 0;
  ModelParams best;
  for (std::size_t step = 1; step <= cfg.read_steps; ++step) {
    if (cursor == order.size()) {
      order.resize(questions.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    const Prepared& q = questions[order[cursor++]];
    Tape t;
    const BoundParams bp = nn::bind_params(t, params);
    const Tape::Id loss = reader_loss_node(t, bp, cfg, q.pairs, q.answer_ids);
    stats.losses.push_back(t.val(loss).scalar());
    t.backward(loss);
    opt.step(params, nn::collect_grads(t, bp));
    if (!dev.empty() && (step % cfg.eval_every == 0 || step == cfg.read_steps)) {
      const double em = evaluate_reader_em(dev, params, cfg, vocab);
      stats.dev_em.push_back(em);
      if (em > stats.best_dev_em) {
        stats.best_dev_em = em;
        stats.best_step = step;
        best = params;
      }
    }
  }
  if (!dev.empty() && !best.empty()) params = best;
  return stats;
}

}  // namespace gstqa::models
