#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gstqa/amr/vocab.hpp"
#include "gstqa/models/example.hpp"
#include "gstqa/pipeline/dataset.hpp"

namespace gstqa::pipeline {

struct GenSpec {
  std::size_t train_questions = 200;
  std::size_t dev_questions = 50;
  std::size_t test_questions = 100;
  std::size_t passages_per_question = 8;
  bool graph_only = false;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> dev;
  std::vector<DatasetRecord> test;
};

namespace detail {

inline std::string random_word(std::mt19937_64& rng) {
  static const char* syllables[] = {"ka", "mor", "vel", "tu", "ri", "son", "ba", "len",
                                    "dor", "mi", "sha", "ro", "pel", "na", "qui", "ver"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(syllables) - 1);
  std::uniform_int_distribution<int> extra(2, 3);
  std::string w;
  const int n = extra(rng);
  for (int i = 0; i < n; ++i) w += syllables[pick(rng)];
  return w;
}

inline std::string capitalize(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

inline std::string random_entity(std::mt19937_64& rng) {
  return capitalize(random_word(rng)) + " " + capitalize(random_word(rng));
}

inline std::string random_event(std::mt19937_64& rng) {
  static const char* kinds[] = {"cup", "trophy", "open", "derby"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kinds) - 1);
  return random_word(rng) + " " + kinds[pick(rng)];
}

inline std::string question_graph(const std::string& event) {
  return "(w / win-01 :ARG0 (u / amr-unknown) :ARG1 (e / \"" + event + "\"))";
}

inline std::string pair_graph(const std::string& event, const std::string& snt2) {
  return "(m / multi-sentence :snt1 " + question_graph(event) + " :snt2 " + snt2 + ")";
}

// Standard mode: positive passages contain the answer string, negatives
// never do, and graphs mirror the texts.
inline DatasetRecord standard_record(std::mt19937_64& rng, std::size_t passages) {
  DatasetRecord r;
  const std::string event = random_event(rng);
  const std::string winner = random_entity(rng);
  r.question = "who won the " + event + " ?";
  r.paraphrased_question = "which competitor won the " + event + " ?";
  r.answers = {winner};

  struct Draft {
    std::string title, text, penman;
  };
  std::vector<Draft> drafts;
  std::uniform_int_distribution<std::size_t> pos_at(0, passages - 1);
  const std::size_t pos_idx = pos_at(rng);
  for (std::size_t i = 0; i < passages; ++i) {
    if (i == pos_idx) {
      Draft d;
      d.title = event + " history";
      d.text = "the " + event + " was won by " + winner + " after a strong final .";
      d.penman = pair_graph(event, "(w2 / win-01 :ARG0 (a / \"" + winner + "\") :ARG1 (e2 / \"" +
                                       event + "\"))");
      drafts.push_back(std::move(d));
    } else {
      std::string b = random_entity(rng), c = random_entity(rng);
      while (b == winner) b = random_entity(rng);
      while (c == winner || c == b) c = random_entity(rng);
      Draft d;
      d.title = event + " notes";
      d.text = "the " + event + " drew large crowds when " + b + " faced " + c +
               " in the final .";
      d.penman = pair_graph(event, "(f / face-01 :ARG0 (b / \"" + b + "\") :ARG1 (c / \"" + c +
                                       "\") :time (e2 / \"" + event + "\"))");
      drafts.push_back(std::move(d));
    }
  }
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    PassageRecord p;
    p.title = drafts[i].title;
    p.text = drafts[i].text;
    p.penman = drafts[i].penman;
    p.retrieval_rank = static_cast<int>(i + 1);
    r.passages.push_back(std::move(p));
  }
  return r;
}

// Graph-only mode: all passages of a question share one text; the pair
// graphs differ in the direction of the winner's :ARG0 edge, and labels
// are assigned by construction.
inline DatasetRecord graph_only_record(std::mt19937_64& rng, std::size_t passages) {
  DatasetRecord r;
  const std::string event = random_event(rng);
  const std::string winner = random_entity(rng);
  std::string other = random_entity(rng);
  while (other == winner) other = random_entity(rng);
  r.question = "who won the " + event + " ?";
  r.paraphrased_question = "which competitor won the " + event + " ?";
  r.answers = {winner};
  const std::string shared_text =
      "the " + event + " final featured " + winner + " and " + other + " .";
  std::uniform_int_distribution<std::size_t> pos_at(0, passages - 1);
  const std::size_t pos_idx = pos_at(rng);
  std::size_t neg_counter = 0;
  for (std::size_t i = 0; i < passages; ++i) {
    PassageRecord p;
    p.title = event;
    p.text = shared_text;
    p.retrieval_rank = static_cast<int>(i + 1);
    if (i == pos_idx) {
      p.positive = true;
      p.penman = pair_graph(event, "(w2 / win-01 :ARG0 (a / \"" + winner + "\") :ARG1 (e2 / \"" +
                                       event + "\"))");
    } else {
      p.positive = false;
      // the :ARG0 edge is always inverted; every second negative also
      // inverts :ARG1
      const bool flip_arg1 = (neg_counter++ % 2) == 1;
      p.penman = pair_graph(
          event, flip_arg1 ? "(w2 / win-01 :ARG0-of (a / \"" + winner + "\") :ARG1-of (e2 / \"" +
                                 event + "\"))"
                           : "(w2 / win-01 :ARG0-of (a / \"" + winner + "\") :ARG1 (e2 / \"" +
                                 event + "\"))");
    }
    r.passages.push_back(std::move(p));
  }
  return r;
}

}  // namespace detail

// Deterministic by seed: equal seeds give byte-identical corpora.
inline SyntheticCorpus gen_synthetic_corpus(const GenSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  SyntheticCorpus corpus;
  auto make = [&](std::size_t count, std::vector<DatasetRecord>& out) {
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(spec.graph_only ? detail::graph_only_record(rng, spec.passages_per_question)
                                    : detail::standard_record(rng, spec.passages_per_question));
  };
  make(spec.train_questions, corpus.train);
  make(spec.dev_questions, corpus.dev);
  make(spec.test_questions, corpus.test);
  return corpus;
}

// Vocabulary corpus: all surface text plus normalized graph concepts and
// the role inventory.
inline amr::Vocabulary build_vocab_from_records(const std::vector<DatasetRecord>& records,
                                                std::size_t min_freq = 1,
                                                std::size_t max_size = 4096) {
  std::vector<std::string> lines;
  std::set<std::string> roles{":same"};
  for (const DatasetRecord& r : records) {
    lines.push_back(r.question);
    if (r.paraphrased_question) lines.push_back(*r.paraphrased_question);
    for (const std::string& a : r.answers) lines.push_back(a);
    for (const PassageRecord& p : r.passages) {
      lines.push_back(p.title);
      lines.push_back(p.text);
      if (p.penman) {
        const amr::AmrGraph g = models::normalize_graph(*p.penman);
        for (const amr::AmrNode& n : g.nodes) lines.push_back(n.concept_label);
        for (const amr::AmrEdge& e : g.edges) roles.insert(e.relation);
      }
    }
  }
  return amr::Vocabulary::build(lines, {roles.begin(), roles.end()}, min_freq, max_size);
}

}  // namespace gstqa::pipeline
