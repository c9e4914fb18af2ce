#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gstqa/amr/penman.hpp"
#include "gstqa/amr/tokenize.hpp"
#include "gstqa/amr/vocab.hpp"
#include "gstqa/eval/metrics.hpp"
#include "gstqa/models/config.hpp"
#include "gstqa/pipeline/dataset.hpp"

namespace gstqa::models {

class MissingGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QPExample {
  std::string question;
  std::string title;
  std::string text;
  int label = 0;
  std::optional<std::string> penman;
  std::string formatted;  // "Question: .. Title: .. Context: .."
};

// One QPExample per passage. Labels come from the record's constructed
// flags when present, else from answer containment.
inline std::vector<QPExample> make_examples(const pipeline::DatasetRecord& record,
                                            bool use_paraphrased = false) {
  const std::string& q = use_paraphrased && record.paraphrased_question
                             ? *record.paraphrased_question
                             : record.question;
  std::vector<QPExample> out;
  out.reserve(record.passages.size());
  for (const pipeline::PassageRecord& p : record.passages) {
    QPExample e;
    e.question = q;
    e.title = p.title;
    e.text = p.text;
    e.penman = p.penman;
    e.formatted = pipeline::format_input(q, p.title, p.text);
    e.label = p.positive ? (*p.positive ? 1 : 0)
                         : (eval::passage_is_positive(p.text, record.answers) ? 1 : 0);
    out.push_back(std::move(e));
  }
  return out;
}

// Parse, strip sense suffixes, link same-surface entities.
inline amr::AmrGraph normalize_graph(const std::string& penman) {
  amr::AmrGraph g = amr::parse_penman(penman);
  amr::strip_sense_suffixes(g);
  return amr::link_same_entities(std::move(g));
}

// Combined flatten stream: the whole text, then as much of the graph
// stream as fits in `budget` positions; the graph tail is dropped first.
inline std::vector<int> truncate_flatten(const std::vector<int>& text_ids,
                                         const std::vector<int>& graph_ids, std::size_t budget) {
  std::vector<int> out;
  for (std::size_t i = 0; i < text_ids.size() && out.size() < budget; ++i)
    out.push_back(text_ids[i]);
  for (std::size_t i = 0; i < graph_ids.size() && out.size() < budget; ++i)
    out.push_back(graph_ids[i]);
  return out;
}

// Exact (case-folded) substring match of each node concept against the
// formatted text, mapped to token spans. Unmatched nodes get (-1, -1).
inline std::vector<std::pair<long, long>> align_nodes(const amr::AmrGraph& graph,
                                                      const std::string& formatted,
                                                      const amr::Vocabulary& vocab) {
  auto fold = [](const std::string& s) {
    std::string out = s;
    for (char& c : out)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string hay = fold(formatted);
  const std::vector<amr::Vocabulary::Span> spans = vocab.encode_spans(formatted);
  std::vector<std::pair<long, long>> out;
  out.reserve(graph.nodes.size());
  for (const amr::AmrNode& n : graph.nodes) {
    const std::string needle = fold(n.concept_label);
    const std::size_t pos = needle.empty() ? std::string::npos : hay.find(needle);
    if (pos == std::string::npos) {
      out.emplace_back(-1, -1);
      continue;
    }
    long first = -1, last = -1;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (spans[i].end > pos && spans[i].begin < pos + needle.size()) {
        if (first < 0) first = static_cast<long>(i);
        last = static_cast<long>(i);
      }
    }
    if (first < 0)
      out.emplace_back(-1, -1);
    else
      out.emplace_back(first, last + 1);  // half-open token span
  }
  return out;
}

struct PreparedExample {
  QPExample example;
  std::vector<int> text_ids;  // BOS + formatted tokens, capped at text_max
  std::optional<amr::TokenizedGraph> graph_tokens;       // gst modes
  std::optional<amr::AmrGraph> graph;                    // rgcn / flatten
  std::vector<int> flat_ids;                             // flatten stream, no BOS
  std::vector<std::pair<long, long>> node_spans;         // rgcn alignment
};

// Mode-specific preprocessing done once per example; forward passes are
// pure functions of the result.
inline PreparedExample prepare_example(const QPExample& e, const ModelConfig& cfg,
                                       const amr::Vocabulary& vocab) {
  PreparedExample p;
  p.example = e;
  std::vector<int> toks = vocab.encode(e.formatted);
  p.text_ids.push_back(amr::Vocabulary::kBos);
  for (int id : toks) {
    if (p.text_ids.size() >= cfg.text_max) break;
    p.text_ids.push_back(id);
  }
  if (uses_gst(cfg.mode)) {
    if (!e.penman) throw MissingGraph("gst mode requires a PENMAN graph for every passage");
    amr::AmrGraph g = normalize_graph(*e.penman);
    p.graph_tokens = amr::tokenize_graph(g, vocab, cfg.node_max, cfg.edge_max);
    p.graph = std::move(g);
  } else if (cfg.mode == Mode::Rgcn) {
    if (e.penman) {
      amr::AmrGraph g = normalize_graph(*e.penman);
      p.node_spans = align_nodes(g, e.formatted, vocab);
      p.graph = std::move(g);
    }
  } else if (cfg.mode == Mode::Flatten) {
    std::vector<int> graph_ids;
    if (e.penman) {
      const amr::AmrGraph g = normalize_graph(*e.penman);
      graph_ids = vocab.encode(" " + amr::serialize_penman(g));
    }
    p.flat_ids = truncate_flatten(toks, graph_ids, cfg.flatten_max);
  }
  return p;
}

}  // namespace gstqa::models
