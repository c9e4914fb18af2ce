#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gstqa/amr/graph.hpp"
#include "gstqa/amr/vocab.hpp"

namespace gstqa::amr {

struct EdgeTokenTriple {
  std::vector<int> head;
  std::vector<int> relation;
  std::vector<int> tail;
};

struct TokenizedGraph {
  std::vector<std::vector<int>> node_tokens;  // one sequence per kept node
  std::vector<EdgeTokenTriple> edge_tokens;   // one triple per kept edge
  std::vector<std::size_t> kept_nodes;        // indices into graph.nodes
  std::vector<std::size_t> kept_edges;        // indices into graph.edges
};

// Relation labels are single vocabulary units when present; unseen labels
// fall back to subword encoding.
inline std::vector<int> relation_token_ids(const Vocabulary& vocab, const std::string& relation) {
  const int unit = vocab.id(relation);
  if (unit >= 0) return {unit};
  return vocab.encode(relation);
}

// Tokenizes node concepts and edge (head, relation, tail) labels. When the
// graph exceeds node_max/edge_max, elements are kept in depth-first parse
// order from the root, which is the order the containers already carry.
inline TokenizedGraph tokenize_graph(AmrGraph& graph, const Vocabulary& vocab,
                                     std::size_t node_max, std::size_t edge_max) {
  TokenizedGraph out;
  std::vector<std::vector<int>> concept_ids(graph.nodes.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    concept_ids[i] = vocab.encode(graph.nodes[i].concept_label);
    graph.nodes[i].token_ids = concept_ids[i];
  }
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) by_id[graph.nodes[i].id] = i;

  const std::size_t n_keep = std::min(node_max, graph.nodes.size());
  for (std::size_t i = 0; i < n_keep; ++i) {
    out.node_tokens.push_back(concept_ids[i]);
    out.kept_nodes.push_back(i);
  }
  const std::size_t e_keep = std::min(edge_max, graph.edges.size());
  for (std::size_t e = 0; e < e_keep; ++e) {
    AmrEdge& edge = graph.edges[e];
    edge.relation_token_ids = relation_token_ids(vocab, edge.relation);
    out.edge_tokens.push_back({concept_ids[by_id.at(edge.head)], edge.relation_token_ids,
                               concept_ids[by_id.at(edge.tail)]});
    out.kept_edges.push_back(e);
  }
  return out;
}

inline TokenizedGraph tokenize_graph(const AmrGraph& graph, const Vocabulary& vocab,
                                     std::size_t node_max, std::size_t edge_max) {
  AmrGraph copy = graph;
  return tokenize_graph(copy, vocab, node_max, edge_max);
}

}  // namespace gstqa::amr
