#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gstqa::amr {

enum class NodeKind {
  Variable,     // (x / concept)
  StringConst,  // "Stephen Curry"
  SymbolConst,  // bare constants: 4, -, imperative
};

struct AmrNode {
  std::string id;       // variable name, or generated id for constants
  std::string concept_label;  // surface concept, without quotes
  NodeKind kind = NodeKind::Variable;
  std::vector<int> token_ids;  // filled by tokenize_graph
};

struct AmrEdge {
  std::string head;
  std::string relation;  // begins with ':'
  std::string tail;
  std::vector<int> relation_token_ids;  // filled by tokenize_graph
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AmrGraph {
  std::vector<AmrNode> nodes;  // parse order (depth-first from root)
  std::vector<AmrEdge> edges;  // parse order; ":same" links appended last
  std::string root;

  const AmrNode* find(const std::string& id) const {
    for (const AmrNode& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }

  bool has_edge(const std::string& head, const std::string& rel, const std::string& tail) const {
    for (const AmrEdge& e : edges)
      if (e.head == head && e.relation == rel && e.tail == tail) return true;
    return false;
  }
};

// Structural validity: unique node ids, resolvable edges, root present,
// roles start with ':', no duplicate (head, relation, tail) triples,
// undirected connectivity from the root.
inline void validate(const AmrGraph& g) {
  if (g.nodes.empty()) throw GraphError("graph has no nodes");
  std::set<std::string> ids;
  for (const AmrNode& n : g.nodes) {
    if (n.concept_label.empty()) throw GraphError("node '" + n.id + "' has empty concept");
    if (!ids.insert(n.id).second) throw GraphError("duplicate node id '" + n.id + "'");
  }
  if (!ids.count(g.root)) throw GraphError("root '" + g.root + "' is not a node");
  std::set<std::array<std::string, 3>> triples;
  std::map<std::string, std::vector<std::string>> adj;
  for (const AmrEdge& e : g.edges) {
    if (e.relation.empty() || e.relation[0] != ':')
      throw GraphError("relation '" + e.relation + "' must begin with ':'");
    if (!ids.count(e.head) || !ids.count(e.tail))
      throw GraphError("edge endpoint missing: " + e.head + " " + e.relation + " " + e.tail);
    if (!triples.insert({e.head, e.relation, e.tail}).second)
      throw GraphError("duplicate edge " + e.head + " " + e.relation + " " + e.tail);
    adj[e.head].push_back(e.tail);
    adj[e.tail].push_back(e.head);
  }
  std::set<std::string> seen{g.root};
  std::vector<std::string> stack{g.root};
  while (!stack.empty()) {
    const std::string cur = stack.back();
    stack.pop_back();
    for (const std::string& next : adj[cur])
      if (seen.insert(next).second) stack.push_back(next);
  }
  if (seen.size() != ids.size()) throw GraphError("graph is not connected");
}

// Removes one trailing "-<digits>" sense tag; other hyphens are kept.
// Idempotent, identity on non-matching input.
inline std::string strip_sense_suffix(const std::string& label) {
  const std::size_t dash = label.rfind('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == label.size()) return label;
  for (std::size_t i = dash + 1; i < label.size(); ++i)
    if (label[i] < '0' || label[i] > '9') return label;
  return label.substr(0, dash);
}

inline void strip_sense_suffixes(AmrGraph& g) {
  for (AmrNode& n : g.nodes)
    if (n.kind == NodeKind::Variable) n.concept_label = strip_sense_suffix(n.concept_label);
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Entity test used for ":same" linking: quoted string constants, concepts
// ending in -entity/-quantity, and nodes carrying a :name edge.
inline bool is_entity_node(const AmrGraph& g, const AmrNode& n) {
  if (n.kind == NodeKind::StringConst) return true;
  if (ends_with(n.concept_label, "-entity") || ends_with(n.concept_label, "-quantity")) return true;
  for (const AmrEdge& e : g.edges)
    if (e.relation == ":name" && e.head == n.id) return true;
  return false;
}

// Adds one ":same" edge per unordered pair of distinct entity nodes with
// equal surface concept; the head is the node earlier in parse order.
// Idempotent; node set is never changed.
inline AmrGraph link_same_entities(AmrGraph g) {
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!is_entity_node(g, g.nodes[i])) continue;
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      if (!is_entity_node(g, g.nodes[j])) continue;
      if (g.nodes[i].concept_label != g.nodes[j].concept_label) continue;
      if (!g.has_edge(g.nodes[i].id, ":same", g.nodes[j].id))
        g.edges.push_back({g.nodes[i].id, ":same", g.nodes[j].id, {}});
    }
  }
  return g;
}

}  // namespace gstqa::amr
