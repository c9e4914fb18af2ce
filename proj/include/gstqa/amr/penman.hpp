#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gstqa/amr/graph.hpp"

namespace gstqa::amr {

enum class PenmanErrorKind {
  EmptyInput,
  UnbalancedParens,
  DuplicateVariableDefinition,
  DanglingReference,
  DisconnectedGraph,
};

class PenmanError : public GraphError {
 public:
  PenmanError(PenmanErrorKind kind, std::size_t line, std::size_t col, const std::string& detail)
      : GraphError(kind_name(kind) + " at " + std::to_string(line) + ":" + std::to_string(col) +
                   ": " + detail),
        kind_(kind), line_(line), col_(col) {}

  PenmanErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

  static std::string kind_name(PenmanErrorKind k) {
    switch (k) {
      case PenmanErrorKind::EmptyInput: return "EmptyInput";
      case PenmanErrorKind::UnbalancedParens: return "UnbalancedParens";
      case PenmanErrorKind::DuplicateVariableDefinition: return "DuplicateVariableDefinition";
      case PenmanErrorKind::DanglingReference: return "DanglingReference";
      case PenmanErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    }
    return "PenmanError";
  }

 private:
  PenmanErrorKind kind_;
  std::size_t line_;
  std::size_t col_;
};

namespace detail {

enum class TokType { LParen, RParen, Slash, Role, Str, Symbol, End };

struct Token {
  TokType type;
  std::string text;  // role without ':', string without quotes, symbol verbatim
  std::size_t line = 1;
  std::size_t col = 1;
};

inline bool symbol_char(char c) {
  return !(std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '/' ||
           c == '"' || c == ':');
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      const std::size_t line = line_, col = col_;
      const char c = text_[pos_];
      if (c == '(') {
        advance();
        out.push_back({TokType::LParen, "(", line, col});
      } else if (c == ')') {
        advance();
        out.push_back({TokType::RParen, ")", line, col});
      } else if (c == '/') {
        advance();
        out.push_back({TokType::Slash, "/", line, col});
      } else if (c == ':') {
        advance();
        std::string role;
        while (pos_ < text_.size() && symbol_char(text_[pos_])) {
          role += text_[pos_];
          advance();
        }
        if (role.empty())
          throw PenmanError(PenmanErrorKind::UnbalancedParens, line, col, "bare ':' without role");
        out.push_back({TokType::Role, role, line, col});
      } else if (c == '"') {
        advance();
        std::string s;
        bool closed = false;
        while (pos_ < text_.size()) {
          const char d = text_[pos_];
          if (d == '\\' && pos_ + 1 < text_.size()) {
            advance();
            s += text_[pos_];
            advance();
          } else if (d == '"') {
            advance();
            closed = true;
            break;
          } else {
            s += d;
            advance();
          }
        }
        if (!closed)
          throw PenmanError(PenmanErrorKind::UnbalancedParens, line, col, "unterminated string");
        out.push_back({TokType::Str, s, line, col});
      } else {
        std::string sym;
        while (pos_ < text_.size() && symbol_char(text_[pos_])) {
          sym += text_[pos_];
          advance();
        }
        out.push_back({TokType::Symbol, sym, line, col});
      }
    }
    out.push_back({TokType::End, "", line_, col_});
    return out;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Short lowercase tokens look like variables; an undefined one is a
// dangling reference rather than a constant.
inline bool looks_like_variable(const std::string& s) {
  if (s.empty() || s.size() > 4) return false;
  std::size_t i = 0;
  while (i < s.size() && s[i] >= 'a' && s[i] <= 'z') ++i;
  if (i == 0) return false;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  return i == s.size();
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AmrGraph run() {
    collect_definitions();
    AmrGraph g;
    const std::string root = parse_node(g);
    g.root = root;
    if (peek().type != TokType::End)
      throw PenmanError(PenmanErrorKind::UnbalancedParens, peek().line, peek().col,
                        "unexpected content after graph");
    return g;
  }

 private:
  // First pass: every "( symbol /" introduces a variable.
  void collect_definitions() {
    for (std::size_t i = 0; i + 2 < toks_.size(); ++i)
      if (toks_[i].type == TokType::LParen && toks_[i + 1].type == TokType::Symbol &&
          toks_[i + 2].type == TokType::Slash)
        defined_.insert(toks_[i + 1].text);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  const Token& expect(TokType type, const char* what) {
    const Token& t = peek();
    if (t.type != type)
      throw PenmanError(PenmanErrorKind::UnbalancedParens, t.line, t.col,
                        std::string("expected ") + what);
    return take();
  }

  std::string fresh_const_id(AmrGraph& g) {
    while (true) {
      std::string id = "c" + std::to_string(const_counter_++);
      if (!defined_.count(id) && g.find(id) == nullptr) return id;
    }
  }

  // Parses "( var / concept (:role target)* )" and returns the variable.
  std::string parse_node(AmrGraph& g) {
    expect(TokType::LParen, "'('");
    const Token& var = expect(TokType::Symbol, "variable name");
    if (!created_.insert(var.text).second)
      throw PenmanError(PenmanErrorKind::DuplicateVariableDefinition, var.line, var.col,
                        "variable '" + var.text + "' defined twice");
    expect(TokType::Slash, "'/'");
    const Token& label = take();
    if (label.type != TokType::Symbol && label.type != TokType::Str)
      throw PenmanError(PenmanErrorKind::UnbalancedParens, label.line, label.col,
                        "expected concept after '/'");
    g.nodes.push_back({var.text, label.text,
                       label.type == TokType::Str ? NodeKind::StringConst : NodeKind::Variable,
                       {}});
    while (peek().type == TokType::Role) {
      const Token role = take();
      const std::string target = parse_target(g);
      add_edge(g, var.text, role.text, target);
    }
    expect(TokType::RParen, "')'");
    return var.text;
  }

  std::string parse_target(AmrGraph& g) {
    const Token& t = peek();
    switch (t.type) {
      case TokType::LParen:
        return parse_node(g);
      case TokType::Str: {
        take();
        const std::string id = fresh_const_id(g);
        g.nodes.push_back({id, t.text, NodeKind::StringConst, {}});
        return id;
      }
      case TokType::Symbol: {
        take();
        if (defined_.count(t.text)) return t.text;  // re-entrant reference
        if (looks_like_variable(t.text))
          throw PenmanError(PenmanErrorKind::DanglingReference, t.line, t.col,
                            "reference to undefined variable '" + t.text + "'");
        const std::string id = fresh_const_id(g);
        g.nodes.push_back({id, t.text, NodeKind::SymbolConst, {}});
        return id;
      }
      default:
        throw PenmanError(PenmanErrorKind::UnbalancedParens, t.line, t.col,
                          "expected role target");
    }
  }

  // Inverse roles ":R-of" are normalized to forward ":R" with endpoints
  // swapped. Duplicate triples collapse silently.
  void add_edge(AmrGraph& g, const std::string& parent, const std::string& role,
                const std::string& child) {
    std::string rel = ":" + role;
    std::string head = parent, tail = child;
    if (role.size() > 3 && role.compare(role.size() - 3, 3, "-of") == 0) {
      rel = ":" + role.substr(0, role.size() - 3);
      std::swap(head, tail);
    }
    if (!g.has_edge(head, rel, tail)) g.edges.push_back({head, rel, tail, {}});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> defined_;  // from pass one
  std::set<std::string> created_;
  int const_counter_ = 0;
};

}  // namespace detail

inline AmrGraph parse_penman(const std::string& text) {
  bool blank = true;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) throw PenmanError(PenmanErrorKind::EmptyInput, 1, 1, "no graph in input");
  detail::Lexer lexer(text);
  detail::Parser parser(lexer.run());
  AmrGraph g = parser.run();
  validate(g);
  return g;
}

namespace detail {

inline bool needs_quotes(const AmrNode& n) { return n.kind == NodeKind::StringConst; }

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

struct EmitEdge {
  std::string role;  // with "-of" already applied when traversed backwards
  std::size_t edge_index;
  std::string child;
};

class Serializer {
 public:
  explicit Serializer(const AmrGraph& g) : g_(g) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index_[g.nodes[i].id] = i;
    incident_.resize(g.nodes.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      incident_[index_.at(g.edges[e].head)].push_back(e);
      incident_[index_.at(g.edges[e].tail)].push_back(e);
    }
    assign_names();
  }

  std::string run() {
    used_.assign(g_.edges.size(), false);
    std::ostringstream out;
    emit_node(g_.root, out);
    for (bool u : used_)
      if (!u)
        throw PenmanError(PenmanErrorKind::DisconnectedGraph, 1, 1,
                          "graph not reachable from root '" + g_.root + "'");
    if (emitted_.size() != g_.nodes.size())
      throw PenmanError(PenmanErrorKind::DisconnectedGraph, 1, 1,
                        "graph not reachable from root '" + g_.root + "'");
    return out.str();
  }

 private:
  // Constants referenced more than once, or acting as edge heads, must be
  // promoted to "(k / \"text\")" form so they can be referenced by name.
  void assign_names() {
    std::set<std::string> taken;
    for (const AmrNode& n : g_.nodes)
      if (n.kind == NodeKind::Variable) taken.insert(n.id);
    int next = 0;
    for (const AmrNode& n : g_.nodes) {
      if (n.kind == NodeKind::Variable) {
        name_[n.id] = n.id;
        promoted_.insert(n.id);
        continue;
      }
      std::size_t degree = incident_[index_.at(n.id)].size();
      bool heads_edge = false;
      for (std::size_t e : incident_[index_.at(n.id)])
        if (g_.edges[e].head == n.id) heads_edge = true;
      if (degree > 1 || heads_edge || n.id == g_.root) {
        std::string candidate;
        do {
          candidate = "k" + std::to_string(next++);
        } while (taken.count(candidate));
        taken.insert(candidate);
        name_[n.id] = candidate;
        promoted_.insert(n.id);
      }
    }
  }

  const AmrNode& node(const std::string& id) const { return g_.nodes[index_.at(id)]; }

  std::string concept_text(const AmrNode& n) const {
    return needs_quotes(n) ? quoted(n.concept_label) : n.concept_label;
  }

  void emit_node(const std::string& id, std::ostringstream& out) {
    const AmrNode& n = node(id);
    emitted_.insert(id);
    out << "(" << name_.at(id) << " / " << concept_text(n);
    std::vector<EmitEdge> children;
    for (std::size_t e : incident_[index_.at(id)]) {
      if (used_[e]) continue;
      const AmrEdge& edge = g_.edges[e];
      if (edge.head == id)
        children.push_back({edge.relation, e, edge.tail});
      else
        children.push_back({edge.relation + "-of", e, edge.head});
    }
    std::sort(children.begin(), children.end(), [this](const EmitEdge& a, const EmitEdge& b) {
      if (a.role != b.role) return a.role < b.role;
      const std::string& ca = node(a.child).concept_label;
      const std::string& cb = node(b.child).concept_label;
      if (ca != cb) return ca < cb;
      return a.child < b.child;
    });
    for (const EmitEdge& c : children) {
      if (used_[c.edge_index]) continue;
      used_[c.edge_index] = true;
      out << " " << c.role << " ";
      const AmrNode& child = node(c.child);
      if (emitted_.count(c.child)) {
        out << name_.at(c.child);  // re-entrant reference
      } else if (child.kind != NodeKind::Variable && !promoted_.count(c.child)) {
        emitted_.insert(c.child);
        out << concept_text(child);
      } else {
        emit_node(c.child, out);
      }
    }
    out << ")";
  }

  const AmrGraph& g_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> incident_;
  std::map<std::string, std::string> name_;
  std::set<std::string> promoted_;
  std::set<std::string> emitted_;
  std::vector<bool> used_;
};

}  // namespace detail

// Deterministic emitter: children in alphabetical role order, re-entrancies
// as variable references. parse_penman(serialize_penman(g)) is isomorphic
// to g up to variable renaming.
inline std::string serialize_penman(const AmrGraph& g) {
  validate(g);
  detail::Serializer ser(g);
  return ser.run();
}

// PENMAN files hold one graph per record, records separated by blank lines.
inline std::vector<std::string> split_penman_records(const std::string& text) {
  std::vector<std::string> records;
  std::string current;
  std::istringstream in(text);
  std::string line;
  auto flush = [&]() {
    bool blank = true;
    for (char c : current)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) records.push_back(current);
    current.clear();
  };
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank)
      flush();
    else
      current += line + "\n";
  }
  flush();
  return records;
}

inline std::vector<AmrGraph> load_penman_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open PENMAN file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<AmrGraph> graphs;
  for (const std::string& record : split_penman_records(buf.str()))
    graphs.push_back(parse_penman(record));
  return graphs;
}

}  // namespace gstqa::amr
