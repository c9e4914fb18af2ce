#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gstqa::amr {

class VocabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic greedy longest-match subword vocabulary with byte
// fallback: every byte has a "<0xHH>" unit, so encoding never fails.
// Encoding walks the raw string and takes the longest plain token that
// prefixes the remaining text, else one byte unit. Decoding concatenates
// surfaces, so encode/decode round-trips any string. Immutable after
// construction and safe to share across threads.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  Vocabulary() = default;

  static Vocabulary from_tokens(std::vector<std::string> tokens) {
    Vocabulary v;
    v.tokens_ = std::move(tokens);
    v.rebuild_index();
    return v;
  }

  // Specials + byte units + the given extra tokens; handy for fixtures.
  static Vocabulary with_tokens(const std::vector<std::string>& extra) {
    std::vector<std::string> tokens = base_tokens();
    std::set<std::string> have(tokens.begin(), tokens.end());
    for (const std::string& t : extra)
      if (have.insert(t).second) tokens.push_back(t);
    return from_tokens(std::move(tokens));
  }

  // Builds specials + byte units + roles + frequent corpus words.
  static Vocabulary build(const std::vector<std::string>& corpus_lines,
                          const std::vector<std::string>& roles, std::size_t min_freq = 2,
                          std::size_t max_size = 4096) {
    std::vector<std::string> tokens = base_tokens();
    std::set<std::string> have(tokens.begin(), tokens.end());
    std::vector<std::string> sorted_roles(roles.begin(), roles.end());
    std::sort(sorted_roles.begin(), sorted_roles.end());
    sorted_roles.erase(std::unique(sorted_roles.begin(), sorted_roles.end()), sorted_roles.end());
    for (const std::string& r : sorted_roles)
      if (have.insert(r).second) tokens.push_back(r);

    std::map<std::string, std::size_t> freq;
    for (const std::string& line : corpus_lines) {
      std::istringstream in(line);
      std::string word;
      while (in >> word)
        if (!word.empty()) ++freq[word];
    }
    std::vector<std::pair<std::string, std::size_t>> by_count(freq.begin(), freq.end());
    std::stable_sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (const auto& [word, count] : by_count) {
      if (tokens.size() >= max_size) break;
      if (count < min_freq) break;
      if (have.insert(word).second) tokens.push_back(word);
    }
    return from_tokens(std::move(tokens));
  }

  static Vocabulary load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw VocabError("cannot open vocabulary: " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) tokens.push_back(line);
    while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
    return from_tokens(std::move(tokens));
  }

  // One token per line; the line number is the id.
  void save(const std::filesystem::path& path) const {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw VocabError("cannot write vocabulary: " + tmp.string());
      for (const std::string& t : tokens_) out << t << "\n";
    }
    std::filesystem::rename(tmp, path);
  }

  std::size_t size() const { return tokens_.size(); }

  int id(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& token(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
      throw VocabError("token id out of range: " + std::to_string(id));
    return tokens_[static_cast<std::size_t>(id)];
  }

  struct Span {
    int id;
    std::size_t begin;  // byte offsets into the encoded string
    std::size_t end;
  };

  std::vector<Span> encode_spans(std::string_view text) const {
    std::vector<Span> out;
    std::size_t i = 0;
    while (i < text.size()) {
      const std::size_t limit = std::min(max_plain_len_, text.size() - i);
      int hit = -1;
      std::size_t hit_len = 0;
      for (std::size_t len = limit; len >= 1; --len) {
        auto it = index_.find(std::string(text.substr(i, len)));
        if (it != index_.end() && plain_[static_cast<std::size_t>(it->second)]) {
          hit = it->second;
          hit_len = len;
          break;
        }
      }
      if (hit >= 0) {
        out.push_back({hit, i, i + hit_len});
        i += hit_len;
      } else {
        const unsigned char b = static_cast<unsigned char>(text[i]);
        if (byte_ids_[b] < 0)
          throw VocabError("no byte fallback unit for byte " + std::to_string(int(b)));
        out.push_back({byte_ids_[b], i, i + 1});
        ++i;
      }
    }
    return out;
  }

  std::vector<int> encode(std::string_view text) const {
    std::vector<int> ids;
    for (const Span& s : encode_spans(text)) ids.push_back(s.id);
    return ids;
  }

  std::string decode(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
      if (id == kPad || id == kBos || id == kEos) continue;
      const std::string& t = token(id);
      int byte = byte_value(t);
      if (byte >= 0)
        out += static_cast<char>(byte);
      else
        out += t;
    }
    return out;
  }

  bool is_byte(int id) const {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size() &&
           byte_value(tokens_[static_cast<std::size_t>(id)]) >= 0;
  }

 private:
  static std::vector<std::string> base_tokens() {
    std::vector<std::string> tokens = {"<pad>", "<s>", "</s>"};
    for (int b = 0; b < 256; ++b) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
      tokens.emplace_back(buf);
    }
    tokens.emplace_back(" ");
    return tokens;
  }

  static int byte_value(const std::string& t) {
    if (t.size() != 6 || t.compare(0, 3, "<0x") != 0 || t[5] != '>') return -1;
    auto hex = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      return -1;
    };
    const int hi = hex(t[3]), lo = hex(t[4]);
    if (hi < 0 || lo < 0) return -1;
    return hi * 16 + lo;
  }

  void rebuild_index() {
    index_.clear();
    plain_.assign(tokens_.size(), false);
    byte_ids_.assign(256, -1);
    max_plain_len_ = 1;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      const std::string& t = tokens_[i];
      if (!index_.emplace(t, static_cast<int>(i)).second)
        throw VocabError("duplicate vocabulary token: " + t);
      const int b = byte_value(t);
      if (b >= 0) {
        byte_ids_[static_cast<std::size_t>(b)] = static_cast<int>(i);
        continue;
      }
      if (t == "<pad>" || t == "<s>" || t == "</s>") continue;
      plain_[i] = true;
      max_plain_len_ = std::max(max_plain_len_, t.size());
    }
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  std::vector<bool> plain_;    // participates in longest-match over surface text
  std::vector<int> byte_ids_;  // byte value -> token id
  std::size_t max_plain_len_ = 1;
};

}  // namespace gstqa::amr
