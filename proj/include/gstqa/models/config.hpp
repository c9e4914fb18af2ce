#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gstqa::models {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Baseline, GstMlp, GstAttn, Rgcn, Flatten };

inline Mode mode_from_string(const std::string& s) {
  if (s == "baseline") return Mode::Baseline;
  if (s == "gst-mlp") return Mode::GstMlp;
  if (s == "gst-attn") return Mode::GstAttn;
  if (s == "rgcn") return Mode::Rgcn;
  if (s == "flatten") return Mode::Flatten;
  throw ConfigError("unknown mode: " + s);
}

inline std::string mode_to_string(Mode m) {
  switch (m) {
    case Mode::Baseline: return "baseline";
    case Mode::GstMlp: return "gst-mlp";
    case Mode::GstAttn: return "gst-attn";
    case Mode::Rgcn: return "rgcn";
    case Mode::Flatten: return "flatten";
  }
  return "baseline";
}

inline bool uses_gst(Mode m) { return m == Mode::GstMlp || m == Mode::GstAttn; }

struct ModelConfig {
  std::size_t d_h = 64;
  std::size_t enc_layers = 2;
  std::size_t dec_layers = 2;
  std::size_t heads = 4;
  std::size_t ffn_mult = 4;
  std::size_t text_max = 200;
  std::size_t node_max = 145;
  std::size_t edge_max = 165;
  std::size_t flatten_max = 1024;
  std::size_t n1 = 100;
  std::size_t n2 = 10;
  std::size_t n_pos = 1;
  std::size_t n_neg = 7;
  std::size_t rgcn_layers = 2;
  std::size_t decode_max = 16;
  std::size_t epochs = 10;
  std::size_t read_steps = 2000;
  std::size_t eval_every = 200;  // reader dev-eval cadence, in steps
  double lr = 3e-5;
  std::uint64_t seed = 7;
  Mode mode = Mode::Baseline;
  bool use_nodes = true;
  bool use_edges = true;

  void validate() const {
    if (d_h == 0 || d_h % heads != 0)
      throw ConfigError("d_h must be a positive multiple of heads");
    if (uses_gst(mode) && !use_nodes && !use_edges)
      throw ConfigError("gst mode requires use_nodes or use_edges");
    if (n2 < 1 || n1 < n2) throw ConfigError("need n1 >= n2 >= 1");
    if (text_max < 2) throw ConfigError("text_max too small");
  }
};

// Plain "key = value" lines; '#' starts a comment.
inline ModelConfig parse_config_text(const std::string& text) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      if (blank) continue;
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    auto as_size = [&](const std::string& v) -> std::size_t {
      try {
        return static_cast<std::size_t>(std::stoull(v));
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
      }
    };
    auto as_double = [&](const std::string& v) -> double {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
      }
    };
    auto as_bool = [&](const std::string& v) -> bool {
      if (v == "true" || v == "1") return true;
      if (v == "false" || v == "0") return false;
      throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
    };
    if (key == "d_h") cfg.d_h = as_size(value);
    else if (key == "enc_layers") cfg.enc_layers = as_size(value);
    else if (key == "dec_layers") cfg.dec_layers = as_size(value);
    else if (key == "heads") cfg.heads = as_size(value);
    else if (key == "ffn_mult") cfg.ffn_mult = as_size(value);
    else if (key == "text_max") cfg.text_max = as_size(value);
    else if (key == "node_max") cfg.node_max = as_size(value);
    else if (key == "edge_max") cfg.edge_max = as_size(value);
    else if (key == "flatten_max") cfg.flatten_max = as_size(value);
    else if (key == "n1") cfg.n1 = as_size(value);
    else if (key == "n2") cfg.n2 = as_size(value);
    else if (key == "n_pos") cfg.n_pos = as_size(value);
    else if (key == "n_neg") cfg.n_neg = as_size(value);
    else if (key == "rgcn_layers") cfg.rgcn_layers = as_size(value);
    else if (key == "decode_max") cfg.decode_max = as_size(value);
    else if (key == "epochs") cfg.epochs = as_size(value);
    else if (key == "read_steps") cfg.read_steps = as_size(value);
    else if (key == "eval_every") cfg.eval_every = as_size(value);
    else if (key == "lr") cfg.lr = as_double(value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_size(value));
    else if (key == "mode") cfg.mode = mode_from_string(value);
    else if (key == "use_nodes") cfg.use_nodes = as_bool(value);
    else if (key == "use_edges") cfg.use_edges = as_bool(value);
    else throw ConfigError("unknown config key: " + key);
  }
  cfg.validate();
  return cfg;
}

inline ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline std::string config_to_text(const ModelConfig& c) {
  std::ostringstream out;
  out << "d_h = " << c.d_h << "\n"
      << "enc_layers = " << c.enc_layers << "\n"
      << "dec_layers = " << c.dec_layers << "\n"
      << "heads = " << c.heads << "\n"
      << "ffn_mult = " << c.ffn_mult << "\n"
      << "text_max = " << c.text_max << "\n"
      << "node_max = " << c.node_max << "\n"
      << "edge_max = " << c.edge_max << "\n"
      << "flatten_max = " << c.flatten_max << "\n"
      << "n1 = " << c.n1 << "\n"
      << "n2 = " << c.n2 << "\n"
      << "n_pos = " << c.n_pos << "\n"
      << "n_neg = " << c.n_neg << "\n"
      << "rgcn_layers = " << c.rgcn_layers << "\n"
      << "decode_max = " << c.decode_max << "\n"
      << "epochs = " << c.epochs << "\n"
      << "read_steps = " << c.read_steps << "\n"
      << "eval_every = " << c.eval_every << "\n"
      << "lr = " << c.lr << "\n"
      << "seed = " << c.seed << "\n"
      << "mode = " << mode_to_string(c.mode) << "\n"
      << "use_nodes = " << (c.use_nodes ? "true" : "false") << "\n"
      << "use_edges = " << (c.use_edges ? "true" : "false") << "\n";
  return out.str();
}

inline void save_config(const ModelConfig& c, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write config: " + tmp.string());
    out << config_to_text(c);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gstqa::models
