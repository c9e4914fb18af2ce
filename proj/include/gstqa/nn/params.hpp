#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gstqa/nn/tape.hpp"
#include "gstqa/nn/tensor.hpp"

namespace gstqa::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Named trainable tensors. std::map keeps iteration (and therefore file
// layout and update order) deterministic.
using ModelParams = std::map<std::string, Tensor>;

// ---- checkpoint container: magic, count, then (name, shape, f64 data) ----
// Doubles are written little-endian; entries are sorted by name.

namespace detail {

inline void write_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_f64(std::ofstream& out, double d) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, 8);
  write_u64(out, bits);
}

inline double read_f64(std::ifstream& in) {
  const std::uint64_t bits = read_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace detail

inline constexpr char kCheckpointMagic[8] = {'G', 'S', 'T', 'C', 'K', 'P', 'T', '1'};

// Atomic write: temp file in the target directory, then rename.
inline void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + tmp.string());
    out.write(kCheckpointMagic, 8);
    detail::write_u64(out, params.size());
    for (const auto& [name, t] : params) {
      detail::write_u64(out, name.size());
      out.write(name.data(), static_cast<long>(name.size()));
      detail::write_u64(out, t.rows());
      detail::write_u64(out, t.cols());
      for (double d : t.data()) detail::write_f64(out, d);
    }
    if (!out) throw CheckpointError("short write to checkpoint: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw CheckpointError("bad checkpoint magic in " + path.string());
  const std::uint64_t count = detail::read_u64(in);
  ModelParams params;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t name_len = detail::read_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<long>(name_len));
    const std::uint64_t rows = detail::read_u64(in);
    const std::uint64_t cols = detail::read_u64(in);
    Tensor t(rows, cols);
    for (double& d : t.data()) d = detail::read_f64(in);
    if (!in) throw CheckpointError("truncated checkpoint: " + path.string());
    require_finite(t, "checkpoint tensor " + name);
    params.emplace(std::move(name), std::move(t));
  }
  return params;
}

// ---- binding params onto a tape ----

struct BoundParams {
  Tape* tape = nullptr;
  std::map<std::string, Tape::Id> ids;

  Tape::Id operator[](const std::string& name) const {
    auto it = ids.find(name);
    if (it == ids.end()) throw std::out_of_range("parameter not bound: " + name);
    return it->second;
  }
  bool has(const std::string& name) const { return ids.count(name) != 0; }
};

inline BoundParams bind_params(Tape& tape, const ModelParams& params) {
  BoundParams bound;
  bound.tape = &tape;
  for (const auto& [name, t] : params) bound.ids.emplace(name, tape.param(t));
  return bound;
}

inline std::map<std::string, Tensor> collect_grads(Tape& tape, const BoundParams& bound) {
  std::map<std::string, Tensor> grads;
  for (const auto& [name, id] : bound.ids) grads.emplace(name, tape.grad(id));
  return grads;
}

inline void accumulate_grads(std::map<std::string, Tensor>& into,
                             const std::map<std::string, Tensor>& grads) {
  for (const auto& [name, g] : grads) {
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, g);
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) it->second.data()[i] += g.data()[i];
    }
  }
}

// ---- Adam ----

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig config) : config_(config) {}

  // One update over all named gradients. Parameters without a gradient
  // entry are left untouched.
  void step(ModelParams& params, const std::map<std::string, Tensor>& grads) {
    ++step_count_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
    for (auto& [name, w] : params) {
      auto git = grads.find(name);
      if (git == grads.end()) continue;
      const Tensor& g = git->second;
      require_finite(g, "gradient of " + name);
      Tensor& m = state_entry(m_, name, w);
      Tensor& v = state_entry(v_, name, w);
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double gi = g.data()[i];
        m.data()[i] = config_.beta1 * m.data()[i] + (1.0 - config_.beta1) * gi;
        v.data()[i] = config_.beta2 * v.data()[i] + (1.0 - config_.beta2) * gi * gi;
        const double mh = m.data()[i] / bc1;
        const double vh = v.data()[i] / bc2;
        w.data()[i] -= config_.lr * mh / (std::sqrt(vh) + config_.eps);
      }
      require_finite(w, "updated parameter " + name);
    }
  }

  std::uint64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  static Tensor& state_entry(std::map<std::string, Tensor>& state, const std::string& name,
                             const Tensor& like) {
    auto it = state.find(name);
    if (it == state.end()) it = state.emplace(name, Tensor(like.rows(), like.cols())).first;
    return it->second;
  }

  AdamConfig config_;
  std::uint64_t step_count_ = 0;
  std::map<std::string, Tensor> m_;
  std::map<std::string, Tensor> v_;
};

// ---- finite-difference gradient check ----

struct GradReport {
  double eps = 0.0;
  std::map<std::string, double> max_rel_err;  // per parameter tensor

  double worst() const {
    double w = 0.0;
    for (const auto& [_, e] : max_rel_err) w = std::max(w, e);
    return w;
  }
};

// Compares analytic gradients against central differences
// (f(w+eps) - f(w-eps)) / (2 eps) on sampled coordinates of every tensor.
// `loss_value` must be a deterministic pure function of the parameters.
inline GradReport grad_check(ModelParams& params,
                             const std::function<double(const ModelParams&)>& loss_value,
                             const std::map<std::string, Tensor>& analytic,
                             double eps = 1e-5, std::size_t samples_per_tensor = 32,
                             std::uint64_t seed = 17) {
  GradReport report;
  report.eps = eps;
  std::mt19937_64 rng(seed);
  for (auto& [name, w] : params) {
    auto ait = analytic.find(name);
    const Tensor* ga = ait == analytic.end() ? nullptr : &ait->second;
    std::vector<std::size_t> coords;
    if (w.size() <= samples_per_tensor) {
      coords.resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) coords[i] = i;
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
      std::vector<bool> seen(w.size(), false);
      while (coords.size() < samples_per_tensor) {
        const std::size_t i = pick(rng);
        if (!seen[i]) {
          seen[i] = true;
          coords.push_back(i);
        }
      }
    }
    double worst = 0.0;
    for (std::size_t i : coords) {
      const double saved = w.data()[i];
      w.data()[i] = saved + eps;
      const double fp = loss_value(params);
      w.data()[i] = saved - eps;
      const double fm = loss_value(params);
      w.data()[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NonFiniteLoss("grad_check: non-finite loss while probing " + name);
      const double fd = (fp - fm) / (2.0 * eps);
      const double an = ga ? ga->data()[i] : 0.0;
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, std::abs(fd - an) / denom);
    }
    report.max_rel_err[name] = worst;
  }
  return report;
}

}  // namespace gstqa::nn
