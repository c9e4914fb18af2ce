#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "gstqa/nn/tensor.hpp"

namespace gstqa::nn {

class ScoreOutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reverse-mode autodiff over a growing op tape. Parents always precede
// children, so one reverse sweep in creation order is a valid topological
// backward pass. Tapes are built per forward pass and discarded.
class Tape {
 public:
  using Id = std::int32_t;

  Id input(Tensor v) { return push(std::move(v), false, nullptr); }
  Id param(Tensor v) { return push(std::move(v), true, nullptr); }

  const Tensor& val(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }

  // Gradient of a node after backward(); nodes the loss never reached
  // report an all-zero gradient.
  const Tensor& grad(Id id) { return ensure_grad(id); }

  std::size_t size() const { return nodes_.size(); }
  std::size_t live_bytes() const { return bytes_; }
  std::size_t peak_bytes() const { return peak_bytes_; }

  // ---- elementwise / structural ops ----

  Id add(Id a, Id b) {
    check_same(a, b, "add");
    Tensor out = val(a);
    const Tensor& vb = val(b);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += vb.data()[i];
    return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      t.accumulate(a, g);
      t.accumulate(b, g);
    });
  }

  // a: m x n plus row vector b: 1 x n broadcast over rows
  Id add_rowvec(Id a, Id b) {
    const Tensor& va = val(a);
    const Tensor& vb = val(b);
    if (vb.rows() != 1 || vb.cols() != va.cols())
      throw ShapeMismatch("add_rowvec: bias must be 1 x cols(a)");
    Tensor out = va;
    for (std::size_t r = 0; r < out.rows(); ++r) {
      double* orow = out.row_ptr(r);
      const double* brow = vb.row_ptr(0);
      for (std::size_t c = 0; c < out.cols(); ++c) orow[c] += brow[c];
    }
    return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      t.accumulate(a, g);
      if (t.needs(b)) {
        Tensor gb(1, g.cols());
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) gb.at(0, c) += g.at(r, c);
        t.accumulate(b, gb);
      }
    });
  }

  Id scale(Id a, double c) {
    Tensor out = val(a);
    for (double& x : out.data()) x *= c;
    return push(std::move(out), needs(a), [a, c](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      Tensor ga = g;
      for (double& x : ga.data()) x *= c;
      t.accumulate(a, ga);
    });
  }

  Id mul(Id a, Id b) {
    check_same(a, b, "mul");
    Tensor out = val(a);
    const Tensor& vb = val(b);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= vb.data()[i];
    return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      if (t.needs(a)) {
        Tensor ga = g;
        const Tensor& vb = t.val(b);
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] *= vb.data()[i];
        t.accumulate(a, ga);
      }
      if (t.needs(b)) {
        Tensor gb = g;
        const Tensor& va = t.val(a);
        for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] *= va.data()[i];
        t.accumulate(b, gb);
      }
    });
  }

  Id matmul(Id a, Id b) {
    const Tensor& va = val(a);
    const Tensor& vb = val(b);
    if (va.cols() != vb.rows()) throw ShapeMismatch("matmul: inner dimensions disagree");
    Tensor out(va.rows(), vb.cols());
    matmul_nn(va, vb, out);
    return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      if (t.needs(a)) {
        Tensor ga(t.val(a).rows(), t.val(a).cols());
        matmul_nt(g, t.val(b), ga);
        t.accumulate(a, ga);
      }
      if (t.needs(b)) {
        Tensor gb(t.val(b).rows(), t.val(b).cols());
        matmul_tn(t.val(a), g, gb);
        t.accumulate(b, gb);
      }
    });
  }

  Id transpose(Id a) {
    const Tensor& va = val(a);
    Tensor out(va.cols(), va.rows());
    for (std::size_t r = 0; r < va.rows(); ++r)
      for (std::size_t c = 0; c < va.cols(); ++c) out.at(c, r) = va.at(r, c);
    return push(std::move(out), needs(a), [a](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      Tensor ga(g.cols(), g.rows());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) ga.at(c, r) = g.at(r, c);
      t.accumulate(a, ga);
    });
  }

  Id concat_rows(std::vector<Id> parts) {
    if (parts.empty()) throw ShapeMismatch("concat_rows: no inputs");
    std::size_t rows = 0;
    const std::size_t cols = val(parts[0]).cols();
    bool any = false;
    for (Id p : parts) {
      if (val(p).cols() != cols) throw ShapeMismatch("concat_rows: column counts disagree");
      rows += val(p).rows();
      any = any || needs(p);
    }
    Tensor out(rows, cols);
    std::size_t r0 = 0;
    for (Id p : parts) {
      const Tensor& v = val(p);
      std::copy(v.data().begin(), v.data().end(), out.data().begin() + static_cast<long>(r0 * cols));
      r0 += v.rows();
    }
    return push(std::move(out), any, [parts](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      std::size_t r0 = 0;
      for (Id p : parts) {
        const std::size_t pr = t.val(p).rows();
        if (t.needs(p)) {
          Tensor gp(pr, g.cols());
          std::copy(g.data().begin() + static_cast<long>(r0 * g.cols()),
                    g.data().begin() + static_cast<long>((r0 + pr) * g.cols()), gp.data().begin());
          t.accumulate(p, gp);
        }
        r0 += pr;
      }
    });
  }

  Id slice_rows(Id a, std::size_t r0, std::size_t r1) {
    const Tensor& va = val(a);
    if (r0 >= r1 || r1 > va.rows()) throw ShapeMismatch("slice_rows: bad row range");
    Tensor out(r1 - r0, va.cols());
    std::copy(va.data().begin() + static_cast<long>(r0 * va.cols()),
              va.data().begin() + static_cast<long>(r1 * va.cols()), out.data().begin());
    return push(std::move(out), needs(a), [a, r0](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      Tensor ga(t.val(a).rows(), t.val(a).cols());
      std::copy(g.data().begin(), g.data().end(), ga.data().begin() + static_cast<long>(r0 * ga.cols()));
      t.accumulate(a, ga);
    });
  }

  Id concat_cols(std::vector<Id> parts) {
    if (parts.empty()) throw ShapeMismatch("concat_cols: no inputs");
    const std::size_t rows = val(parts[0]).rows();
    std::size_t cols = 0;
    bool any = false;
    for (Id p : parts) {
      if (val(p).rows() != rows) throw ShapeMismatch("concat_cols: row counts disagree");
      cols += val(p).cols();
      any = any || needs(p);
    }
    Tensor out(rows, cols);
    std::size_t c0 = 0;
    for (Id p : parts) {
      const Tensor& v = val(p);
      for (std::size_t r = 0; r < rows; ++r)
        std::copy(v.row_ptr(r), v.row_ptr(r) + v.cols(), out.row_ptr(r) + c0);
      c0 += v.cols();
    }
    return push(std::move(out), any, [parts](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      std::size_t c0 = 0;
      for (Id p : parts) {
        const Tensor& v = t.val(p);
        if (t.needs(p)) {
          Tensor gp(v.rows(), v.cols());
          for (std::size_t r = 0; r < v.rows(); ++r)
            std::copy(g.row_ptr(r) + c0, g.row_ptr(r) + c0 + v.cols(), gp.row_ptr(r));
          t.accumulate(p, gp);
        }
        c0 += v.cols();
      }
    });
  }

  Id slice_cols(Id a, std::size_t c0, std::size_t c1) {
    const Tensor& va = val(a);
    if (c0 >= c1 || c1 > va.cols()) throw ShapeMismatch("slice_cols: bad column range");
    Tensor out(va.rows(), c1 - c0);
    for (std::size_t r = 0; r < va.rows(); ++r)
      std::copy(va.row_ptr(r) + c0, va.row_ptr(r) + c1, out.row_ptr(r));
    return push(std::move(out), needs(a), [a, c0](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      Tensor ga(t.val(a).rows(), t.val(a).cols());
      for (std::size_t r = 0; r < g.rows(); ++r)
        std::copy(g.row_ptr(r), g.row_ptr(r) + g.cols(), ga.row_ptr(r) + c0);
      t.accumulate(a, ga);
    });
  }

  // m x n -> 1 x n column means
  Id mean_rows(Id a) {
    const Tensor& va = val(a);
    if (va.rows() == 0) throw ShapeMismatch("mean_rows: empty input");
    Tensor out(1, va.cols());
    for (std::size_t r = 0; r < va.rows(); ++r)
      for (std::size_t c = 0; c < va.cols(); ++c) out.at(0, c) += va.at(r, c);
    const double inv = 1.0 / static_cast<double>(va.rows());
    for (double& x : out.data()) x *= inv;
    return push(std::move(out), needs(a), [a, inv](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      Tensor ga(t.val(a).rows(), t.val(a).cols());
      for (std::size_t r = 0; r < ga.rows(); ++r)
        for (std::size_t c = 0; c < ga.cols(); ++c) ga.at(r, c) = g.at(0, c) * inv;
      t.accumulate(a, ga);
    });
  }

  // Row-wise softmax of (a + add_mask). Fully masked rows are a caller error.
  Id softmax_rows(Id a, const Tensor* add_mask = nullptr) {
    const Tensor& va = val(a);
    if (add_mask && !add_mask->same_shape(va))
      throw ShapeMismatch("softmax_rows: mask shape disagrees");
    Tensor out(va.rows(), va.cols());
    for (std::size_t r = 0; r < va.rows(); ++r) {
      double mx = -1e300;
      for (std::size_t c = 0; c < va.cols(); ++c) {
        const double z = va.at(r, c) + (add_mask ? add_mask->at(r, c) : 0.0);
        out.at(r, c) = z;
        mx = std::max(mx, z);
      }
      double sum = 0.0;
      for (std::size_t c = 0; c < va.cols(); ++c) {
        const double e = std::exp(out.at(r, c) - mx);
        out.at(r, c) = e;
        sum += e;
      }
      for (std::size_t c = 0; c < va.cols(); ++c) out.at(r, c) /= sum;
    }
    return push(std::move(out), needs(a), [a](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      const Tensor& y = t.val(self);
      Tensor ga(y.rows(), y.cols());
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) dot += g.at(r, c) * y.at(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c)
          ga.at(r, c) = y.at(r, c) * (g.at(r, c) - dot);
      }
      t.accumulate(a, ga);
    });
  }

  Id tanh_op(Id a) {
    Tensor out = val(a);
    for (double& x : out.data()) x = std::tanh(x);
    return push(std::move(out), needs(a), [a](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      const Tensor& y = t.val(self);
      Tensor ga(y.rows(), y.cols());
      for (std::size_t i = 0; i < y.size(); ++i)
        ga.data()[i] = g.data()[i] * (1.0 - y.data()[i] * y.data()[i]);
      t.accumulate(a, ga);
    });
  }

  Id relu(Id a) {
    Tensor out = val(a);
    for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
    return push(std::move(out), needs(a), [a](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      const Tensor& x = t.val(a);
      Tensor ga(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.size(); ++i)
        ga.data()[i] = x.data()[i] > 0.0 ? g.data()[i] : 0.0;
      t.accumulate(a, ga);
    });
  }

  // Exact gaussian gelu; smooth, so finite differences stay well conditioned.
  Id gelu(Id a) {
    Tensor out = val(a);
    for (double& x : out.data()) x = x * normal_cdf(x);
    return push(std::move(out), needs(a), [a](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      const Tensor& x = t.val(a);
      Tensor ga(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.data()[i];
        ga.data()[i] = g.data()[i] * (normal_cdf(v) + v * normal_pdf(v));
      }
      t.accumulate(a, ga);
    });
  }

  Id sigmoid(Id a) {
    Tensor out = val(a);
    for (double& x : out.data()) x = sigmoid_scalar(x);
    return push(std::move(out), needs(a), [a](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      const Tensor& y = t.val(self);
      Tensor ga(y.rows(), y.cols());
      for (std::size_t i = 0; i < y.size(); ++i)
        ga.data()[i] = g.data()[i] * y.data()[i] * (1.0 - y.data()[i]);
      t.accumulate(a, ga);
    });
  }

  // Per-row layer norm with learnable gain/bias (both 1 x n).
  Id layer_norm(Id x, Id gain, Id bias, double eps = 1e-6) {
    const Tensor& vx = val(x);
    const Tensor& vg = val(gain);
    const Tensor& vb = val(bias);
    if (vg.rows() != 1 || vb.rows() != 1 || vg.cols() != vx.cols() || vb.cols() != vx.cols())
      throw ShapeMismatch("layer_norm: gain/bias must be 1 x cols(x)");
    const std::size_t m = vx.rows(), n = vx.cols();
    Tensor out(m, n);
    std::vector<double> inv_sigma(m);
    Tensor xhat(m, n);
    for (std::size_t r = 0; r < m; ++r) {
      double mean = 0.0;
      for (std::size_t c = 0; c < n; ++c) mean += vx.at(r, c);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        const double d = vx.at(r, c) - mean;
        var += d * d;
      }
      var /= static_cast<double>(n);
      const double is = 1.0 / std::sqrt(var + eps);
      inv_sigma[r] = is;
      for (std::size_t c = 0; c < n; ++c) {
        const double xh = (vx.at(r, c) - mean) * is;
        xhat.at(r, c) = xh;
        out.at(r, c) = vg.at(0, c) * xh + vb.at(0, c);
      }
    }
    return push(std::move(out), needs(x) || needs(gain) || needs(bias),
                [x, gain, bias, inv_sigma = std::move(inv_sigma), xhat = std::move(xhat)](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      const Tensor& vg = t.val(gain);
      const std::size_t m = g.rows(), n = g.cols();
      if (t.needs(gain)) {
        Tensor gg(1, n);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t c = 0; c < n; ++c) gg.at(0, c) += g.at(r, c) * xhat.at(r, c);
        t.accumulate(gain, gg);
      }
      if (t.needs(bias)) {
        Tensor gb(1, n);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t c = 0; c < n; ++c) gb.at(0, c) += g.at(r, c);
        t.accumulate(bias, gb);
      }
      if (t.needs(x)) {
        Tensor gx(m, n);
        for (std::size_t r = 0; r < m; ++r) {
          double mean_dy = 0.0, mean_dyxh = 0.0;
          for (std::size_t c = 0; c < n; ++c) {
            const double dy = g.at(r, c) * vg.at(0, c);
            mean_dy += dy;
            mean_dyxh += dy * xhat.at(r, c);
          }
          mean_dy /= static_cast<double>(n);
          mean_dyxh /= static_cast<double>(n);
          for (std::size_t c = 0; c < n; ++c) {
            const double dy = g.at(r, c) * vg.at(0, c);
            gx.at(r, c) = (dy - mean_dy - xhat.at(r, c) * mean_dyxh) * inv_sigma[r];
          }
        }
        t.accumulate(x, gx);
      }
    });
  }

  // Embedding lookup: selects table rows by id. Backward scatters row grads.
  Id gather_rows(Id table, std::vector<int> ids) {
    const Tensor& vt = val(table);
    Tensor out(ids.size(), vt.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const int id = ids[r];
      if (id < 0 || static_cast<std::size_t>(id) >= vt.rows())
        throw ShapeMismatch("gather_rows: id out of range");
      std::copy(vt.row_ptr(static_cast<std::size_t>(id)),
                vt.row_ptr(static_cast<std::size_t>(id)) + vt.cols(), out.row_ptr(r));
    }
    return push(std::move(out), needs(table), [table, ids = std::move(ids)](Tape& t, Id self) {
      const Tensor& g = t.node(self).grad;
      Tensor gt(t.val(table).rows(), t.val(table).cols());
      for (std::size_t r = 0; r < ids.size(); ++r) {
        double* dst = gt.row_ptr(static_cast<std::size_t>(ids[r]));
        const double* src = g.row_ptr(r);
        for (std::size_t c = 0; c < g.cols(); ++c) dst[c] += src[c];
      }
      t.accumulate(table, gt);
    });
  }

  // Mean binary cross entropy from logits over a k x 1 column of scores.
  // Value is (1/denom) * sum_i [softplus(-z_i) + (1 - y_i) z_i], which equals
  // -(1/denom) * sum_i [y_i log s_i + (1-y_i) log(1-s_i)] with s = sigmoid(z).
  // Rejects any s that rounds to 0 or 1 in double precision.
  Id bce_with_logits(Id logits, std::vector<double> labels, double denom) {
    const Tensor& vz = val(logits);
    if (vz.cols() != 1 || vz.rows() != labels.size())
      throw ShapeMismatch("bce_with_logits: logits must be k x 1 aligned with labels");
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double z = vz.at(i, 0);
      const double s = sigmoid_scalar(z);
      if (!(s > 0.0 && s < 1.0))
        throw ScoreOutOfRange("bce_with_logits: score not strictly inside (0,1)");
      total += softplus(-z) + (1.0 - labels[i]) * z;
    }
    Tensor out(1, 1);
    out.at(0, 0) = total / denom;
    if (!all_finite(out)) throw NonFiniteLoss("bce_with_logits: non-finite loss");
    return push(std::move(out), needs(logits),
                [logits, labels = std::move(labels), denom](Tape& t, Id self) {
      const double g = t.node(self).grad.at(0, 0);
      const Tensor& vz = t.val(logits);
      Tensor gz(vz.rows(), 1);
      for (std::size_t i = 0; i < labels.size(); ++i)
        gz.at(i, 0) = g * (sigmoid_scalar(vz.at(i, 0)) - labels[i]) / denom;
      t.accumulate(logits, gz);
    });
  }

  // Mean token-level cross entropy: logits T x V, one target id per row.
  Id softmax_xent(Id logits, std::vector<int> targets) {
    const Tensor& vz = val(logits);
    if (vz.rows() != targets.size())
      throw ShapeMismatch("softmax_xent: one target per logit row required");
    const std::size_t tt = vz.rows(), vv = vz.cols();
    double total = 0.0;
    for (std::size_t r = 0; r < tt; ++r) {
      const int y = targets[r];
      if (y < 0 || static_cast<std::size_t>(y) >= vv)
        throw ShapeMismatch("softmax_xent: target id out of range");
      double mx = -1e300;
      for (std::size_t c = 0; c < vv; ++c) mx = std::max(mx, vz.at(r, c));
      double lse = 0.0;
      for (std::size_t c = 0; c < vv; ++c) lse += std::exp(vz.at(r, c) - mx);
      total += (mx + std::log(lse)) - vz.at(r, static_cast<std::size_t>(y));
    }
    Tensor out(1, 1);
    out.at(0, 0) = total / static_cast<double>(tt);
    if (!all_finite(out)) throw NonFiniteLoss("softmax_xent: non-finite loss");
    return push(std::move(out), needs(logits),
                [logits, targets = std::move(targets)](Tape& t, Id self) {
      const double g = t.node(self).grad.at(0, 0);
      const Tensor& vz = t.val(logits);
      const std::size_t tt = vz.rows(), vv = vz.cols();
      Tensor gz(tt, vv);
      const double inv = 1.0 / static_cast<double>(tt);
      for (std::size_t r = 0; r < tt; ++r) {
        double mx = -1e300;
        for (std::size_t c = 0; c < vv; ++c) mx = std::max(mx, vz.at(r, c));
        double lse = 0.0;
        for (std::size_t c = 0; c < vv; ++c) lse += std::exp(vz.at(r, c) - mx);
        for (std::size_t c = 0; c < vv; ++c) {
          const double p = std::exp(vz.at(r, c) - mx) / lse;
          gz.at(r, c) = g * inv * (p - (static_cast<std::size_t>(targets[r]) == c ? 1.0 : 0.0));
        }
      }
      t.accumulate(logits, gz);
    });
  }

  void backward(Id root) {
    Node& rn = node(root);
    if (rn.value.size() != 1) throw ShapeMismatch("backward: root must be a scalar");
    ensure_grad(root).at(0, 0) = 1.0;
    for (Id i = root; i >= 0; --i) {
      Node& n = node(i);
      if (n.back && n.needs_grad && n.grad.size() > 0) n.back(*this, i);
    }
  }

  static double sigmoid_scalar(double z) { return 1.0 / (1.0 + std::exp(-z)); }
  static double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
  static double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }
  static double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    std::function<void(Tape&, Id)> back;
  };

  Node& node(Id id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(Id id) const { return nodes_[static_cast<std::size_t>(id)]; }

  bool needs(Id id) const { return node(id).needs_grad; }

  void check_same(Id a, Id b, const char* op) const {
    if (!val(a).same_shape(val(b)))
      throw ShapeMismatch(std::string(op) + ": operand shapes disagree");
  }

  Tensor& ensure_grad(Id id) {
    Node& n = node(id);
    if (n.grad.size() == 0) {
      n.grad = Tensor(n.value.rows(), n.value.cols());
      account(n.grad.size());
    }
    return n.grad;
  }

  void accumulate(Id id, const Tensor& g) {
    Node& n = node(id);
    if (!n.needs_grad) return;
    Tensor& dst = ensure_grad(id);
    if (!dst.same_shape(g)) throw ShapeMismatch("accumulate: gradient shape disagrees");
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += g.data()[i];
  }

  Id push(Tensor value, bool needs_grad, std::function<void(Tape&, Id)> back) {
    account(value.size());
    nodes_.push_back(Node{std::move(value), Tensor(), needs_grad, std::move(back)});
    return static_cast<Id>(nodes_.size() - 1);
  }

  void account(std::size_t doubles) {
    bytes_ += doubles * sizeof(double);
    peak_bytes_ = std::max(peak_bytes_, bytes_);
  }

  std::vector<Node> nodes_;
  std::size_t bytes_ = 0;
  std::size_t peak_bytes_ = 0;
};

}  // namespace gstqa::nn
