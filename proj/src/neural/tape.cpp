#include "assertgen/neural/tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace assertgen::neural {

Tensor::Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  values.assign(n, 0.0);
  grad.assign(n, 0.0);
}

void Tensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

Var Tape::push(std::size_t rows, std::size_t cols, std::vector<double> value) {
  Node n;
  n.rows = rows;
  n.cols = cols;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Tape::on_backward(Var v, std::function<void(Tape&)> fn) {
  if (record_) nodes_[v.id].back = std::move(fn);
}

std::span<const double> Tape::val(std::uint32_t id) const {
  const Node& n = nodes_[id];
  if (n.param) return n.param->values;
  return n.value;
}

std::span<const double> Tape::value(Var v) const { return val(v.id); }

std::span<double> Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.param) return n.param->grad;
  return n.grad;
}

Var Tape::param(Tensor& t) {
  Node n;
  n.rows = t.rows();
  n.cols = t.cols();
  n.param = &t;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::constant(std::vector<double> values) {
  std::size_t n = values.size();
  return push(n, 1, std::move(values));
}

Var Tape::zeros(std::size_t n) { return push(n, 1, std::vector<double>(n, 0.0)); }

Var Tape::embed(Tensor& table, std::size_t row) {
  const std::size_t d = table.cols();
  if (row >= table.rows()) throw std::out_of_range("embedding row out of range");
  std::vector<double> v(table.values.begin() + static_cast<std::ptrdiff_t>(row * d),
                        table.values.begin() + static_cast<std::ptrdiff_t>((row + 1) * d));
  Var out = push(d, 1, std::move(v));
  Tensor* t = &table;
  on_backward(out, [out, t, row, d](Tape& tape) {
    auto g = tape.grad(out);
    for (std::size_t j = 0; j < d; ++j) t->grad[row * d + j] += g[j];
  });
  return out;
}

Var Tape::matvec(Var w, Var x) {
  const std::size_t r = nodes_[w.id].rows;
  const std::size_t c = nodes_[w.id].cols;
  auto W = val(w.id);
  auto X = val(x.id);
  if (X.size() != c) throw std::invalid_argument("matvec: shape mismatch");
  std::vector<double> y(r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = W.data() + i * c;
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += row[j] * X[j];
    y[i] = s;
  }
  Var out = push(r, 1, std::move(y));
  on_backward(out, [out, w, x, r, c](Tape& tape) {
    auto g = tape.grad(out);
    auto W = tape.val(w.id);
    auto X = tape.val(x.id);
    auto gw = tape.grad(w);
    auto gx = tape.grad(x);
    for (std::size_t i = 0; i < r; ++i) {
      const double gi = g[i];
      if (gi == 0.0) continue;
      double* gw_row = gw.data() + i * c;
      const double* w_row = W.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) {
        gw_row[j] += gi * X[j];
        gx[j] += gi * w_row[j];
      }
    }
  });
  return out;
}

Var Tape::affine(Var w, Var x, Var b) { return add(matvec(w, x), b); }

Var Tape::add(Var a, Var b) {
  auto A = val(a.id);
  auto B = val(b.id);
  if (A.size() != B.size()) throw std::invalid_argument("add: shape mismatch");
  std::vector<double> y(A.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] + B[i];
  Var out = push(y.size(), 1, std::move(y));
  on_backward(out, [out, a, b](Tape& tape) {
    auto g = tape.grad(out);
    auto ga = tape.grad(a);
    auto gb = tape.grad(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  });
  return out;
}

Var Tape::mul(Var a, Var b) {
  auto A = val(a.id);
  auto B = val(b.id);
  if (A.size() != B.size()) throw std::invalid_argument("mul: shape mismatch");
  std::vector<double> y(A.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] * B[i];
  Var out = push(y.size(), 1, std::move(y));
  on_backward(out, [out, a, b](Tape& tape) {
    auto g = tape.grad(out);
    auto A = tape.val(a.id);
    auto B = tape.val(b.id);
    auto ga = tape.grad(a);
    auto gb = tape.grad(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * B[i];
      gb[i] += g[i] * A[i];
    }
  });
  return out;
}

Var Tape::sigmoid(Var a) {
  auto A = val(a.id);
  std::vector<double> y(A.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-A[i]));
  Var out = push(y.size(), 1, std::move(y));
  on_backward(out, [out, a](Tape& tape) {
    auto g = tape.grad(out);
    auto Y = tape.val(out.id);
    auto ga = tape.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * Y[i] * (1.0 - Y[i]);
  });
  return out;
}

Var Tape::tanh(Var a) {
  auto A = val(a.id);
  std::vector<double> y(A.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(A[i]);
  Var out = push(y.size(), 1, std::move(y));
  on_backward(out, [out, a](Tape& tape) {
    auto g = tape.grad(out);
    auto Y = tape.val(out.id);
    auto ga = tape.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - Y[i] * Y[i]);
  });
  return out;
}

Var Tape::concat(std::span<const Var> parts) {
  std::vector<double> y;
  std::vector<Var> inputs(parts.begin(), parts.end());
  for (Var p : inputs) {
    auto P = val(p.id);
    y.insert(y.end(), P.begin(), P.end());
  }
  Var out = push(y.size(), 1, std::move(y));
  on_backward(out, [out, inputs](Tape& tape) {
    auto g = tape.grad(out);
    std::size_t off = 0;
    for (Var p : inputs) {
      auto gp = tape.grad(p);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[off + i];
      off += gp.size();
    }
  });
  return out;
}

Var Tape::slice(Var a, std::size_t offset, std::size_t length) {
  auto A = val(a.id);
  if (offset + length > A.size()) throw std::out_of_range("slice out of range");
  std::vector<double> y(A.begin() + static_cast<std::ptrdiff_t>(offset),
                        A.begin() + static_cast<std::ptrdiff_t>(offset + length));
  Var out = push(length, 1, std::move(y));
  on_backward(out, [out, a, offset](Tape& tape) {
    auto g = tape.grad(out);
    auto ga = tape.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
  });
  return out;
}

Var Tape::dot(Var a, Var b) {
  auto A = val(a.id);
  auto B = val(b.id);
  if (A.size() != B.size()) throw std::invalid_argument("dot: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) s += A[i] * B[i];
  Var out = push(1, 1, {s});
  on_backward(out, [out, a, b](Tape& tape) {
    double g = tape.grad(out)[0];
    auto A = tape.val(a.id);
    auto B = tape.val(b.id);
    auto ga = tape.grad(a);
    auto gb = tape.grad(b);
    for (std::size_t i = 0; i < A.size(); ++i) {
      ga[i] += g * B[i];
      gb[i] += g * A[i];
    }
  });
  return out;
}

Var Tape::softmax(Var a) {
  auto A = val(a.id);
  double m = *std::max_element(A.begin(), A.end());
  std::vector<double> y(A.size());
  double z = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::exp(A[i] - m);
    z += y[i];
  }
  for (double& v : y) v /= z;
  Var out = push(y.size(), 1, std::move(y));
  on_backward(out, [out, a](Tape& tape) {
    auto g = tape.grad(out);
    auto Y = tape.val(out.id);
    auto ga = tape.grad(a);
    double gy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gy += g[i] * Y[i];
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += Y[i] * (g[i] - gy);
  });
  return out;
}

Var Tape::weighted_sum(std::span<const Var> rows, Var weights) {
  auto Wt = val(weights.id);
  if (Wt.size() != rows.size() || rows.empty()) {
    throw std::invalid_argument("weighted_sum: shape mismatch");
  }
  std::vector<Var> inputs(rows.begin(), rows.end());
  const std::size_t d = val(inputs[0].id).size();
  std::vector<double> y(d, 0.0);
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    auto R = val(inputs[r].id);
    for (std::size_t j = 0; j < d; ++j) y[j] += Wt[r] * R[j];
  }
  Var out = push(d, 1, std::move(y));
  on_backward(out, [out, inputs, weights, d](Tape& tape) {
    auto g = tape.grad(out);
    auto Wt = tape.val(weights.id);
    auto gw = tape.grad(weights);
    for (std::size_t r = 0; r < inputs.size(); ++r) {
      auto R = tape.val(inputs[r].id);
      auto gr = tape.grad(inputs[r]);
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        s += g[j] * R[j];
        gr[j] += g[j] * Wt[r];
      }
      gw[r] += s;
    }
  });
  return out;
}

Var Tape::dropout(Var a, double rate, Rng& rng) {
  auto A = val(a.id);
  if (rate <= 0.0) return a;
  const double keep = 1.0 - rate;
  std::vector<double> mask(A.size());
  for (double& m : mask) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
  return mul(a, constant(std::move(mask)));
}

Var Tape::copy_mix(Var p_vocab, Var alpha, Var gate, std::span<const std::size_t> ext_ids,
                   std::size_t ext_size) {
  auto P = val(p_vocab.id);
  auto Al = val(alpha.id);
  const double z = val(gate.id)[0];
  if (Al.size() != ext_ids.size() || P.size() > ext_size) {
    throw std::invalid_argument("copy_mix: shape mismatch");
  }
  std::vector<double> y(ext_size, 0.0);
  for (std::size_t w = 0; w < P.size(); ++w) y[w] = z * P[w];
  for (std::size_t i = 0; i < Al.size(); ++i) y[ext_ids[i]] += (1.0 - z) * Al[i];
  std::vector<std::size_t> ids(ext_ids.begin(), ext_ids.end());
  Var out = push(ext_size, 1, std::move(y));
  on_backward(out, [out, p_vocab, alpha, gate, ids](Tape& tape) {
    auto g = tape.grad(out);
    auto P = tape.val(p_vocab.id);
    auto Al = tape.val(alpha.id);
    const double z = tape.val(gate.id)[0];
    auto gp = tape.grad(p_vocab);
    auto ga = tape.grad(alpha);
    double gz = 0.0;
    for (std::size_t w = 0; w < P.size(); ++w) {
      gp[w] += z * g[w];
      gz += g[w] * P[w];
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ga[i] += (1.0 - z) * g[ids[i]];
      gz -= g[ids[i]] * Al[i];
    }
    tape.grad(gate)[0] += gz;
  });
  return out;
}

Var Tape::neg_log(Var dist, std::size_t index) {
  auto D = val(dist.id);
  if (index >= D.size()) throw std::out_of_range("neg_log index out of range");
  const double p = D[index];
  Var out = push(1, 1, {-std::log(p)});
  on_backward(out, [out, dist, index](Tape& tape) {
    double g = tape.grad(out)[0];
    double p = tape.val(dist.id)[index];
    tape.grad(dist)[index] += -g / p;
  });
  return out;
}

Var Tape::mean(std::span<const Var> scalars) {
  if (scalars.empty()) throw std::invalid_argument("mean of nothing");
  std::vector<Var> inputs(scalars.begin(), scalars.end());
  double s = 0.0;
  for (Var v : inputs) s += val(v.id)[0];
  const double n = static_cast<double>(inputs.size());
  Var out = push(1, 1, {s / n});
  on_backward(out, [out, inputs, n](Tape& tape) {
    double g = tape.grad(out)[0] / n;
    for (Var v : inputs) tape.grad(v)[0] += g;
  });
  return out;
}

void Tape::backward(Var root) {
  if (!record_) throw std::logic_error("backward on a non-recording tape");
  for (auto& n : nodes_) {
    if (!n.param) n.grad.assign(n.value.size(), 0.0);
  }
  grad(root)[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back(*this);
  }
}

}  // namespace assertgen::neural
