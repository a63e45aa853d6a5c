#pragma once

// Minimal reverse-mode differentiation over dense double vectors/matrices.
//
// A Tape records every operation as a node. Parameters enter as leaves that
// reference an external Tensor; their gradients accumulate straight into
// Tensor::grad when backward() runs. A tape built with recording disabled
// computes values only.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "assertgen/util.hpp"

namespace assertgen::neural {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() > 1 ? shape[1] : 1; }
  void zero_grad();
};

struct Var {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }
  std::size_t node_count() const { return nodes_.size(); }

  Var param(Tensor& t);
  Var constant(std::vector<double> values);
  Var zeros(std::size_t n);
  Var embed(Tensor& table, std::size_t row);

  /// W x + b, W a (rows x cols) matrix node.
  Var affine(Var w, Var x, Var b);
  Var matvec(Var w, Var x);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var dot(Var a, Var b);
  Var softmax(Var a);
  /// sum_i weights[i] * rows[i]
  Var weighted_sum(std::span<const Var> rows, Var weights);
  /// Inverted dropout with a freshly drawn mask.
  Var dropout(Var a, double rate, Rng& rng);
  /// gate * [p_vocab, 0...] + (1 - gate) * scatter(alpha -> ext_ids), length ext_size.
  Var copy_mix(Var p_vocab, Var alpha, Var gate, std::span<const std::size_t> ext_ids,
               std::size_t ext_size);
  /// -log(dist[index])
  Var neg_log(Var dist, std::size_t index);
  /// Mean of scalar nodes.
  Var mean(std::span<const Var> scalars);

  std::span<const double> value(Var v) const;
  double scalar(Var v) const { return value(v)[0]; }
  std::size_t size(Var v) const { return value(v).size(); }

  /// Seeds d(root)/d(root) = 1 and propagates. root must be a scalar.
  void backward(Var root);

 private:
  struct Node {
    std::size_t rows = 0;
    std::size_t cols = 1;
    std::vector<double> value;
    Tensor* param = nullptr;
    std::vector<double> grad;
    std::function<void(Tape&)> back;
  };

  Var push(std::size_t rows, std::size_t cols, std::vector<double> value);
  void on_backward(Var v, std::function<void(Tape&)> fn);
  std::span<double> grad(Var v);
  std::span<const double> val(std::uint32_t id) const;

  std::vector<Node> nodes_;
  bool record_;
};

}  // namespace assertgen::neural
