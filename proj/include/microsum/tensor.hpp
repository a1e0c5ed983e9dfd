#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

// Reverse-mode autodiff over dense row-major tensors. Everything is double
// precision: models here are tiny and numerical verifiability matters more
// than speed. Gradients accumulate additively; callers zero them explicitly
// between steps.
namespace microsum {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);

struct TensorNode {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until the first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;

  std::size_t size() const { return data.size(); }
  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }
  void accumulate(const std::vector<double>& g) {
    ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) grad[i] += g[i];
  }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> n) : node_(std::move(n)) {}

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor full(const Shape& shape, double v, bool requires_grad = false);
  static Tensor from_data(const Shape& shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->data.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }

  // Tensor is a shared handle; data is mutable through const handles.
  std::vector<double>& data() const { return node_->data; }
  double value() const;  // scalar tensors only
  double at(std::size_t i, std::size_t j) const;

  bool has_grad() const { return !node_->grad.empty(); }
  const std::vector<double>& grad() const;
  void zero_grad() const { node_->grad.clear(); }

  // Reverse pass from a scalar output; visits each reachable node once in
  // reverse topological order. `seed` is the incoming adjoint.
  void backward(double seed = 1.0) const;

  const std::shared_ptr<TensorNode>& node() const { return node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

// Elementwise and broadcast ops
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
// m[r x c] + row vector v[c] broadcast over rows
Tensor add_rowvec(const Tensor& m, const Tensor& v);

// Matrix products (2-D only)
Tensor matmul(const Tensor& a, const Tensor& b);     // a[m x k] * b[k x n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a[m x k] * b[n x k]^T

// Nonlinearities
Tensor softmax(const Tensor& x, std::size_t axis);
Tensor sigmoid(const Tensor& x);
Tensor gelu(const Tensor& x);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

// Reductions and losses
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// Per-row negative log-likelihood of the target column; returns [rows].
Tensor cross_entropy_rows(const Tensor& logits, std::span<const int> targets);
// -log softmax(logits)[target] for a single logit vector; returns a scalar.
Tensor cross_entropy(const Tensor& logits, int target);
Tensor mse(const Tensor& a, const Tensor& b);

// Structure ops
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices);
Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t n);
Tensor concat_cols(std::span<const Tensor> parts);

}  // namespace microsum
