#include "microsum/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "microsum/kernels.hpp"

namespace microsum {

namespace {

std::shared_ptr<TensorNode> make_node(Shape shape) {
  auto n = std::make_shared<TensorNode>();
  std::size_t total = 1;
  for (std::size_t d : shape) total *= d;
  n->shape = std::move(shape);
  n->data.assign(total, 0.0);
  return n;
}

bool wire(const std::shared_ptr<TensorNode>& out,
          std::vector<std::shared_ptr<TensorNode>> parents) {
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  if (any) {
    out->requires_grad = true;
    out->parents = std::move(parents);
  }
  return any;
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

void check_2d(const char* op, const Tensor& t) {
  if (t.shape().size() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected 2-D tensor, got " +
                                shape_str(t.shape()));
  }
}

void check_finite(const char* op, const Tensor& t) {
  for (double v : t.data()) {
    if (!std::isfinite(v)) {
      throw std::domain_error(std::string(op) + ": non-finite input");
    }
  }
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ", ";
    os << s[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) {
  auto n = make_node(shape);
  n->requires_grad = requires_grad;
  return Tensor(n);
}

Tensor Tensor::full(const Shape& shape, double v, bool requires_grad) {
  auto n = make_node(shape);
  n->data.assign(n->data.size(), v);
  n->requires_grad = requires_grad;
  return Tensor(n);
}

Tensor Tensor::from_data(const Shape& shape, std::vector<double> data, bool requires_grad) {
  std::size_t total = 1;
  for (std::size_t d : shape) total *= d;
  if (total != data.size()) {
    throw std::invalid_argument("from_data: shape " + shape_str(shape) + " needs " +
                                std::to_string(total) + " values, got " +
                                std::to_string(data.size()));
  }
  auto n = std::make_shared<TensorNode>();
  n->shape = shape;
  n->data = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(n);
}

Tensor Tensor::scalar(double v) { return from_data({1}, {v}); }

std::size_t Tensor::rows() const {
  check_2d("rows", *this);
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  check_2d("cols", *this);
  return node_->shape[1];
}

double Tensor::value() const {
  if (size() != 1) {
    throw std::invalid_argument("value: tensor of shape " + shape_str(shape()) +
                                " is not a scalar");
  }
  return node_->data[0];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  check_2d("at", *this);
  return node_->data[i * node_->shape[1] + j];
}

const std::vector<double>& Tensor::grad() const {
  if (node_->grad.empty()) {
    throw std::runtime_error("grad: no gradient present (run backward first)");
  }
  return node_->grad;
}

void Tensor::backward(double seed) const {
  if (size() != 1) {
    throw std::invalid_argument("backward: expects a scalar output, got " +
                                shape_str(shape()));
  }
  // Iterative post-order DFS; each node enters the order exactly once.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  struct Frame {
    TensorNode* n;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  if (seen.insert(node_.get()).second) stack.push_back({node_.get()});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->parents.size()) {
      TensorNode* p = f.n->parents[f.next++].get();
      if (seen.insert(p).second) stack.push_back({p});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  node_->ensure_grad();
  node_->grad[0] += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  auto out = make_node(a.shape());
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) out->data[i] = ad[i] + bd[i];
  auto pa = a.node(), pb = b.node();
  if (wire(out, {pa, pb})) {
    out->backward_fn = [pa, pb](TensorNode& self) {
      if (pa->requires_grad) pa->accumulate(self.grad);
      if (pb->requires_grad) pb->accumulate(self.grad);
    };
  }
  return Tensor(out);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  auto out = make_node(a.shape());
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) out->data[i] = ad[i] - bd[i];
  auto pa = a.node(), pb = b.node();
  if (wire(out, {pa, pb})) {
    out->backward_fn = [pa, pb](TensorNode& self) {
      if (pa->requires_grad) pa->accumulate(self.grad);
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] -= self.grad[i];
      }
    };
  }
  return Tensor(out);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  auto out = make_node(a.shape());
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) out->data[i] = ad[i] * bd[i];
  auto pa = a.node(), pb = b.node();
  if (wire(out, {pa, pb})) {
    out->backward_fn = [pa, pb](TensorNode& self) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          pa->grad[i] += self.grad[i] * pb->data[i];
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          pb->grad[i] += self.grad[i] * pa->data[i];
      }
    };
  }
  return Tensor(out);
}

Tensor scale(const Tensor& a, double c) {
  auto out = make_node(a.shape());
  const auto& ad = a.data();
  for (std::size_t i = 0; i < ad.size(); ++i) out->data[i] = ad[i] * c;
  auto pa = a.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa, c](TensorNode& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i] * c;
    };
  }
  return Tensor(out);
}

Tensor add_rowvec(const Tensor& m, const Tensor& v) {
  check_2d("add_rowvec", m);
  if (v.shape().size() != 1 || v.shape()[0] != m.shape()[1]) {
    throw std::invalid_argument("add_rowvec: vector " + shape_str(v.shape()) +
                                " does not match matrix " + shape_str(m.shape()));
  }
  const std::size_t r = m.shape()[0], c = m.shape()[1];
  auto out = make_node(m.shape());
  const auto& md = m.data();
  const auto& vd = v.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out->data[i * c + j] = md[i * c + j] + vd[j];
  auto pm = m.node(), pv = v.node();
  if (wire(out, {pm, pv})) {
    out->backward_fn = [pm, pv, r, c](TensorNode& self) {
      if (pm->requires_grad) pm->accumulate(self.grad);
      if (pv->requires_grad) {
        pv->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) pv->grad[j] += self.grad[i * c + j];
      }
    };
  }
  return Tensor(out);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_2d("matmul", a);
  check_2d("matmul", b);
  const std::size_t m = a.shape()[0], k = a.shape()[1];
  if (b.shape()[0] != k) {
    throw std::invalid_argument("matmul: inner dimensions disagree: " +
                                shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  const std::size_t n = b.shape()[1];
  auto out = make_node({m, n});
  kernels::matmul_nn(a.data().data(), b.data().data(), out->data.data(), m, k, n);
  auto pa = a.node(), pb = b.node();
  if (wire(out, {pa, pb})) {
    out->backward_fn = [pa, pb, m, k, n](TensorNode& self) {
      if (pa->requires_grad) {
        std::vector<double> tmp(m * k);
        kernels::matmul_nt(self.grad.data(), pb->data.data(), tmp.data(), m, n, k);
        pa->accumulate(tmp);
      }
      if (pb->requires_grad) {
        std::vector<double> tmp(k * n);
        kernels::matmul_tn(pa->data.data(), self.grad.data(), tmp.data(), k, m, n);
        pb->accumulate(tmp);
      }
    };
  }
  return Tensor(out);
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  check_2d("matmul_nt", a);
  check_2d("matmul_nt", b);
  const std::size_t m = a.shape()[0], k = a.shape()[1];
  if (b.shape()[1] != k) {
    throw std::invalid_argument("matmul_nt: inner dimensions disagree: " +
                                shape_str(a.shape()) + " x " + shape_str(b.shape()) + "^T");
  }
  const std::size_t n = b.shape()[0];
  auto out = make_node({m, n});
  kernels::matmul_nt(a.data().data(), b.data().data(), out->data.data(), m, k, n);
  auto pa = a.node(), pb = b.node();
  if (wire(out, {pa, pb})) {
    out->backward_fn = [pa, pb, m, k, n](TensorNode& self) {
      if (pa->requires_grad) {
        std::vector<double> tmp(m * k);
        kernels::matmul_nn(self.grad.data(), pb->data.data(), tmp.data(), m, n, k);
        pa->accumulate(tmp);
      }
      if (pb->requires_grad) {
        std::vector<double> tmp(n * k);
        kernels::matmul_tn(self.grad.data(), pa->data.data(), tmp.data(), n, m, k);
        pb->accumulate(tmp);
      }
    };
  }
  return Tensor(out);
}

namespace {

// Softmax backward along contiguous lines: dx = s * (g - dot(g, s)).
void softmax_backward_lines(const std::vector<double>& s, const std::vector<double>& g,
                            std::vector<double>& dx, std::size_t lines, std::size_t len,
                            std::size_t stride, std::size_t line_stride) {
  for (std::size_t l = 0; l < lines; ++l) {
    const std::size_t base = l * line_stride;
    double dot = 0.0;
    for (std::size_t j = 0; j < len; ++j) dot += g[base + j * stride] * s[base + j * stride];
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t idx = base + j * stride;
      dx[idx] += s[idx] * (g[idx] - dot);
    }
  }
}

}  // namespace

Tensor softmax(const Tensor& x, std::size_t axis) {
  check_finite("softmax", x);
  const auto& sh = x.shape();
  if (sh.size() != 1 && sh.size() != 2) {
    throw std::invalid_argument("softmax: expected 1-D or 2-D tensor, got " + shape_str(sh));
  }
  if (axis >= sh.size()) {
    throw std::invalid_argument("softmax: axis " + std::to_string(axis) +
                                " out of range for " + shape_str(sh));
  }
  auto out = make_node(sh);
  std::size_t lines, len, stride, line_stride;
  if (sh.size() == 1) {
    lines = 1, len = sh[0], stride = 1, line_stride = 0;
    kernels::softmax_rows(x.data().data(), out->data.data(), 1, len);
  } else if (axis == 1) {
    lines = sh[0], len = sh[1], stride = 1, line_stride = sh[1];
    kernels::softmax_rows(x.data().data(), out->data.data(), lines, len);
  } else {
    // column-wise: strided serial pass
    lines = sh[1], len = sh[0], stride = sh[1], line_stride = 1;
    const auto& xd = x.data();
    for (std::size_t c = 0; c < lines; ++c) {
      double mx = xd[c];
      for (std::size_t r = 1; r < len; ++r) mx = std::max(mx, xd[r * stride + c]);
      double s = 0.0;
      for (std::size_t r = 0; r < len; ++r) {
        out->data[r * stride + c] = std::exp(xd[r * stride + c] - mx);
        s += out->data[r * stride + c];
      }
      for (std::size_t r = 0; r < len; ++r) out->data[r * stride + c] /= s;
    }
  }
  auto pa = x.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa, lines, len, stride, line_stride](TensorNode& self) {
      pa->ensure_grad();
      softmax_backward_lines(self.data, self.grad, pa->grad, lines, len, stride, line_stride);
    };
  }
  return Tensor(out);
}

Tensor sigmoid(const Tensor& x) {
  auto out = make_node(x.shape());
  const auto& xd = x.data();
  for (std::size_t i = 0; i < xd.size(); ++i) out->data[i] = 1.0 / (1.0 + std::exp(-xd[i]));
  auto pa = x.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa](TensorNode& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const double s = self.data[i];
        pa->grad[i] += self.grad[i] * s * (1.0 - s);
      }
    };
  }
  return Tensor(out);
}

Tensor gelu(const Tensor& x) {
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  constexpr double inv_sqrt2pi = 0.3989422804014326779;
  auto out = make_node(x.shape());
  const auto& xd = x.data();
  for (std::size_t i = 0; i < xd.size(); ++i) {
    out->data[i] = 0.5 * xd[i] * (1.0 + std::erf(xd[i] * inv_sqrt2));
  }
  auto pa = x.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa](TensorNode& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const double v = pa->data[i];
        const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
        const double pdf = inv_sqrt2pi * std::exp(-0.5 * v * v);
        pa->grad[i] += self.grad[i] * (cdf + v * pdf);
      }
    };
  }
  return Tensor(out);
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const auto& sh = x.shape();
  const std::size_t c = sh.back();
  const std::size_t r = x.size() / c;
  if (gain.size() != c || bias.size() != c) {
    throw std::invalid_argument("layer_norm: gain/bias " + shape_str(gain.shape()) + "/" +
                                shape_str(bias.shape()) + " do not match last dim of " +
                                shape_str(sh));
  }
  auto out = make_node(sh);
  const auto& xd = x.data();
  const auto& gd = gain.data();
  const auto& bd = bias.data();
  std::vector<double> xhat(xd.size());
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += xd[i * c + j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double d = xd[i * c + j] - mu;
      var += d * d;
    }
    var /= static_cast<double>(c);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[i] = inv;
    for (std::size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (xd[i * c + j] - mu) * inv;
      out->data[i * c + j] = xhat[i * c + j] * gd[j] + bd[j];
    }
  }
  auto px = x.node();
  auto pg = gain.node();
  auto pb = bias.node();
  if (wire(out, {px, pg, pb})) {
    out->backward_fn = [px, pg, pb, xhat = std::move(xhat), inv_std = std::move(inv_std), r,
                        c](TensorNode& self) {
      const auto& g = self.grad;
      if (px->requires_grad) {
        px->ensure_grad();
        for (std::size_t i = 0; i < r; ++i) {
          double m1 = 0.0, m2 = 0.0;
          for (std::size_t j = 0; j < c; ++j) {
            const double dxhat = g[i * c + j] * pg->data[j];
            m1 += dxhat;
            m2 += dxhat * xhat[i * c + j];
          }
          m1 /= static_cast<double>(c);
          m2 /= static_cast<double>(c);
          for (std::size_t j = 0; j < c; ++j) {
            const double dxhat = g[i * c + j] * pg->data[j];
            px->grad[i * c + j] += inv_std[i] * (dxhat - m1 - xhat[i * c + j] * m2);
          }
        }
      }
      if (pg->requires_grad) {
        pg->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) pg->grad[j] += g[i * c + j] * xhat[i * c + j];
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) pb->grad[j] += g[i * c + j];
      }
    };
  }
  return Tensor(out);
}

Tensor sum(const Tensor& x) {
  auto out = make_node({1});
  double s = 0.0;
  for (double v : x.data()) s += v;
  out->data[0] = s;
  auto pa = x.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa](TensorNode& self) {
      pa->ensure_grad();
      for (double& g : pa->grad) g += self.grad[0];
    };
  }
  return Tensor(out);
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.size());
  auto out = make_node({1});
  double s = 0.0;
  for (double v : x.data()) s += v;
  out->data[0] = s / n;
  auto pa = x.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa, n](TensorNode& self) {
      pa->ensure_grad();
      const double g = self.grad[0] / n;
      for (double& gi : pa->grad) gi += g;
    };
  }
  return Tensor(out);
}

Tensor cross_entropy_rows(const Tensor& logits, std::span<const int> targets) {
  check_2d("cross_entropy", logits);
  const std::size_t t = logits.shape()[0], v = logits.shape()[1];
  if (targets.size() != t) {
    throw std::invalid_argument("cross_entropy: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(t) + " rows");
  }
  for (int id : targets) {
    if (id < 0 || static_cast<std::size_t>(id) >= v) {
      throw std::out_of_range("cross_entropy: target index " + std::to_string(id) +
                              " outside vocabulary [0, " + std::to_string(v) + ")");
    }
  }
  auto out = make_node({t});
  const auto& xd = logits.data();
  for (std::size_t i = 0; i < t; ++i) {
    double mx = xd[i * v];
    for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, xd[i * v + j]);
    double s = 0.0;
    for (std::size_t j = 0; j < v; ++j) s += std::exp(xd[i * v + j] - mx);
    out->data[i] = mx + std::log(s) - xd[i * v + static_cast<std::size_t>(targets[i])];
  }
  auto pa = logits.node();
  if (wire(out, {pa})) {
    std::vector<int> tg(targets.begin(), targets.end());
    out->backward_fn = [pa, tg = std::move(tg), t, v](TensorNode& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < t; ++i) {
        const double gi = self.grad[i];
        if (gi == 0.0) continue;
        double mx = pa->data[i * v];
        for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, pa->data[i * v + j]);
        double s = 0.0;
        for (std::size_t j = 0; j < v; ++j) s += std::exp(pa->data[i * v + j] - mx);
        for (std::size_t j = 0; j < v; ++j) {
          const double p = std::exp(pa->data[i * v + j] - mx) / s;
          pa->grad[i * v + j] += gi * p;
        }
        pa->grad[i * v + static_cast<std::size_t>(tg[i])] -= gi;
      }
    };
  }
  return Tensor(out);
}

Tensor cross_entropy(const Tensor& logits, int target) {
  if (logits.shape().size() != 1) {
    throw std::invalid_argument("cross_entropy: expected 1-D logits, got " +
                                shape_str(logits.shape()));
  }
  // reshape to a single row, then reuse the row-wise op
  auto row = make_node({1, logits.shape()[0]});
  row->data = logits.data();
  auto pa = logits.node();
  if (wire(row, {pa})) {
    row->backward_fn = [pa](TensorNode& self) { pa->accumulate(self.grad); };
  }
  const int t[1] = {target};
  return mean(cross_entropy_rows(Tensor(row), std::span<const int>(t, 1)));
}

Tensor mse(const Tensor& a, const Tensor& b) {
  check_same_shape("mse", a, b);
  const double n = static_cast<double>(a.size());
  auto out = make_node({1});
  const auto& ad = a.data();
  const auto& bd = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < ad.size(); ++i) {
    const double d = ad[i] - bd[i];
    s += d * d;
  }
  out->data[0] = s / n;
  auto pa = a.node(), pb = b.node();
  if (wire(out, {pa, pb})) {
    out->backward_fn = [pa, pb, n](TensorNode& self) {
      const double g = 2.0 * self.grad[0] / n;
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < pa->data.size(); ++i)
          pa->grad[i] += g * (pa->data[i] - pb->data[i]);
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < pb->data.size(); ++i)
          pb->grad[i] -= g * (pa->data[i] - pb->data[i]);
      }
    };
  }
  return Tensor(out);
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  check_2d("gather_rows", table);
  const std::size_t v = table.shape()[0], d = table.shape()[1];
  for (std::size_t idx : indices) {
    if (idx >= v) {
      throw std::out_of_range("gather_rows: row " + std::to_string(idx) +
                              " outside table " + shape_str(table.shape()));
    }
  }
  auto out = make_node({indices.size(), d});
  const auto& td = table.data();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double* src = td.data() + indices[i] * d;
    std::copy(src, src + d, out->data.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  auto pa = table.node();
  if (wire(out, {pa})) {
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    out->backward_fn = [pa, idx = std::move(idx), d](TensorNode& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) pa->grad[idx[i] * d + j] += self.grad[i * d + j];
    };
  }
  return Tensor(out);
}

Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t n) {
  check_2d("slice_cols", x);
  const std::size_t r = x.shape()[0], c = x.shape()[1];
  if (start + n > c) {
    throw std::invalid_argument("slice_cols: [" + std::to_string(start) + ", " +
                                std::to_string(start + n) + ") outside " + shape_str(x.shape()));
  }
  auto out = make_node({r, n});
  const auto& xd = x.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) out->data[i * n + j] = xd[i * c + start + j];
  auto pa = x.node();
  if (wire(out, {pa})) {
    out->backward_fn = [pa, start, n, r, c](TensorNode& self) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j)
          pa->grad[i * c + start + j] += self.grad[i * n + j];
    };
  }
  return Tensor(out);
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const std::size_t r = parts[0].shape()[0];
  std::size_t c = 0;
  for (const Tensor& p : parts) {
    check_2d("concat_cols", p);
    if (p.shape()[0] != r) {
      throw std::invalid_argument("concat_cols: row mismatch " + shape_str(parts[0].shape()) +
                                  " vs " + shape_str(p.shape()));
    }
    c += p.shape()[1];
  }
  auto out = make_node({r, c});
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    const std::size_t pc = p.shape()[1];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < pc; ++j) out->data[i * c + off + j] = p.data()[i * pc + j];
    off += pc;
  }
  std::vector<std::shared_ptr<TensorNode>> ps;
  for (const Tensor& p : parts) ps.push_back(p.node());
  if (wire(out, ps)) {
    out->backward_fn = [ps, r, c](TensorNode& self) {
      std::size_t off = 0;
      for (const auto& p : ps) {
        const std::size_t pc = p->shape[1];
        if (p->requires_grad) {
          p->ensure_grad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < pc; ++j)
              p->grad[i * pc + j] += self.grad[i * c + off + j];
        }
        off += pc;
      }
    };
  }
  return Tensor(out);
}

}  // namespace microsum
