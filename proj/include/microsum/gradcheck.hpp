#pragma once

#include <functional>
#include <string>
#include <vector>

#include "microsum/tensor.hpp"

namespace microsum {

struct GradCheckParam {
  std::string name;
  Tensor tensor;
};

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  double tol = 0.0;
  std::vector<GradCheckEntry> entries;  // frozen (requires_grad=false) params excluded
  bool pass() const { return max_rel_error < tol; }
  std::string summary() const;
};

// Compares the analytic gradient of the scalar-valued computation `f` against
// central finite differences (f(x+eps) - f(x-eps)) / 2eps for every entry of
// every trainable parameter. Relative error uses |a-n| / max(|a|, |n|, 1e-8).
// Throws std::runtime_error if f is not deterministic (two evaluations of the
// unperturbed point must agree bitwise).
GradCheckReport check_gradients(const std::function<Tensor()>& f,
                                const std::vector<GradCheckParam>& params,
                                double eps = 1e-4, double tol = 1e-4);

}  // namespace microsum
