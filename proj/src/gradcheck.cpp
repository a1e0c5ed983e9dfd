#include "microsum/gradcheck.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace microsum {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (pass() ? "PASS" : "FAIL") << " max_rel_error=" << max_rel_error
     << " tol=" << tol << " params=" << entries.size();
  return os.str();
}

GradCheckReport check_gradients(const std::function<Tensor()>& f,
                                const std::vector<GradCheckParam>& params,
                                double eps, double tol) {
  if (eps <= 0.0) throw std::invalid_argument("check_gradients: eps must be positive");
  GradCheckReport report;
  report.tol = tol;

  const double base1 = f().value();
  const double base2 = f().value();
  if (std::memcmp(&base1, &base2, sizeof(double)) != 0) {
    throw std::runtime_error("check_gradients: computation is not deterministic");
  }

  for (const auto& p : params) p.tensor.zero_grad();
  Tensor out = f();
  out.backward();

  for (const auto& p : params) {
    if (!p.tensor.requires_grad()) continue;  // frozen: excluded from the report
    GradCheckEntry entry;
    entry.name = p.name;
    std::vector<double>& theta = p.tensor.data();
    const bool has_grad = p.tensor.has_grad();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double analytic = has_grad ? p.tensor.grad()[i] : 0.0;
      const double saved = theta[i];
      theta[i] = saved + eps;
      const double up = f().value();
      theta[i] = saved - eps;
      const double down = f().value();
      theta[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(analytic - numeric) / denom;
      if (rel > entry.max_rel_error) {
        entry.max_rel_error = rel;
        entry.worst_index = i;
        entry.analytic = analytic;
        entry.numeric = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace microsum
