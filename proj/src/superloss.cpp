#include "microsum/superloss.hpp"

#include <cmath>
#include <stdexcept>

namespace microsum {

namespace {
constexpr double kInvE = 0.36787944117144232160;  // 1/e
constexpr double kE = 2.71828182845904523536;
}  // namespace

double lambert_w0(double z) {
  if (!std::isfinite(z)) throw std::domain_error("lambert_w0: non-finite argument");
  if (z < -kInvE - 1e-12) {
    throw std::domain_error("lambert_w0: argument " + std::to_string(z) +
                            " below branch point -1/e");
  }
  if (z == 0.0) return 0.0;

  const double p2 = 2.0 * (kE * z + 1.0);
  double w;
  if (p2 <= 0.0) return -1.0;  // at (or within rounding of) the branch point
  if (p2 < 2e-8) {
    // Branch-point series in p = sqrt(2(ez+1)); here the residual target is
    // met by the series alone and Halley's denominator is ill-conditioned.
    const double p = std::sqrt(p2);
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }

  if (z < -0.25) {
    const double p = std::sqrt(p2);
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (z < 2.0) {
    // series around 0: W(z) = z - z^2 + 3/2 z^3 - ...
    w = z * (1.0 - z * (1.0 - 1.5 * z));
    if (z > 0.5) w = std::log1p(z) * 0.7;  // crude but inside the basin
  } else {
    const double lz = std::log(z);
    w = lz - std::log(lz);
  }

  for (int it = 0; it < 20; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0) break;
    const double step = f / denom;
    w -= step;
    if (std::fabs(step) <= 1e-14 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

std::string tau_policy_name(TauPolicy p) {
  switch (p) {
    case TauPolicy::static_value: return "static";
    case TauPolicy::batch_mean: return "batch_mean";
    case TauPolicy::ema: return "ema";
  }
  return "?";
}

TauPolicy tau_policy_from_name(const std::string& name) {
  if (name == "static") return TauPolicy::static_value;
  if (name == "batch_mean") return TauPolicy::batch_mean;
  if (name == "ema") return TauPolicy::ema;
  throw std::invalid_argument("unknown tau policy '" + name +
                              "' (expected static|batch_mean|ema)");
}

CurriculumState CurriculumState::make_static(double tau, double lambda) {
  CurriculumState s;
  s.lambda = lambda;
  s.policy = TauPolicy::static_value;
  s.tau = tau;
  s.tau_initialized = true;
  return s;
}

CurriculumState CurriculumState::make_batch_mean(double lambda) {
  CurriculumState s;
  s.lambda = lambda;
  s.policy = TauPolicy::batch_mean;
  return s;
}

CurriculumState CurriculumState::make_ema(double momentum, double lambda) {
  CurriculumState s;
  s.lambda = lambda;
  s.policy = TauPolicy::ema;
  s.momentum = momentum;
  return s;
}

double sigma_star(double loss, const CurriculumState& state) {
  if (!std::isfinite(loss)) throw std::domain_error("sigma_star: non-finite loss");
  if (!(state.lambda > 0.0)) throw std::invalid_argument("sigma_star: lambda must be > 0");
  if (!state.tau_initialized) throw std::logic_error("sigma_star: tau not initialized");
  const double beta = (loss - state.tau) / state.lambda;
  const double z = 0.5 * std::max(-2.0 * kInvE, beta);
  return std::exp(-lambert_w0(z));
}

SuperLossValue superloss(double loss, const CurriculumState& state) {
  const double sigma = sigma_star(loss, state);
  const double ls = std::log(sigma);
  SuperLossValue out;
  out.weight = sigma;
  out.value = (loss - state.tau) * sigma + state.lambda * ls * ls;
  return out;
}

void update_tau(CurriculumState& state, const std::vector<double>& batch_losses) {
  if (batch_losses.empty()) throw std::invalid_argument("update_tau: empty batch");
  double m = 0.0;
  for (double l : batch_losses) {
    if (!std::isfinite(l)) throw std::domain_error("update_tau: non-finite loss in batch");
    m += l;
  }
  m /= static_cast<double>(batch_losses.size());
  switch (state.policy) {
    case TauPolicy::static_value:
      break;  // tau fixed at construction
    case TauPolicy::batch_mean:
      state.tau = m;
      state.tau_initialized = true;
      break;
    case TauPolicy::ema:
      if (!(state.momentum > 0.0 && state.momentum < 1.0)) {
        throw std::invalid_argument("update_tau: ema momentum must be in (0, 1)");
      }
      if (!state.tau_initialized) {
        state.tau = m;
        state.tau_initialized = true;
      } else {
        state.tau = state.momentum * state.tau + (1.0 - state.momentum) * m;
      }
      break;
  }
  ++state.step_count;
}

}  // namespace microsum
