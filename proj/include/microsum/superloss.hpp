#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Confidence-aware curriculum loss: wraps a per-sample task loss l as
//   L(l, sigma) = (l - tau) * sigma + lambda * (ln sigma)^2
// where tau tracks the typical task loss. The minimizing confidence has the
// closed form sigma* = exp(-W(z)), z = 1/2 * max(-2/e, (l - tau) / lambda),
// with W the principal branch of the Lambert W function. sigma* acts as a
// dynamic sample weight: easy samples (l < tau) are upweighted, hard ones
// downweighted.
namespace microsum {

// Principal branch W0 on [-1/e, inf): returns w with w * e^w = z.
// Series-seeded Halley iteration; |w * e^w - z| <= 1e-12 * max(1, |z|).
// Throws std::domain_error for z < -1/e - 1e-12.
double lambert_w0(double z);

enum class TauPolicy { static_value, batch_mean, ema };

std::string tau_policy_name(TauPolicy p);
TauPolicy tau_policy_from_name(const std::string& name);

struct CurriculumState {
  double lambda = 1.0;
  TauPolicy policy = TauPolicy::ema;
  double momentum = 0.9;      // ema only, must be in (0, 1)
  double tau = 0.0;
  bool tau_initialized = false;
  std::size_t step_count = 0;

  static CurriculumState make_static(double tau, double lambda = 1.0);
  static CurriculumState make_batch_mean(double lambda = 1.0);
  static CurriculumState make_ema(double momentum = 0.9, double lambda = 1.0);
};

// Closed-form confidence sigma* in (0, e]. Requires an initialized tau.
double sigma_star(double loss, const CurriculumState& state);

struct SuperLossValue {
  double value = 0.0;   // L(l, sigma*)
  double weight = 0.0;  // sigma*, the factor applied to the sample's gradient
};

SuperLossValue superloss(double loss, const CurriculumState& state);

// Advances tau from a batch of detached task losses. static: unchanged;
// batch_mean: tau = mean; ema: tau <- m*tau + (1-m)*mean, seeded with the
// first batch mean. Increments step_count.
void update_tau(CurriculumState& state, const std::vector<double>& batch_losses);

// Per-sample accounting for one training step.
struct SampleWeightReport {
  std::vector<double> task_loss;
  std::vector<double> confidence;  // sigma*
  std::vector<double> superloss_value;
};

}  // namespace microsum
