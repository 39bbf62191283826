#pragma once

#include <optional>

#include "nrl/types.hpp"

namespace nrl {

enum class HedgeVariant { vanilla, optimistic };

// Exponential-weights learner state. Weights are kept in log-space and
// renormalized by max-subtraction, so long runs with large eta*t products do
// not overflow.
struct HedgeState {
  HedgeVariant variant = HedgeVariant::vanilla;
  double eta = 0.0;
  Vector log_weights;      // unnormalized, max-subtracted
  MixedStrategy strategy;  // softmax of log_weights
  LossVector prev_loss;    // ell^{t-1}, starts at zero
  Vector cumulative_loss;  // diagnostics only

  int num_actions() const { return static_cast<int>(log_weights.size()); }
};

HedgeState hedge_init(int num_actions, double eta, HedgeVariant variant,
                      const std::optional<MixedStrategy>& initial = std::nullopt);

// One update from the loss vector observed this round. Vanilla uses
// exp(-eta*ell); optimistic uses exp(-eta*(2*ell - prev_ell)).
void hedge_step(HedgeState& state, const LossVector& loss);

enum class EtaRecipe { two_player_opt, bm_swap, meta_swap };

// Closed-form learning rates, natural log, all hidden constants taken as 1:
//   two_player_opt: (ln n / T)^{1/6}
//   bm_swap:        (n ln n / (m^2 T))^{1/4}
//   meta_swap:      (ln n / (n m^2 T))^{1/4}
double theorem_eta(EtaRecipe kind, int n, int m, long long T);

}  // namespace nrl
