#include "nrl/hedge.hpp"

#include <cmath>

namespace nrl {

namespace {

void refresh_strategy(HedgeState& state) {
  state.log_weights.array() -= state.log_weights.maxCoeff();
  const Vector w = state.log_weights.array().exp();
  state.strategy = w / w.sum();
}

}  // namespace

HedgeState hedge_init(int num_actions, double eta, HedgeVariant variant,
                      const std::optional<MixedStrategy>& initial) {
  if (num_actions < 1) throw std::invalid_argument("hedge_init: need at least one action");
  if (!(eta > 0.0)) throw std::invalid_argument("hedge_init: eta must be positive");
  HedgeState state;
  state.variant = variant;
  state.eta = eta;
  state.prev_loss = Vector::Zero(num_actions);
  state.cumulative_loss = Vector::Zero(num_actions);
  if (initial) {
    if (initial->size() != num_actions) {
      throw std::invalid_argument("hedge_init: initial strategy length mismatch");
    }
    require_distribution(*initial, "hedge_init");
    if ((initial->array() <= 0.0).any()) {
      throw std::invalid_argument("hedge_init: initial strategy must have full support");
    }
    state.log_weights = initial->array().log();
  } else {
    state.log_weights = Vector::Zero(num_actions);
  }
  refresh_strategy(state);
  return state;
}

void hedge_step(HedgeState& state, const LossVector& loss) {
  if (loss.size() != state.log_weights.size()) {
    throw std::invalid_argument("hedge_step: loss length mismatch");
  }
  if ((loss.array() < -kLossRangeTol).any() || (loss.array() > 1.0 + kLossRangeTol).any()) {
    throw std::invalid_argument("hedge_step: loss entry outside [0,1]");
  }
  if (state.variant == HedgeVariant::vanilla) {
    state.log_weights -= state.eta * loss;
  } else {
    state.log_weights -= state.eta * (2.0 * loss - state.prev_loss);
  }
  refresh_strategy(state);
  state.prev_loss = loss;
  state.cumulative_loss += loss;
}

double theorem_eta(EtaRecipe kind, int n, int m, long long T) {
  if (n < 2 || T < 1) throw std::invalid_argument("theorem_eta: need n >= 2 and T >= 1");
  const double log_n = std::log(static_cast<double>(n));
  switch (kind) {
    case EtaRecipe::two_player_opt:
      return std::pow(log_n / static_cast<double>(T), 1.0 / 6.0);
    case EtaRecipe::bm_swap:
      if (m < 2) throw std::invalid_argument("theorem_eta: need m >= 2");
      return std::pow(n * log_n / (static_cast<double>(m) * m * T), 0.25);
    case EtaRecipe::meta_swap:
      if (m < 2) throw std::invalid_argument("theorem_eta: need m >= 2");
      return std::pow(log_n / (static_cast<double>(n) * m * m * T), 0.25);
  }
  throw std::invalid_argument("theorem_eta: unknown recipe");
}

}  // namespace nrl
