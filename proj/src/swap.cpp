#include "nrl/swap.hpp"

#include <cmath>

#include "nrl/markov.hpp"

namespace nrl {

namespace {

Matrix assemble_chain(const std::vector<HedgeState>& inner) {
  const int n = static_cast<int>(inner.size());
  Matrix q(n, n);
  for (int i = 0; i < n; ++i) q.row(i) = inner[i].strategy.transpose();
  return q;
}

void check_loss(const LossVector& loss, int n, const char* who) {
  if (loss.size() != n) throw std::invalid_argument(std::string(who) + ": loss length mismatch");
  if ((loss.array() < -kLossRangeTol).any() || (loss.array() > 1.0 + kLossRangeTol).any()) {
    throw std::invalid_argument(std::string(who) + ": loss entry outside [0,1]");
  }
}

}  // namespace

BMState bm_init(int num_actions, double eta) {
  if (num_actions < 2) throw std::invalid_argument("bm_init: need at least two actions");
  if (!(eta > 0.0)) throw std::invalid_argument("bm_init: eta must be positive");
  BMState state;
  state.eta = eta;
  state.eta_warning = eta > 1.0 / 6.0;  // Lemma-grade drift bound only holds below 1/6
  state.inner.reserve(num_actions);
  for (int i = 0; i < num_actions; ++i) {
    state.inner.push_back(hedge_init(num_actions, eta, HedgeVariant::optimistic));
  }
  state.q = assemble_chain(state.inner);
  state.x = MixedStrategy::Constant(num_actions, 1.0 / num_actions);
  state.prev_x = state.x;
  state.prev_loss = Vector::Zero(num_actions);
  return state;
}

MixedStrategy bm_step(BMState& state, const LossVector& loss) {
  const int n = state.num_actions();
  check_loss(loss, n, "bm_step");
  // Each inner learner gets the played mass times the common loss vector.
  for (int i = 0; i < n; ++i) {
    hedge_step(state.inner[i], state.x[i] * loss);
  }
  state.q = assemble_chain(state.inner);
  state.prev_x = state.x;
  state.prev_loss = loss;
  state.x = stationary(state.q);
  return state.x;
}

namespace {

std::vector<std::vector<int>> build_experts(int n, MetaMode mode) {
  std::vector<std::vector<int>> experts;
  if (mode == MetaMode::full) {
    if (n > 4) throw CapacityError("meta_init: full mode needs n <= 4");
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= n;
    experts.reserve(count);
    std::vector<int> phi(n, 0);
    for (std::size_t code = 0; code < count; ++code) {
      std::size_t rest = code;
      for (int i = 0; i < n; ++i) {
        phi[i] = static_cast<int>(rest % n);
        rest /= n;
      }
      experts.push_back(phi);
    }
  } else {
    std::vector<int> identity(n);
    for (int i = 0; i < n; ++i) identity[i] = i;
    experts.push_back(identity);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        std::vector<int> phi = identity;
        phi[i] = j;
        experts.push_back(phi);
      }
    }
  }
  return experts;
}

Matrix mixture_chain(const MetaExpertState& state, const Vector& weights) {
  const int n = static_cast<int>(state.x.size());
  Matrix q = Matrix::Zero(n, n);
  for (std::size_t e = 0; e < state.experts.size(); ++e) {
    const double w = weights[static_cast<Eigen::Index>(e)];
    for (int i = 0; i < n; ++i) q(i, state.experts[e][i]) += w;
  }
  return q;
}

}  // namespace

MetaExpertState meta_init(int num_actions, double eta, MetaMode mode) {
  if (num_actions < 2) throw std::invalid_argument("meta_init: need at least two actions");
  if (!(eta > 0.0)) throw std::invalid_argument("meta_init: eta must be positive");
  MetaExpertState state;
  state.mode = mode;
  state.eta = eta;
  state.experts = build_experts(num_actions, mode);
  const Eigen::Index num_experts = static_cast<Eigen::Index>(state.experts.size());
  state.log_weights = Vector::Zero(num_experts);
  state.prev_expert_loss = Vector::Zero(num_experts);
  state.x = MixedStrategy::Constant(num_actions, 1.0 / num_actions);
  state.prev_x = state.x;
  state.prev_loss = Vector::Zero(num_actions);
  state.q = mixture_chain(state, meta_weights(state));
  return state;
}

Vector meta_weights(const MetaExpertState& state) {
  const Vector w = (state.log_weights.array() - state.log_weights.maxCoeff()).exp();
  return w / w.sum();
}

MixedStrategy meta_step(MetaExpertState& state, const LossVector& loss) {
  const int n = static_cast<int>(state.x.size());
  check_loss(loss, n, "meta_step");
  // Per-expert loss this round: c(phi) = x^t S^phi ell^t.
  const Eigen::Index num_experts = static_cast<Eigen::Index>(state.experts.size());
  Vector expert_loss(num_experts);
  for (Eigen::Index e = 0; e < num_experts; ++e) {
    double c = 0.0;
    for (int j = 0; j < n; ++j) c += state.x[j] * loss[state.experts[e][j]];
    expert_loss[e] = c;
  }
  state.log_weights -= state.eta * (2.0 * expert_loss - state.prev_expert_loss);
  state.log_weights.array() -= state.log_weights.maxCoeff();
  state.prev_expert_loss = expert_loss;
  state.q = mixture_chain(state, meta_weights(state));
  state.prev_x = state.x;
  state.prev_loss = loss;
  state.x = stationary(state.q);
  return state.x;
}

WrapperState wrapper_init(int num_actions, double eta_cap) {
  if (!(eta_cap > 0.0)) throw std::invalid_argument("wrapper_init: eta_cap must be positive");
  WrapperState state;
  state.eta_cap = eta_cap;
  state.round_index = 1;
  state.budget = 1.0;
  const double log_n = std::log(static_cast<double>(num_actions));
  state.eta_r = std::min(std::sqrt(num_actions * log_n / state.budget), eta_cap);
  state.inner = bm_init(num_actions, state.eta_r);
  state.prev_x = state.inner.x;
  state.prev_loss = Vector::Zero(num_actions);
  state.accumulated_variation = 0.0;
  return state;
}

MixedStrategy wrapper_step(WrapperState& state, const LossVector& loss) {
  const int n = state.inner.num_actions();
  check_loss(loss, n, "wrapper_step");
  const MixedStrategy played = state.inner.x;
  const double dl = linf_distance(loss, state.prev_loss);
  const double dx = l1_distance(played, state.prev_x);
  state.accumulated_variation += dl * dl + dx * dx;
  bm_step(state.inner, loss);
  if (state.accumulated_variation >= state.budget) {
    state.round_index += 1;
    state.budget *= 2.0;
    const double log_n = std::log(static_cast<double>(n));
    state.eta_r = std::min(std::sqrt(n * log_n / state.budget), state.eta_cap);
    state.inner = bm_init(n, state.eta_r);
    state.accumulated_variation = 0.0;
    state.prev_x = state.inner.x;
    state.prev_loss = Vector::Zero(n);
  } else {
    state.prev_x = played;
    state.prev_loss = loss;
  }
  return state.inner.x;
}

double strategy_drift(const std::vector<MixedStrategy>& trace) {
  if (trace.size() < 2) throw std::invalid_argument("strategy_drift: need at least two rounds");
  double drift = 0.0;
  for (std::size_t t = 1; t < trace.size(); ++t) {
    drift = std::max(drift, l1_distance(trace[t], trace[t - 1]));
  }
  return drift;
}

}  // namespace nrl
