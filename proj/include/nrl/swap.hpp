#pragma once

#include <vector>

#include "nrl/hedge.hpp"
#include "nrl/types.hpp"

namespace nrl {

// Blum-Mansour external-to-internal reduction driven by optimistic Hedge.
// Inner learner i receives the scaled loss x^t(i) * ell^t; the strategy
// played each round is the stationary distribution of the chain whose rows
// are the inner strategies.
struct BMState {
  double eta = 0.0;
  bool eta_warning = false;  // eta above the 1/6 guarantee boundary
  std::vector<HedgeState> inner;
  Matrix q;            // row i is inner[i].strategy
  MixedStrategy x;     // stationary distribution of q, played this round
  MixedStrategy prev_x;
  LossVector prev_loss;

  int num_actions() const { return static_cast<int>(inner.size()); }
};

BMState bm_init(int num_actions, double eta);

// Consume the loss observed while playing state.x; returns the strategy for
// the next round (also left in state.x).
MixedStrategy bm_step(BMState& state, const LossVector& loss);

enum class MetaMode { full, single_coordinate };

// Optimistic Hedge over swap-matrix experts. In full mode the expert set is
// all n^n swap functions (n <= 4); in single_coordinate mode it is the
// identity plus the n(n-1) maps differing from it in one coordinate.
struct MetaExpertState {
  MetaMode mode = MetaMode::full;
  double eta = 0.0;
  std::vector<std::vector<int>> experts;  // each maps action -> action
  Vector log_weights;                     // over experts
  Vector prev_expert_loss;                // c^{t-1}(phi), starts at zero
  Matrix q;                               // sum_phi q(phi) S^phi
  MixedStrategy x;
  MixedStrategy prev_x;
  LossVector prev_loss;
};

MetaExpertState meta_init(int num_actions, double eta, MetaMode mode);
MixedStrategy meta_step(MetaExpertState& state, const LossVector& loss);

// Expert weights as a distribution (softmax of log_weights).
Vector meta_weights(const MetaExpertState& state);

// Doubling wrapper around BM-Optimistic-Hedge: restarts the inner run with a
// halved-budget learning rate whenever the accumulated variation
// sum ||ell^t - ell^{t-1}||_inf^2 + sum ||x^t - x^{t-1}||_1^2 reaches B_r.
struct WrapperState {
  int round_index = 1;
  double budget = 1.0;   // B_r
  double eta_r = 0.0;
  double eta_cap = 0.0;  // the fixed eta the rate is clipped to
  double accumulated_variation = 0.0;
  BMState inner;
  MixedStrategy prev_x;
  LossVector prev_loss;
};

WrapperState wrapper_init(int num_actions, double eta_cap);
MixedStrategy wrapper_step(WrapperState& state, const LossVector& loss);

// Max l1 step between consecutive strategies of a trace.
double strategy_drift(const std::vector<MixedStrategy>& trace);

}  // namespace nrl
