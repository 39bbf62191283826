#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nrl/game.hpp"
#include "nrl/swap.hpp"
#include "nrl/types.hpp"

namespace nrl {

enum class LearnerKind {
  hedge_vanilla,
  hedge_optimistic,
  bm_optimistic_hedge,
  meta_expert_full,
  meta_expert_single,
  bm_wrapper,
};

const char* learner_kind_name(LearnerKind kind);
LearnerKind learner_kind_from_name(const std::string& name);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::hedge_vanilla;
  // eta is expressed in the game's stored loss units. For raw-scale games the
  // learner internally runs on unit losses with rate 2*eta, which reproduces
  // the raw-loss trajectory exactly (Hedge is shift invariant).
  double eta = 0.1;
  std::optional<MixedStrategy> initial;  // hedge variants only
};

// Complete per-round record of one run. Loss vectors and realized losses are
// stored in unit ([0,1]) scale; raw-unit views are derived via the game map.
struct Trace {
  Game game;
  std::vector<LearnerConfig> configs;
  std::vector<double> effective_etas;  // unit-scale rates actually used
  std::uint64_t seed = 0;
  // indexed [player][round]
  std::vector<std::vector<MixedStrategy>> strategies;
  std::vector<std::vector<LossVector>> losses;
  std::vector<MixedStrategy> final_strategies;  // x^{T+1} per player

  int num_rounds() const { return strategies.empty() ? 0 : static_cast<int>(strategies[0].size()); }
  int num_players() const { return static_cast<int>(strategies.size()); }
  double realized_loss(int player, int t) const {  // unit scale, round index 0-based
    return strategies[player][t].dot(losses[player][t]);
  }
};

// Simultaneous-move repeated play: per round, all strategies are fixed first,
// then all loss vectors are computed from the joint profile, then every
// learner steps. Deterministic given (game, configs, T, seed).
Trace run(const Game& game, const std::vector<LearnerConfig>& configs, int T, std::uint64_t seed);

struct RegretReport {
  double external = 0.0;
  int best_action = 0;
  double swap = 0.0;
  std::vector<int> best_swap;
};

// Eq.-style external regret over the first `upto` rounds (unit scale; raw
// units are exactly twice this for raw-scale games).
double external_regret(const Trace& trace, int player, int upto);

// Swap regret via the per-action argmin decomposition, with the witness swap
// function (ties to the smallest action index).
std::pair<double, std::vector<int>> swap_regret(const Trace& trace, int player, int upto);

// Independent check: minimize over all n^n swap functions explicitly.
// Exponential; n <= 4.
double brute_force_swap_regret(const Trace& trace, int player, int upto);

RegretReport regret_report(const Trace& trace, int player, int upto);

// Max-player external regret maximized over rounds [T, T + floor(sqrt(T))].
// The trace must contain at least T + floor(sqrt(T)) rounds.
double window_max_regret(const Trace& trace, int T);

// KL divergence (natural log) from the uniform center (0.5, 0.5) to x^t.
// Two-action players only; probabilities below 1e-300 give +infinity.
double kl_to_center(const Trace& trace, int player, int t);

struct RvuTerms {
  double regret = 0.0;        // unit scale
  double log_term = 0.0;      // 2 ln n / eta
  double loss_variation = 0.0;      // eta * sum ||ell^t - ell^{t-1}||_inf^2
  double strategy_variation = 0.0;  // (1/4 eta) * sum ||x^{t+1} - x^t||_1^2
  double slack() const { return log_term + loss_variation - strategy_variation - regret; }
};

// The four quantities of the optimistic-Hedge regret inequality, for audits.
RvuTerms rvu_terms(const Trace& trace, int player);

struct PoaReport {
  double avg_welfare = 0.0;
  double bound = 0.0;
};

// Average social cost of the trace against the smooth-game bound
// lambda/(1-mu-eps) * OPT + (m/T) * (1/(1-mu-eps)) * (n ln n / eps).
PoaReport poa_report(const Trace& trace, const SmoothGameSpec& spec, double eps);

// CSV trace export with JSON sidecar (schema v1); audit subcommands re-read
// these files.
void write_trace_csv(const Trace& trace, const std::string& csv_path, const std::string& sidecar_path);
Trace read_trace_csv(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace nrl
