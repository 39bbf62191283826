#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nrl/dynamics.hpp"

namespace nrl {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (ln T, ln metric)
};

// Ordinary least squares on (ln T, ln metric). Needs >= 4 points; metrics
// must be positive unless allow_offset adds machine epsilon.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points, bool allow_offset = false);

enum class EtaRuleKind { fixed, theorem, inv_quarter_root };

struct EtaRule {
  EtaRuleKind kind = EtaRuleKind::fixed;
  double value = 0.1;                          // fixed
  EtaRecipe recipe = EtaRecipe::two_player_opt;  // theorem
  double resolve(int n, int m, long long T) const;
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::hedge_vanilla;
  EtaRule eta;
  std::optional<MixedStrategy> initial;
};

enum class GameKind { canonical, random, smooth, file };

struct GameSpecConfig {
  GameKind kind = GameKind::random;
  CanonicalGame canonical = CanonicalGame::matching_pennies_G1;
  int players = 2;
  int actions = 2;   // also resource count for smooth games
  std::string path;  // file kind
};

enum class MetricKind {
  max_external_regret,
  mean_external_regret,
  max_swap_regret,
  mean_swap_regret,
  window_max_regret,
};

const char* metric_name(MetricKind metric);

struct ExperimentConfig {
  std::string name = "experiment";
  GameSpecConfig game;
  std::vector<LearnerSpec> learners;  // one entry is broadcast to all players
  std::vector<long long> t_grid;
  std::vector<std::uint64_t> seeds;
  MetricKind metric = MetricKind::max_external_regret;
  bool raw_units = false;
  std::string out_dir = "results";
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig builtin_experiment(const std::string& name);

struct ExperimentCell {
  long long t = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  bool degenerate = false;  // nonpositive metric, excluded from the log fit
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ExperimentCell> cells;           // sorted by (T, seed)
  std::vector<std::pair<long long, double>> means;  // per T, degenerate cells excluded
  int degenerate_cells = 0;
  std::optional<SlopeFit> fit;
};

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

// Write <out>/<name>_cells.csv and <out>/<name>_summary.json.
void write_experiment_outputs(const ExperimentResult& result);

struct ProbeReport {
  std::string regime;  // which canonical game the eta was routed to
  double eta = 0.0;
  long long t = 0;
  double regret_raw = 0.0;  // player-1 regret (G2/G3) or window max regret (G1)
};

// Routes eta to the matching lower-bound construction (eta < 8/sqrt(T): G2;
// eta >= 3: G3; otherwise G1), runs both players on vanilla Hedge from
// (0.4, 0.6), and reports the raw-unit regret.
ProbeReport lower_bound_probe(long long T, double eta);

}  // namespace nrl
