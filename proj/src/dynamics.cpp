#include "nrl/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include <json.hpp>

namespace nrl {

const char* learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::hedge_vanilla: return "hedge_vanilla";
    case LearnerKind::hedge_optimistic: return "hedge_optimistic";
    case LearnerKind::bm_optimistic_hedge: return "bm_optimistic_hedge";
    case LearnerKind::meta_expert_full: return "meta_expert_full";
    case LearnerKind::meta_expert_single: return "meta_expert_single";
    case LearnerKind::bm_wrapper: return "bm_wrapper";
  }
  return "unknown";
}

LearnerKind learner_kind_from_name(const std::string& name) {
  for (LearnerKind kind :
       {LearnerKind::hedge_vanilla, LearnerKind::hedge_optimistic, LearnerKind::bm_optimistic_hedge,
        LearnerKind::meta_expert_full, LearnerKind::meta_expert_single, LearnerKind::bm_wrapper}) {
    if (name == learner_kind_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown learner kind: " + name);
}

namespace {

// Uniform stepping interface over the learner state variants.
struct Learner {
  std::variant<HedgeState, BMState, MetaExpertState, WrapperState> state;

  MixedStrategy strategy() const {
    return std::visit(
        [](const auto& s) -> MixedStrategy {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HedgeState>) {
            return s.strategy;
          } else if constexpr (std::is_same_v<T, WrapperState>) {
            return s.inner.x;
          } else {
            return s.x;
          }
        },
        state);
  }

  void step(const LossVector& unit_loss) {
    std::visit(
        [&](auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HedgeState>) {
            hedge_step(s, unit_loss);
          } else if constexpr (std::is_same_v<T, BMState>) {
            bm_step(s, unit_loss);
          } else if constexpr (std::is_same_v<T, MetaExpertState>) {
            meta_step(s, unit_loss);
          } else {
            wrapper_step(s, unit_loss);
          }
        },
        state);
  }
};

Learner make_learner(const LearnerConfig& config, int n, double effective_eta) {
  switch (config.kind) {
    case LearnerKind::hedge_vanilla:
      return {hedge_init(n, effective_eta, HedgeVariant::vanilla, config.initial)};
    case LearnerKind::hedge_optimistic:
      return {hedge_init(n, effective_eta, HedgeVariant::optimistic, config.initial)};
    case LearnerKind::bm_optimistic_hedge:
      return {bm_init(n, effective_eta)};
    case LearnerKind::meta_expert_full:
      return {meta_init(n, effective_eta, MetaMode::full)};
    case LearnerKind::meta_expert_single:
      return {meta_init(n, effective_eta, MetaMode::single_coordinate)};
    case LearnerKind::bm_wrapper:
      return {wrapper_init(n, effective_eta)};
  }
  throw std::invalid_argument("make_learner: unknown kind");
}

}  // namespace

Trace run(const Game& game, const std::vector<LearnerConfig>& configs, int T, std::uint64_t seed) {
  const int m = game.num_players();
  const int n = game.num_actions();
  if (configs.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("run: one learner config per player required");
  }
  if (T < 0) throw std::invalid_argument("run: negative round count");

  const double scale_factor = game.scale() == Scale::raw ? 2.0 : 1.0;
  std::vector<Learner> learners;
  std::vector<double> effective_etas;
  learners.reserve(m);
  for (const LearnerConfig& config : configs) {
    const double eta = config.eta * scale_factor;
    effective_etas.push_back(eta);
    learners.push_back(make_learner(config, n, eta));
  }

  Trace trace{game, configs, std::move(effective_etas), seed, {}, {}, {}};
  trace.strategies.assign(m, {});
  trace.losses.assign(m, {});
  for (int i = 0; i < m; ++i) {
    trace.strategies[i].reserve(T);
    trace.losses[i].reserve(T);
  }

  std::vector<MixedStrategy> profile(m);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < m; ++i) profile[i] = learners[i].strategy();
    std::vector<LossVector> unit_losses(m);
    for (int i = 0; i < m; ++i) {
      unit_losses[i] = game.unit_loss_vector(i, profile);
    }
    for (int i = 0; i < m; ++i) {
      trace.strategies[i].push_back(profile[i]);
      trace.losses[i].push_back(unit_losses[i]);
      learners[i].step(unit_losses[i]);
    }
  }
  trace.final_strategies.resize(m);
  for (int i = 0; i < m; ++i) trace.final_strategies[i] = learners[i].strategy();
  return trace;
}

namespace {

void check_range(const Trace& trace, int player, int upto, const char* who) {
  if (player < 0 || player >= trace.num_players()) {
    throw std::invalid_argument(std::string(who) + ": bad player index");
  }
  if (upto < 0 || upto > trace.num_rounds()) {
    throw std::invalid_argument(std::string(who) + ": round count out of range");
  }
}

}  // namespace

double external_regret(const Trace& trace, int player, int upto) {
  check_range(trace, player, upto, "external_regret");
  if (upto == 0) return 0.0;
  const int n = trace.game.num_actions();
  double played = 0.0;
  Vector cumulative = Vector::Zero(n);
  for (int t = 0; t < upto; ++t) {
    played += trace.realized_loss(player, t);
    cumulative += trace.losses[player][t];
  }
  return played - cumulative.minCoeff();
}

std::pair<double, std::vector<int>> swap_regret(const Trace& trace, int player, int upto) {
  check_range(trace, player, upto, "swap_regret");
  const int n = trace.game.num_actions();
  // C(j,k) = sum_t x^t(j) * ell^t(k)
  Matrix c = Matrix::Zero(n, n);
  for (int t = 0; t < upto; ++t) {
    c += trace.strategies[player][t] * trace.losses[player][t].transpose();
  }
  double value = 0.0;
  std::vector<int> witness(n, 0);
  for (int j = 0; j < n; ++j) {
    int best = 0;
    for (int k = 1; k < n; ++k) {
      if (c(j, k) < c(j, best)) best = k;  // ties to the smallest index
    }
    witness[j] = best;
    value += c(j, j) - c(j, best);
  }
  return {value, witness};
}

double brute_force_swap_regret(const Trace& trace, int player, int upto) {
  check_range(trace, player, upto, "brute_force_swap_regret");
  const int n = trace.game.num_actions();
  if (n > 4) throw CapacityError("brute_force_swap_regret: n > 4");
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= n;

  double played = 0.0;
  for (int t = 0; t < upto; ++t) played += trace.realized_loss(player, t);

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> phi(n, 0);
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t rest = code;
    for (int i = 0; i < n; ++i) {
      phi[i] = static_cast<int>(rest % n);
      rest /= n;
    }
    double benchmark = 0.0;
    for (int t = 0; t < upto; ++t) {
      const MixedStrategy& x = trace.strategies[player][t];
      const LossVector& loss = trace.losses[player][t];
      for (int j = 0; j < n; ++j) benchmark += x[j] * loss[phi[j]];
    }
    best = std::min(best, benchmark);
  }
  return played - best;
}

RegretReport regret_report(const Trace& trace, int player, int upto) {
  check_range(trace, player, upto, "regret_report");
  RegretReport report;
  const int n = trace.game.num_actions();
  Vector cumulative = Vector::Zero(n);
  double played = 0.0;
  for (int t = 0; t < upto; ++t) {
    played += trace.realized_loss(player, t);
    cumulative += trace.losses[player][t];
  }
  Eigen::Index best = 0;
  cumulative.minCoeff(&best);
  report.external = played - cumulative[best];
  report.best_action = static_cast<int>(best);
  auto [swap_value, witness] = swap_regret(trace, player, upto);
  report.swap = swap_value;
  report.best_swap = std::move(witness);
  return report;
}

double window_max_regret(const Trace& trace, int T) {
  const int window = static_cast<int>(std::floor(std::sqrt(static_cast<double>(T))));
  if (trace.num_rounds() < T + window) {
    throw std::invalid_argument("window_max_regret: trace shorter than T + sqrt(T)");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int upto = T; upto <= T + window; ++upto) {
    for (int player = 0; player < trace.num_players(); ++player) {
      best = std::max(best, external_regret(trace, player, upto));
    }
  }
  return best;
}

double kl_to_center(const Trace& trace, int player, int t) {
  check_range(trace, player, t, "kl_to_center");
  if (trace.game.num_actions() != 2) throw std::invalid_argument("kl_to_center: n = 2 only");
  if (t < 1) throw std::invalid_argument("kl_to_center: rounds are 1-based");
  const MixedStrategy& x = trace.strategies[player][t - 1];
  // Probabilities at the simplex boundary report +infinity rather than being
  // clamped; the lower-bound experiments drive strategies there on purpose.
  if (x[0] < 1e-300 || x[1] < 1e-300) return std::numeric_limits<double>::infinity();
  return 0.5 * std::log(0.5 / x[0]) + 0.5 * std::log(0.5 / x[1]);
}

RvuTerms rvu_terms(const Trace& trace, int player) {
  check_range(trace, player, trace.num_rounds(), "rvu_terms");
  if (trace.configs[player].kind != LearnerKind::hedge_optimistic) {
    throw std::invalid_argument("rvu_terms: player did not run optimistic Hedge");
  }
  const int T = trace.num_rounds();
  const double eta = trace.effective_etas[player];
  RvuTerms terms;
  terms.regret = external_regret(trace, player, T);
  terms.log_term = 2.0 * std::log(static_cast<double>(trace.game.num_actions())) / eta;
  Vector prev_loss = Vector::Zero(trace.game.num_actions());
  double loss_var = 0.0;
  double strat_var = 0.0;
  for (int t = 0; t < T; ++t) {
    const double dl = linf_distance(trace.losses[player][t], prev_loss);
    loss_var += dl * dl;
    prev_loss = trace.losses[player][t];
    const MixedStrategy& next =
        t + 1 < T ? trace.strategies[player][t + 1] : trace.final_strategies[player];
    const double dx = l1_distance(next, trace.strategies[player][t]);
    strat_var += dx * dx;
  }
  terms.loss_variation = eta * loss_var;
  terms.strategy_variation = strat_var / (4.0 * eta);
  return terms;
}

PoaReport poa_report(const Trace& trace, const SmoothGameSpec& spec, double eps) {
  if (!(eps > 0.0) || eps >= 1.0 - spec.mu) {
    throw std::invalid_argument("poa_report: eps must lie in (0, 1 - mu)");
  }
  const int T = trace.num_rounds();
  if (T == 0) throw std::invalid_argument("poa_report: empty trace");
  const int m = trace.num_players();
  const int n = trace.game.num_actions();
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < m; ++i) total += trace.realized_loss(i, t);
  }
  PoaReport report;
  report.avg_welfare = total / T;
  const double denom = 1.0 - spec.mu - eps;
  report.bound = spec.lambda / denom * spec.opt_value +
                 (static_cast<double>(m) / T) * (1.0 / denom) * (n * std::log(static_cast<double>(n)) / eps);
  return report;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json config_to_json(const LearnerConfig& config) {
  nlohmann::json j;
  j["kind"] = learner_kind_name(config.kind);
  j["eta"] = config.eta;
  if (config.initial) {
    j["initial"] = std::vector<double>(config.initial->data(), config.initial->data() + config.initial->size());
  }
  return j;
}

LearnerConfig config_from_json(const nlohmann::json& j) {
  LearnerConfig config;
  config.kind = learner_kind_from_name(j.at("kind").get<std::string>());
  config.eta = j.at("eta").get<double>();
  if (j.contains("initial")) {
    const auto values = j.at("initial").get<std::vector<double>>();
    config.initial = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  return config;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::string& csv_path, const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  csv << "round,player,action,strategy_prob,loss_value\n";
  const int T = trace.num_rounds();
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < trace.num_players(); ++i) {
      for (int a = 0; a < trace.game.num_actions(); ++a) {
        csv << (t + 1) << ',' << i << ',' << a << ',' << format_double(trace.strategies[i][t][a]) << ','
            << format_double(trace.losses[i][t][a]) << '\n';
      }
    }
  }

  nlohmann::json sidecar;
  sidecar["schema_version"] = 1;
  sidecar["units"] = "unit";
  sidecar["seed"] = trace.seed;
  sidecar["game"] = nlohmann::json::parse(trace.game.to_json_string());
  nlohmann::json configs = nlohmann::json::array();
  for (const LearnerConfig& config : trace.configs) configs.push_back(config_to_json(config));
  sidecar["configs"] = configs;
  sidecar["effective_etas"] = trace.effective_etas;
  nlohmann::json finals = nlohmann::json::array();
  for (const MixedStrategy& x : trace.final_strategies) {
    finals.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  }
  sidecar["final_strategies"] = finals;
  std::ofstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot open " + sidecar_path);
  side << sidecar.dump(2) << '\n';
}

Trace read_trace_csv(const std::string& csv_path, const std::string& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot open " + sidecar_path);
  nlohmann::json sidecar = nlohmann::json::parse(side);
  if (sidecar.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("read_trace_csv: unsupported schema version");
  }
  Game game = Game::from_json_string(sidecar.at("game").dump());
  std::vector<LearnerConfig> configs;
  for (const nlohmann::json& j : sidecar.at("configs")) configs.push_back(config_from_json(j));
  Trace trace{std::move(game), std::move(configs), sidecar.at("effective_etas").get<std::vector<double>>(),
              sidecar.at("seed").get<std::uint64_t>(), {}, {}, {}};
  const int m = trace.game.num_players();
  const int n = trace.game.num_actions();
  trace.strategies.assign(m, {});
  trace.losses.assign(m, {});
  for (const nlohmann::json& values : sidecar.at("final_strategies")) {
    const auto data = values.get<std::vector<double>>();
    trace.final_strategies.push_back(Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size())));
  }

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int t = 0, player = 0, action = 0;
    double prob = 0.0, loss = 0.0;
    char comma = 0;
    row >> t >> comma >> player >> comma >> action >> comma >> prob >> comma >> loss;
    if (!row) throw std::invalid_argument("read_trace_csv: malformed row: " + line);
    auto& strategies = trace.strategies.at(player);
    auto& losses = trace.losses.at(player);
    if (static_cast<int>(strategies.size()) < t) {
      strategies.resize(t, Vector::Zero(n));
      losses.resize(t, Vector::Zero(n));
    }
    strategies[t - 1][action] = prob;
    losses[t - 1][action] = loss;
  }
  return trace;
}

}  // namespace nrl
