#include "nrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace nrl {

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points, bool allow_offset) {
  if (points.size() < 4) throw std::invalid_argument("fit_slope: need at least 4 points");
  SlopeFit fit;
  fit.points.reserve(points.size());
  for (const auto& [t, metric] : points) {
    double value = metric;
    if (!(value > 0.0)) {
      if (!allow_offset) throw std::invalid_argument("fit_slope: nonpositive metric");
      value = std::numeric_limits<double>::epsilon();
    }
    if (!(t > 0.0)) throw std::invalid_argument("fit_slope: nonpositive T");
    fit.points.emplace_back(std::log(t), std::log(value));
  }
  const double n = static_cast<double>(fit.points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  return fit;
}

double EtaRule::resolve(int n, int m, long long T) const {
  switch (kind) {
    case EtaRuleKind::fixed:
      return value;
    case EtaRuleKind::theorem:
      return theorem_eta(recipe, n, m, T);
    case EtaRuleKind::inv_quarter_root:
      return std::pow(static_cast<double>(T), -0.25);
  }
  throw std::invalid_argument("EtaRule: unknown kind");
}

const char* metric_name(MetricKind metric) {
  switch (metric) {
    case MetricKind::max_external_regret: return "max_external_regret";
    case MetricKind::mean_external_regret: return "mean_external_regret";
    case MetricKind::max_swap_regret: return "max_swap_regret";
    case MetricKind::mean_swap_regret: return "mean_swap_regret";
    case MetricKind::window_max_regret: return "window_max_regret";
  }
  return "unknown";
}

namespace {

MetricKind metric_from_name(const std::string& name) {
  for (MetricKind metric :
       {MetricKind::max_external_regret, MetricKind::mean_external_regret, MetricKind::max_swap_regret,
        MetricKind::mean_swap_regret, MetricKind::window_max_regret}) {
    if (name == metric_name(metric)) return metric;
  }
  throw std::invalid_argument("unknown metric: " + name);
}

CanonicalGame canonical_from_name(const std::string& name) {
  if (name == "matching_pennies_G1") return CanonicalGame::matching_pennies_G1;
  if (name == "invariant_G2") return CanonicalGame::invariant_G2;
  if (name == "cooperation_G3") return CanonicalGame::cooperation_G3;
  throw std::invalid_argument("unknown canonical game: " + name);
}

const char* canonical_name(CanonicalGame which) {
  switch (which) {
    case CanonicalGame::matching_pennies_G1: return "matching_pennies_G1";
    case CanonicalGame::invariant_G2: return "invariant_G2";
    case CanonicalGame::cooperation_G3: return "cooperation_G3";
  }
  return "unknown";
}

EtaRule eta_rule_from_json(const nlohmann::json& j) {
  EtaRule rule;
  const std::string kind = j.at("rule").get<std::string>();
  if (kind == "fixed") {
    rule.kind = EtaRuleKind::fixed;
    rule.value = j.at("value").get<double>();
  } else if (kind == "theorem") {
    rule.kind = EtaRuleKind::theorem;
    const std::string recipe = j.at("recipe").get<std::string>();
    if (recipe == "two_player_opt") rule.recipe = EtaRecipe::two_player_opt;
    else if (recipe == "bm_swap") rule.recipe = EtaRecipe::bm_swap;
    else if (recipe == "meta_swap") rule.recipe = EtaRecipe::meta_swap;
    else throw std::invalid_argument("unknown eta recipe: " + recipe);
  } else if (kind == "inv_quarter_root") {
    rule.kind = EtaRuleKind::inv_quarter_root;
  } else {
    throw std::invalid_argument("unknown eta rule: " + kind);
  }
  return rule;
}

LearnerSpec learner_spec_from_json(const nlohmann::json& j) {
  LearnerSpec spec;
  spec.kind = learner_kind_from_name(j.at("kind").get<std::string>());
  spec.eta = eta_rule_from_json(j.at("eta"));
  if (j.contains("initial")) {
    const auto values = j.at("initial").get<std::vector<double>>();
    spec.initial = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  return spec;
}

Game build_game(const GameSpecConfig& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case GameKind::canonical:
      return Game::canonical(spec.canonical);
    case GameKind::random:
      return Game::random_game(spec.players, spec.actions, seed);
    case GameKind::smooth:
      return smooth_congestion_game(spec.players, spec.actions, seed).game;
    case GameKind::file: {
      std::ifstream in(spec.path);
      if (!in) throw std::runtime_error("cannot open game file " + spec.path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      return Game::from_json_string(text);
    }
  }
  throw std::invalid_argument("build_game: unknown kind");
}

double evaluate_metric(const Trace& trace, MetricKind metric, long long T, bool raw_units) {
  const double scale = raw_units && trace.game.scale() == Scale::raw ? 2.0 : 1.0;
  const int m = trace.num_players();
  double value = 0.0;
  switch (metric) {
    case MetricKind::max_external_regret: {
      value = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) value = std::max(value, external_regret(trace, i, static_cast<int>(T)));
      break;
    }
    case MetricKind::mean_external_regret: {
      for (int i = 0; i < m; ++i) value += external_regret(trace, i, static_cast<int>(T));
      value /= m;
      break;
    }
    case MetricKind::max_swap_regret: {
      value = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) value = std::max(value, swap_regret(trace, i, static_cast<int>(T)).first);
      break;
    }
    case MetricKind::mean_swap_regret: {
      for (int i = 0; i < m; ++i) value += swap_regret(trace, i, static_cast<int>(T)).first;
      value /= m;
      break;
    }
    case MetricKind::window_max_regret:
      value = window_max_regret(trace, static_cast<int>(T));
      break;
  }
  return scale * value;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ExperimentConfig config;
  config.name = j.at("name").get<std::string>();
  const nlohmann::json& game = j.at("game");
  const std::string game_kind = game.at("kind").get<std::string>();
  if (game_kind == "canonical") {
    config.game.kind = GameKind::canonical;
    config.game.canonical = canonical_from_name(game.at("name").get<std::string>());
    config.game.players = 2;
    config.game.actions = 2;
  } else if (game_kind == "random") {
    config.game.kind = GameKind::random;
    config.game.players = game.at("players").get<int>();
    config.game.actions = game.at("actions").get<int>();
  } else if (game_kind == "smooth") {
    config.game.kind = GameKind::smooth;
    config.game.players = game.at("players").get<int>();
    config.game.actions = game.at("resources").get<int>();
  } else if (game_kind == "file") {
    config.game.kind = GameKind::file;
    config.game.path = game.at("path").get<std::string>();
  } else {
    throw std::invalid_argument("unknown game kind: " + game_kind);
  }
  for (const nlohmann::json& learner : j.at("learners")) {
    config.learners.push_back(learner_spec_from_json(learner));
  }
  if (config.learners.empty()) throw std::invalid_argument("config: learners must be nonempty");
  config.t_grid = j.at("T_grid").get<std::vector<long long>>();
  for (std::size_t i = 1; i < config.t_grid.size(); ++i) {
    if (config.t_grid[i] <= config.t_grid[i - 1]) {
      throw std::invalid_argument("config: T_grid must be strictly increasing");
    }
  }
  config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (config.seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
  config.metric = metric_from_name(j.at("metric").get<std::string>());
  if (j.contains("raw_units")) config.raw_units = j.at("raw_units").get<bool>();
  if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
  return config;
}

ExperimentConfig builtin_experiment(const std::string& name) {
  ExperimentConfig config;
  config.name = name;
  config.t_grid = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16};
  config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (name == "thm31") {
    config.game = {GameKind::random, CanonicalGame::matching_pennies_G1, 2, 10, ""};
    LearnerSpec spec;
    spec.kind = LearnerKind::hedge_optimistic;
    spec.eta = {EtaRuleKind::theorem, 0.0, EtaRecipe::two_player_opt};
    config.learners = {spec};
    config.metric = MetricKind::max_external_regret;
  } else if (name == "thm41") {
    config.game = {GameKind::canonical, CanonicalGame::matching_pennies_G1, 2, 2, ""};
    LearnerSpec spec;
    spec.kind = LearnerKind::hedge_vanilla;
    spec.eta = {EtaRuleKind::fixed, 1.0, EtaRecipe::two_player_opt};
    MixedStrategy initial(2);
    initial << 0.4, 0.6;
    spec.initial = initial;
    config.learners = {spec};
    config.metric = MetricKind::window_max_regret;
    config.raw_units = true;
    config.seeds = {1};  // canonical game runs are fully deterministic
  } else if (name == "thm51") {
    config.game = {GameKind::random, CanonicalGame::matching_pennies_G1, 2, 4, ""};
    LearnerSpec spec;
    spec.kind = LearnerKind::bm_optimistic_hedge;
    spec.eta = {EtaRuleKind::theorem, 0.0, EtaRecipe::bm_swap};
    config.learners = {spec};
    config.metric = MetricKind::mean_swap_regret;
  } else if (name == "thm51_m3") {
    config.game = {GameKind::random, CanonicalGame::matching_pennies_G1, 3, 3, ""};
    LearnerSpec spec;
    spec.kind = LearnerKind::bm_optimistic_hedge;
    spec.eta = {EtaRuleKind::theorem, 0.0, EtaRecipe::bm_swap};
    config.learners = {spec};
    config.metric = MetricKind::mean_swap_regret;
  } else {
    throw std::invalid_argument("unknown builtin experiment: " + name);
  }
  return config;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs) {
  if (config.t_grid.size() < 4) {
    throw std::invalid_argument("run_experiment: T_grid needs >= 4 points for slope fits");
  }
  const int num_cells = static_cast<int>(config.t_grid.size() * config.seeds.size());
  ExperimentResult result;
  result.config = config;
  result.cells.resize(num_cells);

  auto run_cell = [&](int index) {
    const std::size_t ti = index / config.seeds.size();
    const std::size_t si = index % config.seeds.size();
    const long long T = config.t_grid[ti];
    const std::uint64_t seed = config.seeds[si];
    Game game = build_game(config.game, seed);
    const int m = game.num_players();
    const int n = game.num_actions();
    std::vector<LearnerConfig> learners;
    for (int i = 0; i < m; ++i) {
      const LearnerSpec& spec = config.learners[std::min<std::size_t>(i, config.learners.size() - 1)];
      LearnerConfig lc;
      lc.kind = spec.kind;
      lc.eta = spec.eta.resolve(n, m, T);
      lc.initial = spec.initial;
      learners.push_back(lc);
    }
    long long rounds = T;
    if (config.metric == MetricKind::window_max_regret) {
      rounds += static_cast<long long>(std::floor(std::sqrt(static_cast<double>(T))));
    }
    Trace trace = run(game, learners, static_cast<int>(rounds), seed);
    const double value = evaluate_metric(trace, config.metric, T, config.raw_units);
    result.cells[index] = {T, seed, value, !(value > 0.0)};
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int i = 0; i < num_cells; ++i) run_cell(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (int i = next.fetch_add(1); i < num_cells; i = next.fetch_add(1)) run_cell(i);
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t ti = 0; ti < config.t_grid.size(); ++ti) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t si = 0; si < config.seeds.size(); ++si) {
      const ExperimentCell& cell = result.cells[ti * config.seeds.size() + si];
      if (cell.degenerate) {
        ++result.degenerate_cells;
        continue;
      }
      sum += cell.value;
      ++count;
    }
    if (count > 0) {
      const double mean = sum / count;
      result.means.emplace_back(config.t_grid[ti], mean);
      if (mean > 0.0) fit_points.emplace_back(static_cast<double>(config.t_grid[ti]), mean);
    }
  }
  if (fit_points.size() >= 4) result.fit = fit_slope(fit_points);
  return result;
}

void write_experiment_outputs(const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(result.config.out_dir);
  const fs::path base = fs::path(result.config.out_dir);

  std::ofstream csv(base / (result.config.name + "_cells.csv"));
  if (!csv) throw std::runtime_error("cannot write experiment CSV");
  csv << "name,T,seed,metric,value,degenerate\n";
  for (const ExperimentCell& cell : result.cells) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", cell.value);
    csv << result.config.name << ',' << cell.t << ',' << cell.seed << ','
        << metric_name(result.config.metric) << ',' << buf << ',' << (cell.degenerate ? 1 : 0) << '\n';
  }

  nlohmann::json summary;
  summary["name"] = result.config.name;
  summary["metric"] = metric_name(result.config.metric);
  summary["raw_units"] = result.config.raw_units;
  summary["degenerate_cells"] = result.degenerate_cells;
  nlohmann::json means = nlohmann::json::array();
  for (const auto& [t, mean] : result.means) means.push_back({{"T", t}, {"mean", mean}});
  summary["means"] = means;
  if (result.fit) {
    summary["fit"] = {{"slope", result.fit->slope},
                      {"intercept", result.fit->intercept},
                      {"r_squared", result.fit->r_squared}};
  }
  std::ofstream json_out(base / (result.config.name + "_summary.json"));
  if (!json_out) throw std::runtime_error("cannot write experiment summary");
  json_out << summary.dump(2) << '\n';
}

ProbeReport lower_bound_probe(long long T, double eta) {
  if (T < 100) throw std::invalid_argument("lower_bound_probe: need T >= 100");
  ProbeReport report;
  report.eta = eta;
  report.t = T;
  MixedStrategy initial(2);
  initial << 0.4, 0.6;
  LearnerConfig learner{LearnerKind::hedge_vanilla, eta, initial};
  const std::vector<LearnerConfig> configs{learner, learner};
  // Empirical regime router; the theoretical middle-range boundary depends on
  // an unpinned constant, so the small-eta cutoff 8/sqrt(T) is used instead.
  if (eta < 8.0 / std::sqrt(static_cast<double>(T))) {
    report.regime = "invariant_G2";
    Trace trace = run(Game::canonical(CanonicalGame::invariant_G2), configs, static_cast<int>(T), 0);
    report.regret_raw = 2.0 * external_regret(trace, 0, static_cast<int>(T));
  } else if (eta >= 3.0) {
    report.regime = "cooperation_G3";
    Trace trace = run(Game::canonical(CanonicalGame::cooperation_G3), configs, static_cast<int>(T), 0);
    report.regret_raw = 2.0 * external_regret(trace, 0, static_cast<int>(T));
  } else {
    report.regime = "matching_pennies_G1";
    const long long window = static_cast<long long>(std::floor(std::sqrt(static_cast<double>(T))));
    Trace trace =
        run(Game::canonical(CanonicalGame::matching_pennies_G1), configs, static_cast<int>(T + window), 0);
    report.regret_raw = 2.0 * window_max_regret(trace, static_cast<int>(T));
  }
  return report;
}

}  // namespace nrl
