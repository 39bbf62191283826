// nrlsim: simulate | experiment | audit | oracle.
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 audit check failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nrl/dynamics.hpp"
#include "nrl/experiment.hpp"
#include "nrl/markov.hpp"
#include "nrl/rng.hpp"

namespace fs = std::filesystem;
using namespace nrl;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAudit = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Game game_from_json(const nlohmann::json& j, std::uint64_t seed) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "canonical") {
    const std::string name = j.at("name").get<std::string>();
    if (name == "matching_pennies_G1") return Game::canonical(CanonicalGame::matching_pennies_G1);
    if (name == "invariant_G2") return Game::canonical(CanonicalGame::invariant_G2);
    if (name == "cooperation_G3") return Game::canonical(CanonicalGame::cooperation_G3);
    throw std::invalid_argument("unknown canonical game: " + name);
  }
  if (kind == "random") {
    return Game::random_game(j.at("players").get<int>(), j.at("actions").get<int>(), seed);
  }
  if (kind == "smooth") {
    return smooth_congestion_game(j.at("players").get<int>(), j.at("resources").get<int>(), seed).game;
  }
  if (kind == "file") return Game::from_json_string(read_file(j.at("path").get<std::string>()));
  throw std::invalid_argument("unknown game kind: " + kind);
}

LearnerConfig learner_from_json(const nlohmann::json& j) {
  LearnerConfig config;
  config.kind = learner_kind_from_name(j.at("kind").get<std::string>());
  config.eta = j.at("eta").get<double>();
  if (j.contains("initial")) {
    const auto values = j.at("initial").get<std::vector<double>>();
    config.initial = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  return config;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
                 bool raw) {
  const nlohmann::json j = nlohmann::json::parse(read_file(config_path));
  const Game game = game_from_json(j.at("game"), seed);
  const int T = j.at("T").get<int>();
  std::vector<LearnerConfig> learners;
  for (const nlohmann::json& l : j.at("learners")) learners.push_back(learner_from_json(l));
  if (learners.size() == 1) {
    learners.resize(game.num_players(), learners[0]);  // broadcast
  }

  const Trace trace = run(game, learners, T, seed);
  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir);
  write_trace_csv(trace, (base / "trace.csv").string(), (base / "trace.json").string());

  const double scale = raw && game.scale() == Scale::raw ? 2.0 : 1.0;
  std::printf("game: %d players, %d actions, T = %d, seed = %llu\n", game.num_players(),
              game.num_actions(), T, static_cast<unsigned long long>(seed));
  for (int i = 0; i < game.num_players(); ++i) {
    const RegretReport report = regret_report(trace, i, T);
    std::printf("player %d: external regret %.6g, swap regret %.6g (%s units)\n", i + 1,
                scale * report.external, scale * report.swap, scale == 2.0 ? "raw" : "unit");
  }
  std::printf("trace written to %s\n", (base / "trace.csv").c_str());
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& builtin, int jobs,
                   const std::string& out_dir) {
  ExperimentConfig config;
  if (!builtin.empty()) {
    config = builtin_experiment(builtin);
  } else if (!config_path.empty()) {
    config = parse_experiment_config(read_file(config_path));
  } else {
    throw std::invalid_argument("experiment: need --config or --builtin");
  }
  if (!out_dir.empty()) config.out_dir = out_dir;

  const ExperimentResult result = run_experiment(config, jobs);
  write_experiment_outputs(result);
  std::printf("experiment %s: %zu cells, %d degenerate\n", config.name.c_str(), result.cells.size(),
              result.degenerate_cells);
  for (const auto& [t, mean] : result.means) {
    std::printf("  T = %6lld  mean %s = %.6g\n", t, metric_name(config.metric), mean);
  }
  if (result.fit) {
    std::printf("fitted slope %.4f (r^2 %.4f)\n", result.fit->slope, result.fit->r_squared);
  } else {
    std::printf("no slope fit (too few positive means)\n");
  }
  std::printf("outputs in %s\n", config.out_dir.c_str());
  return 0;
}

int cmd_audit(const std::string& trace_path, const std::string& sidecar_path) {
  const Trace trace = read_trace_csv(trace_path, sidecar_path);
  const int T = trace.num_rounds();
  const int n = trace.game.num_actions();
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::printf("%s %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++failures;
  };

  for (int i = 0; i < trace.num_players(); ++i) {
    bool dists = true, range = true;
    for (int t = 0; t < T; ++t) {
      dists = dists && is_distribution(trace.strategies[i][t], 1e-9);
      range = range && trace.losses[i][t].minCoeff() >= -kLossRangeTol &&
              trace.losses[i][t].maxCoeff() <= 1.0 + kLossRangeTol;
    }
    check(dists, "player " + std::to_string(i + 1) + ": strategies are distributions");
    check(range, "player " + std::to_string(i + 1) + ": losses within [0,1]");

    const double external = external_regret(trace, i, T);
    const double swap = swap_regret(trace, i, T).first;
    check(swap >= external - 1e-9,
          "player " + std::to_string(i + 1) + ": swap regret >= external regret");
    if (n <= 4) {
      check(std::abs(swap - brute_force_swap_regret(trace, i, T)) <= 1e-9,
            "player " + std::to_string(i + 1) + ": swap regret matches brute force");
    }
    if (trace.configs[i].kind == LearnerKind::hedge_optimistic) {
      const RvuTerms terms = rvu_terms(trace, i);
      check(terms.slack() >= -1e-9,
            "player " + std::to_string(i + 1) + ": RVU slack " + std::to_string(terms.slack()));
    }
  }
  if (failures > 0) {
    std::printf("audit failed: %d check(s)\n", failures);
    return kExitAudit;
  }
  std::printf("audit passed\n");
  return 0;
}

int cmd_oracle(std::uint64_t seed, int n, int trials) {
  if (n < 2 || n > 6) throw std::invalid_argument("oracle: need 2 <= n <= 6");
  Rng rng(seed);
  double worst_markov = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Matrix q(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) q(i, j) = 0.05 + rng.uniform();
      q.row(i) /= q.row(i).sum();
    }
    worst_markov = std::max(worst_markov, l1_distance(stationary(q), tree_stationary(q)));
  }
  std::printf("markov: stationary vs tree oracle, %d chains (n = %d), worst l1 gap %.3g\n", trials,
              n, worst_markov);

  double worst_swap = 0.0;
  const int swap_n = std::min(n, 4);
  for (int trial = 0; trial < trials; ++trial) {
    const Game game = Game::random_game(2, swap_n, rng.next_seed());
    const LearnerConfig cfg{LearnerKind::hedge_optimistic, 0.1 + rng.uniform(), std::nullopt};
    const Trace trace = run(game, {cfg, cfg}, 30, rng.next_seed());
    for (int player = 0; player < 2; ++player) {
      worst_swap = std::max(worst_swap, std::abs(swap_regret(trace, player, 30).first -
                                                 brute_force_swap_regret(trace, player, 30)));
    }
  }
  std::printf("swap: argmin vs n^n brute force, %d traces (n = %d), worst |diff| %.3g\n", trials,
              swap_n, worst_swap);

  if (worst_markov > 1e-9 || worst_swap > 1e-9) {
    throw NumericalError("oracle cross-check exceeded 1e-9");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"no-regret learning dynamics simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, builtin, trace_path, sidecar_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool raw = false;
  int oracle_n = 4, oracle_trials = 200;

  CLI::App* simulate = app.add_subcommand("simulate", "one run from a config");
  simulate->add_option("--config", config_path, "JSON config with game, learners, T")->required();
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--out", out_dir, "output directory")->default_val("results");
  simulate->add_flag("--raw", raw, "report raw-unit regrets for raw-scale games");

  CLI::App* experiment = app.add_subcommand("experiment", "seeded sweep over T with slope fit");
  experiment->add_option("--config", config_path, "experiment JSON config");
  experiment->add_option("--builtin", builtin, "built-in config (thm31, thm41, thm51, thm51_m3)");
  experiment->add_option("--jobs", jobs, "parallel cells")->default_val(1);
  experiment->add_option("--out", out_dir, "output directory override");

  CLI::App* audit = app.add_subcommand("audit", "invariant suites over a stored trace");
  audit->add_option("--trace", trace_path, "trace CSV path")->required();
  audit->add_option("--sidecar", sidecar_path, "JSON sidecar path")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "markov/swap brute-force cross-checks");
  oracle->add_option("--seed", seed, "RNG seed");
  oracle->add_option("--n", oracle_n, "action/state count (2..6)")->default_val(4);
  oracle->add_option("--trials", oracle_trials, "trials per oracle")->default_val(200);

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(config_path, seed, out_dir, raw);
    if (experiment->parsed()) return cmd_experiment(config_path, builtin, jobs, out_dir);
    if (audit->parsed()) return cmd_audit(trace_path, sidecar_path);
    if (oracle->parsed()) return cmd_oracle(seed, oracle_n, oracle_trials);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const CertificateError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
