#include "nrl/game.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "nrl/rng.hpp"

namespace nrl {

namespace {

constexpr std::size_t kMaxTensorEntries = 10'000'000;  // desk-scale guard

std::size_t tensor_size(int num_players, int num_actions) {
  std::size_t size = 1;
  for (int p = 0; p < num_players; ++p) {
    size *= static_cast<std::size_t>(num_actions);
    if (size > kMaxTensorEntries) {
      throw CapacityError("game tensor exceeds 1e7 entries");
    }
  }
  return size;
}

}  // namespace

Game::Game(int num_players, int num_actions, std::vector<Vector> losses, Scale scale)
    : num_players_(num_players), num_actions_(num_actions), losses_(std::move(losses)), scale_(scale) {
  if (num_players_ < 1 || num_actions_ < 1) {
    throw std::invalid_argument("Game: players and actions must be positive");
  }
  const std::size_t size = tensor_size(num_players_, num_actions_);
  if (losses_.size() != static_cast<std::size_t>(num_players_)) {
    throw std::invalid_argument("Game: need one loss tensor per player");
  }
  const double lo = scale_ == Scale::raw ? -1.0 : 0.0;
  for (const Vector& tensor : losses_) {
    if (static_cast<std::size_t>(tensor.size()) != size) {
      throw std::invalid_argument("Game: loss tensor has wrong shape");
    }
    if ((tensor.array() < lo - kLossRangeTol).any() || (tensor.array() > 1.0 + kLossRangeTol).any()) {
      throw std::invalid_argument("Game: loss entry out of range");
    }
  }
}

Game Game::two_player(const Matrix& loss_a, const Matrix& loss_b, Scale scale) {
  const int n = static_cast<int>(loss_a.rows());
  if (loss_a.cols() != n || loss_b.rows() != n || loss_b.cols() != n) {
    throw std::invalid_argument("two_player: matrices must be square with equal size");
  }
  std::vector<Vector> losses(2, Vector(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      losses[0][i * n + j] = loss_a(i, j);
      losses[1][i * n + j] = loss_b(i, j);
    }
  }
  return Game(2, n, std::move(losses), scale);
}

Game Game::canonical(CanonicalGame which) {
  Matrix a(2, 2);
  a << 1, -1, -1, 1;
  Matrix b(2, 2);
  switch (which) {
    case CanonicalGame::matching_pennies_G1:
      b << -1, 1, 1, -1;
      break;
    case CanonicalGame::invariant_G2:
      b << 1, 1, 1, 1;
      break;
    case CanonicalGame::cooperation_G3:
      b = a;
      break;
  }
  return two_player(a, b, Scale::raw);
}

Game Game::random_game(int num_players, int num_actions, std::uint64_t seed) {
  if (num_players < 2 || num_actions < 2) {
    throw std::invalid_argument("random_game: need m >= 2 and n >= 2");
  }
  const std::size_t size = tensor_size(num_players, num_actions);
  Rng rng(seed);
  std::vector<Vector> losses(num_players, Vector(size));
  for (int p = 0; p < num_players; ++p) {
    for (std::size_t i = 0; i < size; ++i) losses[p][i] = rng.uniform();
  }
  return Game(num_players, num_actions, std::move(losses), Scale::unit);
}

std::size_t Game::flat_index(const std::vector<int>& profile) const {
  std::size_t idx = 0;
  for (int p = 0; p < num_players_; ++p) {
    const int s = profile[p];
    if (s < 0 || s >= num_actions_) throw std::invalid_argument("Game: action out of range");
    idx = idx * num_actions_ + s;
  }
  return idx;
}

double Game::loss(int player, const std::vector<int>& profile) const {
  if (player < 0 || player >= num_players_) throw std::invalid_argument("Game: bad player index");
  if (profile.size() != static_cast<std::size_t>(num_players_)) {
    throw std::invalid_argument("Game: profile size mismatch");
  }
  return losses_[player][flat_index(profile)];
}

void Game::check_profile(const std::vector<MixedStrategy>& profile) const {
  if (profile.size() != static_cast<std::size_t>(num_players_)) {
    throw std::invalid_argument("Game: profile size mismatch");
  }
  for (const MixedStrategy& x : profile) {
    if (x.size() != num_actions_) throw std::invalid_argument("Game: strategy length mismatch");
    require_distribution(x, "Game profile");
  }
}

Vector Game::expected_loss_vector(int player, const std::vector<MixedStrategy>& profile) const {
  if (player < 0 || player >= num_players_) throw std::invalid_argument("Game: bad player index");
  check_profile(profile);
  const Vector& tensor = losses_[player];
  Vector out = Vector::Zero(num_actions_);
  std::vector<int> s(num_players_, 0);
  const std::size_t size = static_cast<std::size_t>(tensor.size());
  for (std::size_t idx = 0; idx < size; ++idx) {
    // decode row-major index
    std::size_t rest = idx;
    for (int p = num_players_ - 1; p >= 0; --p) {
      s[p] = static_cast<int>(rest % num_actions_);
      rest /= num_actions_;
    }
    double prob = 1.0;
    for (int p = 0; p < num_players_; ++p) {
      if (p != player) prob *= profile[p][s[p]];
    }
    out[s[player]] += prob * tensor[idx];
  }
  return out;
}

Vector Game::realized_loss(const std::vector<MixedStrategy>& profile) const {
  Vector out(num_players_);
  for (int i = 0; i < num_players_; ++i) {
    out[i] = profile[i].dot(expected_loss_vector(i, profile));
  }
  return out;
}

Vector Game::to_unit(const Vector& v) const {
  if (scale_ == Scale::unit) return v;
  return (v.array() + 1.0) * 0.5;
}

namespace {

nlohmann::json tensor_to_nested(const Vector& tensor, int num_players, int num_actions, std::size_t offset,
                                int depth) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t stride = 1;
  for (int p = depth + 1; p < num_players; ++p) stride *= num_actions;
  for (int a = 0; a < num_actions; ++a) {
    if (depth == num_players - 1) {
      arr.push_back(tensor[static_cast<Eigen::Index>(offset + a)]);
    } else {
      arr.push_back(tensor_to_nested(tensor, num_players, num_actions, offset + a * stride, depth + 1));
    }
  }
  return arr;
}

void nested_to_tensor(const nlohmann::json& arr, Vector& tensor, int num_players, int num_actions,
                      std::size_t offset, int depth) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(num_actions)) {
    throw std::invalid_argument("Game JSON: malformed loss array");
  }
  std::size_t stride = 1;
  for (int p = depth + 1; p < num_players; ++p) stride *= num_actions;
  for (int a = 0; a < num_actions; ++a) {
    if (depth == num_players - 1) {
      tensor[static_cast<Eigen::Index>(offset + a)] = arr[a].get<double>();
    } else {
      nested_to_tensor(arr[a], tensor, num_players, num_actions, offset + a * stride, depth + 1);
    }
  }
}

}  // namespace

std::string Game::to_json_string() const {
  nlohmann::json j;
  j["players"] = num_players_;
  j["actions"] = num_actions_;
  j["scale"] = scale_ == Scale::raw ? "raw" : "unit";
  nlohmann::json losses = nlohmann::json::array();
  for (const Vector& tensor : losses_) {
    losses.push_back(tensor_to_nested(tensor, num_players_, num_actions_, 0, 0));
  }
  j["losses"] = losses;
  return j.dump();
}

Game Game::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int m = j.at("players").get<int>();
  const int n = j.at("actions").get<int>();
  const std::string scale_name = j.at("scale").get<std::string>();
  if (scale_name != "raw" && scale_name != "unit") {
    throw std::invalid_argument("Game JSON: scale must be \"raw\" or \"unit\"");
  }
  const Scale scale = scale_name == "raw" ? Scale::raw : Scale::unit;
  const std::size_t size = tensor_size(m, n);
  const nlohmann::json& loss_json = j.at("losses");
  if (!loss_json.is_array() || loss_json.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("Game JSON: need one loss tensor per player");
  }
  std::vector<Vector> losses(m, Vector(size));
  for (int p = 0; p < m; ++p) {
    nested_to_tensor(loss_json[p], losses[p], m, n, 0, 0);
  }
  return Game(m, n, std::move(losses), scale);
}

SmoothGameSpec smooth_congestion_game(int num_players, int resources, std::uint64_t seed) {
  if (num_players < 2 || resources < 2) {
    throw std::invalid_argument("smooth_congestion_game: need m >= 2 and resources >= 2");
  }
  double profiles = 1.0;
  for (int p = 0; p < num_players; ++p) profiles *= resources;
  if (profiles > 1e6) {
    throw CapacityError("smooth_congestion_game: exhaustive OPT needs n^m <= 1e6");
  }

  Rng rng(seed);
  std::vector<double> slope(resources), base(resources);
  for (int e = 0; e < resources; ++e) {
    slope[e] = 0.1 + 0.9 * rng.uniform();
    base[e] = rng.uniform();
  }
  double max_cost = 0.0;
  for (int e = 0; e < resources; ++e) {
    max_cost = std::max(max_cost, slope[e] * num_players + base[e]);
  }

  const std::size_t size = tensor_size(num_players, resources);
  std::vector<Vector> losses(num_players, Vector(size));
  std::vector<int> s(num_players, 0);
  std::vector<int> load(resources, 0);
  std::vector<int> best_profile(num_players, 0);
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    for (int p = num_players - 1; p >= 0; --p) {
      s[p] = static_cast<int>(rest % resources);
      rest /= resources;
    }
    std::fill(load.begin(), load.end(), 0);
    for (int p = 0; p < num_players; ++p) load[s[p]] += 1;
    double social = 0.0;
    for (int p = 0; p < num_players; ++p) {
      const int e = s[p];
      const double cost = (slope[e] * load[e] + base[e]) / max_cost;
      losses[p][idx] = cost;
      social += cost;
    }
    if (social < best_cost) {
      best_cost = social;
      best_profile = s;
    }
  }

  SmoothGameSpec spec{5.0 / 3.0, 1.0 / 3.0, Game(num_players, resources, std::move(losses), Scale::unit),
                      best_profile, best_cost};
  return spec;
}

}  // namespace nrl
