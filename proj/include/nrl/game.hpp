#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nrl/types.hpp"

namespace nrl {

// How loss entries are stored. Learners always consume unit-scale losses in
// [0,1]; raw games (entries in [-1,1]) are mapped through v -> (v+1)/2 on the
// way out and regrets can be reported back in raw units by doubling.
enum class Scale { raw, unit };

enum class CanonicalGame { matching_pennies_G1, invariant_G2, cooperation_G3 };

// Finite normal-form game with m players and a uniform action count n.
// Losses are dense tensors, one per player, flattened row-major with player
// 0's action as the outermost index. Immutable after construction.
class Game {
 public:
  Game(int num_players, int num_actions, std::vector<Vector> losses, Scale scale);

  static Game canonical(CanonicalGame which);
  static Game two_player(const Matrix& loss_a, const Matrix& loss_b, Scale scale);
  static Game random_game(int num_players, int num_actions, std::uint64_t seed);

  int num_players() const { return num_players_; }
  int num_actions() const { return num_actions_; }
  Scale scale() const { return scale_; }

  // Direct tensor lookup for a pure profile.
  double loss(int player, const std::vector<int>& profile) const;
  const Vector& loss_tensor(int player) const { return losses_[player]; }

  // Expected loss of each pure action of `player`, marginalizing over the
  // opponents' product distribution. Stored units.
  Vector expected_loss_vector(int player, const std::vector<MixedStrategy>& profile) const;

  // Component i is <x_i, expected_loss_vector(i)>. Stored units.
  Vector realized_loss(const std::vector<MixedStrategy>& profile) const;

  // Map a stored-units loss vector to [0,1].
  Vector to_unit(const Vector& v) const;
  Vector unit_loss_vector(int player, const std::vector<MixedStrategy>& profile) const {
    return to_unit(expected_loss_vector(player, profile));
  }

  std::string to_json_string() const;
  static Game from_json_string(const std::string& text);

 private:
  void check_profile(const std::vector<MixedStrategy>& profile) const;
  std::size_t flat_index(const std::vector<int>& profile) const;

  int num_players_;
  int num_actions_;
  std::vector<Vector> losses_;  // one flat tensor of size n^m per player
  Scale scale_;
};

// A (lambda, mu)-smooth cost-minimization game together with its socially
// optimal pure profile.
struct SmoothGameSpec {
  double lambda = 0.0;
  double mu = 0.0;
  Game game;
  std::vector<int> optimal_profile;
  double opt_value = 0.0;  // social cost at the optimal profile, stored units
};

// Linear-cost load balancing instance: each player picks one of `resources`
// machines, pays cost a_e * load + b_e on its machine, normalized to [0,1].
// Affine costs give (5/3, 1/3)-smoothness. OPT found by exhaustive search.
SmoothGameSpec smooth_congestion_game(int num_players, int resources, std::uint64_t seed);

}  // namespace nrl
