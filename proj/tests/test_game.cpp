#include <doctest.h>

#include <vector>

#include "nrl/game.hpp"
#include "nrl/rng.hpp"

using namespace nrl;

namespace {

MixedStrategy strat2(double p) {
  MixedStrategy x(2);
  x << p, 1.0 - p;
  return x;
}

// Independent oracle: expected loss by direct recursion over opponent actions.
double oracle_expected_loss(const Game& g, int player, int action,
                            const std::vector<MixedStrategy>& profile) {
  const int m = g.num_players();
  const int n = g.num_actions();
  std::vector<int> s(m, 0);
  s[player] = action;
  double total = 0.0;
  // odometer over the m-1 opponents
  std::vector<int> opp;
  for (int p = 0; p < m; ++p) {
    if (p != player) opp.push_back(p);
  }
  std::vector<int> digits(opp.size(), 0);
  while (true) {
    double prob = 1.0;
    for (std::size_t k = 0; k < opp.size(); ++k) {
      s[opp[k]] = digits[k];
      prob *= profile[opp[k]][digits[k]];
    }
    total += prob * g.loss(player, s);
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == n) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return total;
}

double social_cost(const Game& g, const std::vector<int>& profile) {
  double total = 0.0;
  for (int p = 0; p < g.num_players(); ++p) total += g.loss(p, profile);
  return total;
}

}  // namespace

TEST_CASE("matching pennies expected losses against hand values") {
  const Game g1 = Game::canonical(CanonicalGame::matching_pennies_G1);
  CHECK(g1.scale() == Scale::raw);
  const std::vector<MixedStrategy> profile = {strat2(0.5), strat2(0.3)};
  const Vector l0 = g1.expected_loss_vector(0, profile);
  // row player vs (0.3, 0.7): 0.3 - 0.7 = -0.4 and -0.3 + 0.7 = 0.4
  CHECK(l0[0] == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(l0[1] == doctest::Approx(0.4).epsilon(1e-14));
  const Vector l1 = g1.expected_loss_vector(1, profile);
  CHECK(l1[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(l1[1] == doctest::Approx(0.0).epsilon(1e-14));

  // zero-sum: realized losses cancel for any profile
  const std::vector<MixedStrategy> skew = {strat2(0.4), strat2(0.85)};
  const Vector realized = g1.realized_loss(skew);
  CHECK(realized[0] + realized[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("invariant game gives player 2 constant loss") {
  const Game g2 = Game::canonical(CanonicalGame::invariant_G2);
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<MixedStrategy> profile = {strat2(rng.uniform()), strat2(rng.uniform())};
    const Vector l1 = g2.expected_loss_vector(1, profile);
    CHECK(l1[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(l1[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  // player 1 faces the matching-pennies row payoffs
  const Vector l0 = g2.expected_loss_vector(0, {strat2(0.5), strat2(1.0)});
  CHECK(l0[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l0[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("cooperation game has identical loss tensors") {
  const Game g3 = Game::canonical(CanonicalGame::cooperation_G3);
  CHECK(g3.loss_tensor(0) == g3.loss_tensor(1));
  CHECK(g3.loss(0, {0, 0}) == 1.0);
  CHECK(g3.loss(0, {0, 1}) == -1.0);
  CHECK(g3.loss(1, {1, 0}) == -1.0);
  CHECK(g3.loss(1, {1, 1}) == 1.0);
}

TEST_CASE("to_unit maps raw losses onto [0,1]") {
  const Game g1 = Game::canonical(CanonicalGame::matching_pennies_G1);
  Vector raw(3);
  raw << -1.0, 0.0, 1.0;
  const Vector unit = g1.to_unit(raw);
  CHECK(unit[0] == 0.0);
  CHECK(unit[1] == 0.5);
  CHECK(unit[2] == 1.0);

  const Game rnd = Game::random_game(2, 3, 1);
  CHECK(rnd.to_unit(raw) == raw);  // already unit scale: identity
}

TEST_CASE("expected_loss_vector agrees with the enumeration oracle for m=3") {
  const Game g = Game::random_game(3, 4, 2024);
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<MixedStrategy> profile;
    for (int p = 0; p < 3; ++p) {
      Vector x(4);
      for (int a = 0; a < 4; ++a) x[a] = 0.01 + rng.uniform();
      profile.push_back(x / x.sum());
    }
    for (int p = 0; p < 3; ++p) {
      const Vector lv = g.expected_loss_vector(p, profile);
      for (int a = 0; a < 4; ++a) {
        CHECK(lv[a] == doctest::Approx(oracle_expected_loss(g, p, a, profile)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("expected loss is linear in each opponent strategy") {
  const Game g = Game::random_game(2, 3, 7);
  Vector y1(3), y2(3);
  y1 << 0.2, 0.3, 0.5;
  y2 << 0.6, 0.1, 0.3;
  const double alpha = 0.35;
  const MixedStrategy x = Vector::Constant(3, 1.0 / 3.0);
  const Vector blended = g.expected_loss_vector(0, {x, alpha * y1 + (1 - alpha) * y2});
  const Vector mix = alpha * g.expected_loss_vector(0, {x, y1}) +
                     (1 - alpha) * g.expected_loss_vector(0, {x, y2});
  CHECK((blended - mix).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random_game is deterministic with unit-range entries") {
  const Game a = Game::random_game(2, 5, 99);
  const Game b = Game::random_game(2, 5, 99);
  CHECK(a.loss_tensor(0) == b.loss_tensor(0));
  CHECK(a.loss_tensor(1) == b.loss_tensor(1));
  CHECK(a.scale() == Scale::unit);
  for (int p = 0; p < 2; ++p) {
    CHECK(a.loss_tensor(p).minCoeff() >= 0.0);
    CHECK(a.loss_tensor(p).maxCoeff() <= 1.0);
    CHECK(a.loss_tensor(p).size() == 25);
  }
  const Game c = Game::random_game(2, 5, 100);
  CHECK(a.loss_tensor(0) != c.loss_tensor(0));
}

TEST_CASE("game validation rejects malformed input") {
  Matrix ok(2, 2);
  ok << 0.0, 0.5, 1.0, 0.25;
  Matrix out_of_range(2, 2);
  out_of_range << 0.0, 0.5, 1.0, -0.5;
  CHECK_THROWS_AS(Game::two_player(ok, out_of_range, Scale::unit), std::invalid_argument);
  CHECK_NOTHROW(Game::two_player(ok, out_of_range, Scale::raw));
  CHECK_THROWS_AS(Game::random_game(1, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(Game::random_game(24, 2, 0), CapacityError);

  const Game g = Game::two_player(ok, ok, Scale::unit);
  CHECK_THROWS_AS(g.loss(2, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(g.loss(0, {0, 2}), std::invalid_argument);
  Vector not_dist(2);
  not_dist << 0.7, 0.7;
  CHECK_THROWS_AS(g.expected_loss_vector(0, {not_dist, strat2(0.5)}), std::invalid_argument);
}

TEST_CASE("JSON round trip is bit exact") {
  for (const Game& g : {Game::canonical(CanonicalGame::matching_pennies_G1),
                        Game::random_game(3, 3, 31337)}) {
    const std::string text = g.to_json_string();
    const Game back = Game::from_json_string(text);
    CHECK(back.num_players() == g.num_players());
    CHECK(back.num_actions() == g.num_actions());
    CHECK(back.scale() == g.scale());
    for (int p = 0; p < g.num_players(); ++p) {
      CHECK(back.loss_tensor(p) == g.loss_tensor(p));
    }
    CHECK(back.to_json_string() == text);
  }
  CHECK_THROWS_AS(Game::from_json_string(R"({"players":2,"actions":2,"scale":"volts","losses":[]})"),
                  std::invalid_argument);
}

TEST_CASE("smooth congestion game: OPT is exhaustive-correct and costs are affine") {
  const SmoothGameSpec spec = smooth_congestion_game(3, 3, 8);
  CHECK(spec.lambda == doctest::Approx(5.0 / 3.0));
  CHECK(spec.mu == doctest::Approx(1.0 / 3.0));
  CHECK(spec.game.scale() == Scale::unit);
  CHECK(spec.opt_value == doctest::Approx(social_cost(spec.game, spec.optimal_profile)));

  const int n = spec.game.num_actions();
  std::vector<int> s(3, 0);
  for (s[0] = 0; s[0] < n; ++s[0]) {
    for (s[1] = 0; s[1] < n; ++s[1]) {
      for (s[2] = 0; s[2] < n; ++s[2]) {
        CHECK(social_cost(spec.game, s) >= spec.opt_value - 1e-12);
        // players on the same machine with the same load pay the same cost
        if (s[0] == s[1]) CHECK(spec.game.loss(0, s) == doctest::Approx(spec.game.loss(1, s)));
      }
    }
  }
}

TEST_CASE("smooth congestion game satisfies the smoothness inequality") {
  const SmoothGameSpec spec = smooth_congestion_game(4, 3, 21);
  const Game& g = spec.game;
  const int m = g.num_players(), n = g.num_actions();
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> s(m), sstar(m);
    for (int p = 0; p < m; ++p) {
      s[p] = rng.uniform_int(n);
      sstar[p] = rng.uniform_int(n);
    }
    double deviation_sum = 0.0;
    for (int p = 0; p < m; ++p) {
      std::vector<int> dev = s;
      dev[p] = sstar[p];
      deviation_sum += g.loss(p, dev);
    }
    CHECK(deviation_sum <=
          spec.lambda * social_cost(g, sstar) + spec.mu * social_cost(g, s) + 1e-12);
  }
}

TEST_CASE("smooth congestion game capacity guard") {
  CHECK_THROWS_AS(smooth_congestion_game(21, 2, 1), CapacityError);
}
