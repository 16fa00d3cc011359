// Copyright 2026 The restack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "restack/bench.hpp"
#include "restack/game.hpp"
#include "restack/rng.hpp"

namespace {

using restack::GameInstance;
using restack::Mat;
using restack::ResponseMode;
using restack::SimplexPoint;
using restack::TypeWeights;
using restack::Vec;

GameInstance IdentityGame2() {
  Mat u = Mat::Identity(2, 2);
  std::vector<Mat> v = {Mat::Identity(2, 2)};
  return GameInstance(u, v, 1.0);
}

SimplexPoint RandomInterior(restack::SplitMix64& rng, int n) {
  Vec p(n);
  for (int i = 0; i < n; ++i) p[i] = rng.next_exponential(1.0);
  return SimplexPoint::FromNormalized(p / p.sum());
}

}  // namespace

TEST_CASE("simplex point validation", "[game]") {
  REQUIRE_NOTHROW(SimplexPoint((Vec(2) << 0.5, 0.5).finished()));
  // Sub-tolerance negativity is clipped and the mass renormalized.
  SimplexPoint clipped((Vec(2) << 1.0 + 5e-10, -5e-10).finished());
  REQUIRE(clipped[0] == 1.0);
  REQUIRE(clipped[1] == 0.0);
  // Violations beyond the tolerance are rejected.
  REQUIRE_THROWS_AS(SimplexPoint((Vec(2) << 0.5, 0.5 + 1e-8).finished()),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(SimplexPoint((Vec(2) << 1.0 + 1e-8, -1e-8).finished()),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(SimplexPoint((Vec(2) << std::nan(""), 1.0).finished()),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(SimplexPoint(Vec()), restack::ConfigError);

  SimplexPoint basis = SimplexPoint::Basis(4, 2);
  REQUIRE(basis.dim() == 4);
  REQUIRE(basis[2] == 1.0);
  REQUIRE(basis[0] == 0.0);
  SimplexPoint uniform = SimplexPoint::Uniform(5);
  REQUIRE(uniform[3] == 0.2);
}

TEST_CASE("type weights validation", "[game]") {
  REQUIRE_THROWS_AS(TypeWeights((Vec(2) << 1.0, -0.5).finished()),
                    restack::ConfigError);
  TypeWeights g = TypeWeights::Zero(3);
  g.add(1, 2.5);
  REQUIRE(g[1] == 2.5);
  REQUIRE(g.values().sum() == 2.5);
}

TEST_CASE("game instance validation and derived norms", "[game]") {
  REQUIRE_THROWS_AS(GameInstance(Mat::Constant(2, 2, -1.0),
                                 {Mat::Zero(2, 2)}, 1.0),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(GameInstance(Mat::Identity(2, 2), {Mat::Zero(3, 2)}, 1.0),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(GameInstance(Mat::Identity(2, 2), {}, 1.0),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(GameInstance(Mat::Identity(2, 2), {Mat::Zero(2, 2)}, 0.0),
                    restack::ConfigError);
  REQUIRE_THROWS_AS(GameInstance(Mat::Identity(2, 2), {Mat::Zero(2, 2)},
                                 std::numeric_limits<double>::infinity()),
                    restack::ConfigError);

  GameInstance game = restack::appendix_c_game();
  REQUIRE(game.num_leader_actions() == 3);
  REQUIRE(game.num_follower_actions() == 3);
  REQUIRE(game.num_types() == 6);
  REQUIRE(game.u_max() == 3.0);
  // Column sums of U = [[3,2,1],[2,3,1],[1,2,3]] are 6, 7, 5.
  REQUIRE(game.norm1_u() == 7.0);
  for (int k = 0; k < 6; ++k) REQUIRE(game.norm1_v(k) == 1.0);
  REQUIRE(game.max_norm1_v() == 1.0);
  REQUIRE(game.response_lipschitz() == 4.0);  // 2 * eta * ||V||_1 = 2*2*1

  Vec ones = Vec::Ones(6);
  REQUIRE(game.utility_lipschitz(ones) == Catch::Approx(210.0));       // 5*6*7
  REQUIRE(game.utility_shift_lipschitz(ones) == Catch::Approx(168.0)); // 4*7*6
}

TEST_CASE("quantal response values", "[game]") {
  GameInstance game = IdentityGame2();
  SimplexPoint x = SimplexPoint::Basis(2, 0);
  SimplexPoint y = restack::quantal_response(game, 0, x);
  // Scores are (1, 0), so y = (e/(1+e), 1/(1+e)).
  REQUIRE(y[0] == Catch::Approx(0.7310585786300049).epsilon(1e-14));
  REQUIRE(y[1] == Catch::Approx(0.2689414213699951).epsilon(1e-14));
  REQUIRE(y.probs().sum() == Catch::Approx(1.0).margin(1e-15));

  // Symmetric scores give the uniform response.
  SimplexPoint xu = SimplexPoint::Uniform(2);
  SimplexPoint yu = restack::quantal_response(game, 0, xu);
  REQUIRE(yu[0] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("quantal response matches the reference softmax", "[game]") {
  restack::SplitMix64 rng(2026);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_index(3));
    const int m = 2 + static_cast<int>(rng.next_index(3));
    GameInstance game = restack::random_game(
        n, m, 1, 0.5 + rng.next_uniform(0.0, 3.0), rng.next_u64());
    SimplexPoint x = RandomInterior(rng, n);
    Vec lib = restack::quantal_response(game, 0, x).probs();
    Vec ref = testutil::RefSoftmax(game.follower_matrix(0), game.eta(),
                                   x.probs());
    REQUIRE((lib - ref).lpNorm<Eigen::Infinity>() < 1e-14);
  }
}

TEST_CASE("quantal response survives sharp eta", "[game]") {
  Mat u = Mat::Identity(2, 2);
  std::vector<Mat> v = {Mat::Identity(2, 2)};
  GameInstance game(u, v, 1e8);
  SimplexPoint x((Vec(2) << 0.75, 0.25).finished());
  SimplexPoint y = restack::quantal_response(game, 0, x);
  REQUIRE(std::isfinite(y[0]));
  REQUIRE(y[0] == Catch::Approx(1.0).margin(1e-12));  // concentrates on top
}

TEST_CASE("response gradient matches central differences", "[game]") {
  restack::SplitMix64 rng(77);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_index(3));
    const int m = 2 + static_cast<int>(rng.next_index(3));
    GameInstance game = restack::random_game(
        n, m, 1, 0.5 + rng.next_uniform(0.0, 3.5), rng.next_u64());
    SimplexPoint x = RandomInterior(rng, n);
    Mat jac = restack::quantal_response_gradient(game, 0, x);
    REQUIRE(jac.rows() == m);
    REQUIRE(jac.cols() == n);

    Mat fd(m, n);
    for (int j = 0; j < n; ++j) {
      Vec hi = x.probs(), lo = x.probs();
      hi[j] += h;
      lo[j] -= h;
      fd.col(j) = (testutil::RefSoftmax(game.follower_matrix(0), game.eta(), hi) -
                   testutil::RefSoftmax(game.follower_matrix(0), game.eta(), lo)) /
                  (2.0 * h);
    }
    const double rel =
        (fd - jac).norm() / std::max(jac.norm(), 1e-8);
    REQUIRE(rel < 1e-5);

    // Row i has 1-norm at most 2 * eta * y_i * ||V||_1.
    Vec y = restack::quantal_response(game, 0, x).probs();
    for (int i = 0; i < m; ++i) {
      REQUIRE(jac.row(i).lpNorm<1>() <=
              2.0 * game.eta() * y[i] * game.norm1_v(0) + 1e-12);
    }
  }
}

TEST_CASE("response map is Lipschitz in the commitment", "[game]") {
  restack::SplitMix64 rng(4242);
  GameInstance game = restack::appendix_c_game();
  for (int trial = 0; trial < 200; ++trial) {
    SimplexPoint x = RandomInterior(rng, 3);
    SimplexPoint z = RandomInterior(rng, 3);
    for (int k = 0; k < game.num_types(); ++k) {
      const double lhs = (restack::quantal_response(game, k, x).probs() -
                          restack::quantal_response(game, k, z).probs())
                             .lpNorm<1>();
      const double rhs = game.response_lipschitz() *
                         (x.probs() - z.probs()).lpNorm<Eigen::Infinity>();
      REQUIRE(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("best response picks the argmax, lowest index on ties", "[game]") {
  Mat u = Mat::Identity(2, 2);
  Mat v(2, 3);
  v << 1.0, 1.0, 0.0,   // columns 0 and 1 tie when x = e_1
       0.0, 1.0, 2.0;
  GameInstance game(Mat::Ones(2, 3), {v}, 1.0);
  REQUIRE(restack::best_response(game, 0, SimplexPoint::Basis(2, 0)) == 0);
  REQUIRE(restack::best_response(game, 0, SimplexPoint::Basis(2, 1)) == 2);
  // At the uniform point columns score (0.5, 1.0, 1.0): tie among {1, 2}.
  REQUIRE(restack::best_response(game, 0, SimplexPoint::Uniform(2)) == 1);
}

TEST_CASE("sharp quantal response converges to the best response", "[game]") {
  restack::SplitMix64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    GameInstance base = restack::random_game(3, 4, 1, 1.0,
                                                    rng.next_u64());
    GameInstance sharp(base.leader_matrix(),
                       {base.follower_matrix(0)}, 1e8);
    SimplexPoint x = RandomInterior(rng, 3);
    Vec y = restack::quantal_response(sharp, 0, x).probs();
    int argmax = restack::best_response(sharp, 0, x);
    REQUIRE(y[argmax] == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("response matrix stacks per-type responses", "[game]") {
  GameInstance game = restack::appendix_c_game();
  restack::SplitMix64 rng(7);
  SimplexPoint x = RandomInterior(rng, 3);

  Mat qr = restack::response_matrix(game, x, ResponseMode::kQuantal);
  REQUIRE(qr.rows() == 3);
  REQUIRE(qr.cols() == 6);
  for (int k = 0; k < 6; ++k) {
    Vec expected = restack::quantal_response(game, k, x).probs();
    REQUIRE((qr.col(k) - expected).lpNorm<Eigen::Infinity>() == 0.0);
  }

  Mat br = restack::response_matrix(game, x, ResponseMode::kBest);
  for (int k = 0; k < 6; ++k) {
    // Every column is a point mass on the type's exact argmax.
    int idx = testutil::RefArgmax(game.follower_matrix(k), x.probs());
    REQUIRE(br.col(k).sum() == 1.0);
    REQUIRE(br(idx, k) == 1.0);
  }
}

TEST_CASE("leader payoff and weighted objective", "[game]") {
  GameInstance game = restack::appendix_c_game();
  SimplexPoint e0 = SimplexPoint::Basis(3, 0);
  SimplexPoint e2 = SimplexPoint::Basis(3, 2);
  REQUIRE(restack::leader_payoff(game, e0, e0) == 3.0);  // U(0,0)
  REQUIRE(restack::leader_payoff(game, e0, e2) == 1.0);  // U(0,2)

  restack::SplitMix64 rng(13);
  SimplexPoint x = RandomInterior(rng, 3);
  Vec w(6);
  for (int k = 0; k < 6; ++k) w[k] = rng.next_uniform(0.0, 4.0);
  Vec tilt(3);
  for (int i = 0; i < 3; ++i) tilt[i] = rng.next_uniform(-2.0, 2.0);

  for (ResponseMode mode : {ResponseMode::kQuantal, ResponseMode::kBest}) {
    const bool quantal = mode == ResponseMode::kQuantal;
    std::vector<Mat> v;
    for (int k = 0; k < 6; ++k) v.push_back(game.follower_matrix(k));
    const double expected = testutil::RefObjective(
        game.leader_matrix(), v, game.eta(), quantal, x.probs(), w, tilt);
    const double got = restack::weighted_objective(game, x, TypeWeights(w),
                                                   tilt, mode);
    REQUIRE(got == Catch::Approx(expected).margin(1e-12));
    // Without a tilt the linear term drops.
    const double no_tilt = restack::weighted_objective(game, x, TypeWeights(w),
                                                       Vec(), mode);
    REQUIRE(no_tilt == Catch::Approx(expected - tilt.dot(x.probs()))
                         .margin(1e-12));
  }

  REQUIRE_THROWS_AS(
      restack::weighted_objective(game, x, TypeWeights::Zero(2), Vec(),
                                  ResponseMode::kBest),
      restack::ConfigError);
  REQUIRE_THROWS_AS(
      restack::weighted_objective(game, x, TypeWeights::Zero(6), Vec::Ones(2),
                                  ResponseMode::kBest),
      restack::ConfigError);
}

TEST_CASE("json round trip preserves the game", "[game]") {
  GameInstance game = restack::appendix_c_game();
  nlohmann::json j = restack::GameToJson(game);
  GameInstance back = restack::GameFromJson(j);
  REQUIRE(back.leader_matrix() == game.leader_matrix());
  REQUIRE(back.eta() == game.eta());
  REQUIRE(back.num_types() == game.num_types());
  for (int k = 0; k < game.num_types(); ++k) {
    REQUIRE(back.follower_matrix(k) == game.follower_matrix(k));
  }

  const std::string path = "tmp_roundtrip_game.json";
  restack::SaveGame(game, path);
  GameInstance loaded = restack::LoadGame(path);
  REQUIRE(loaded.leader_matrix() == game.leader_matrix());
  std::remove(path.c_str());

  REQUIRE_THROWS_AS(restack::GameFromJson(nlohmann::json::array()),
                    restack::ConfigError);
  nlohmann::json bad = j;
  bad["V"][0][0].erase(1);  // ragged row
  REQUIRE_THROWS_AS(restack::GameFromJson(bad), restack::ConfigError);
  bad = j;
  bad["eta"] = "two";
  REQUIRE_THROWS_AS(restack::GameFromJson(bad), restack::ConfigError);
  bad = j;
  bad["U"][0][0] = -1.0;
  REQUIRE_THROWS_AS(restack::GameFromJson(bad), restack::ConfigError);
  REQUIRE_THROWS_AS(restack::LoadGame("does_not_exist_anywhere.json"),
                    restack::ConfigError);
}

TEST_CASE("reference game matches its construction rule", "[game]") {
  GameInstance game = restack::appendix_c_game();
  // Each follower matrix is minus a permutation matrix: exactly one -1 per
  // column, zero elsewhere, all six permutations distinct.
  std::vector<std::vector<int>> perms;
  for (int k = 0; k < 6; ++k) {
    const Mat& vk = game.follower_matrix(k);
    std::vector<int> perm(3);
    for (int j = 0; j < 3; ++j) {
      int hits = 0;
      for (int i = 0; i < 3; ++i) {
        if (vk(i, j) == -1.0) {
          perm[j] = i;
          ++hits;
        } else {
          REQUIRE(vk(i, j) == 0.0);
        }
      }
      REQUIRE(hits == 1);
    }
    perms.push_back(perm);
  }
  std::sort(perms.begin(), perms.end());
  REQUIRE(std::unique(perms.begin(), perms.end()) == perms.end());
  REQUIRE(game.eta() == 2.0);
}
