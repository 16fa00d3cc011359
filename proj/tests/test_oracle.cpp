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
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "restack/bench.hpp"
#include "restack/oracle.hpp"
#include "restack/rng.hpp"

namespace {

using restack::CommitmentOracle;
using restack::GameInstance;
using restack::Mat;
using restack::OracleRequest;
using restack::OracleResult;
using restack::ResponseMode;
using restack::SimplexPoint;
using restack::TypeWeights;
using restack::Vec;

std::vector<Mat> FollowerMatrices(const GameInstance& game) {
  std::vector<Mat> v;
  for (int k = 0; k < game.num_types(); ++k) v.push_back(game.follower_matrix(k));
  return v;
}

// One-sided optimality slack against a brute-force grid: the oracle promises
// value >= OPT - eps, and OPT >= grid best, so value >= grid best - eps.
void CheckAgainstGrid(const GameInstance& game, const OracleRequest& req,
                      const OracleResult& result, int grid_resolution) {
  testutil::GridBest grid = testutil::GridSearch(
      game.leader_matrix(), FollowerMatrices(game), game.eta(),
      req.mode == ResponseMode::kQuantal, req.weights.values(), req.tilt,
      grid_resolution);
  REQUIRE(result.value >= grid.value - req.epsilon - 1e-9);
}

}  // namespace

TEST_CASE("euclidean simplex projection", "[oracle]") {
  REQUIRE((restack::project_to_simplex((Vec(2) << 2.0, 0.0).finished()) -
           (Vec(2) << 1.0, 0.0).finished())
              .lpNorm<Eigen::Infinity>() < 1e-15);
  REQUIRE((restack::project_to_simplex((Vec(2) << 0.3, 0.3).finished()) -
           (Vec(2) << 0.5, 0.5).finished())
              .lpNorm<Eigen::Infinity>() < 1e-15);
  // A point already in the simplex is a fixed point.
  Vec inside = (Vec(3) << 0.2, 0.5, 0.3).finished();
  REQUIRE((restack::project_to_simplex(inside) - inside)
              .lpNorm<Eigen::Infinity>() < 1e-15);

  // Projection property: no sampled simplex point is closer to the input.
  restack::SplitMix64 rng(808);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_index(4));
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.next_uniform(-3.0, 3.0);
    Vec p = restack::project_to_simplex(v);
    REQUIRE((p.array() >= 0.0).all());
    REQUIRE(p.sum() == Catch::Approx(1.0).margin(1e-12));
    for (int probe = 0; probe < 40; ++probe) {
      Vec q(n);
      for (int i = 0; i < n; ++i) q[i] = rng.next_exponential(1.0);
      q /= q.sum();
      REQUIRE((p - v).squaredNorm() <= (q - v).squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("simplicial grid enumeration", "[oracle]") {
  const auto grid = restack::detail::SimplexGrid(3, 4);
  REQUIRE(grid.size() == 15);  // C(4+2, 2)
  std::set<std::vector<double>> seen;
  int vertices = 0;
  for (const Vec& p : grid) {
    REQUIRE(p.size() == 3);
    REQUIRE((p.array() >= 0.0).all());
    REQUIRE(p.sum() == Catch::Approx(1.0).margin(1e-12));
    seen.insert({p[0], p[1], p[2]});
    if (p.maxCoeff() == 1.0) ++vertices;
  }
  REQUIRE(seen.size() == grid.size());
  REQUIRE(vertices == 3);

  REQUIRE(restack::detail::SimplexGrid(1, 5).size() == 1);

  // Default resolution schedule: fine for small N, coarser as the grid grows.
  restack::QrSearchParams params;
  REQUIRE(params.ResolutionFor(2) == 20);
  REQUIRE(params.ResolutionFor(4) == 20);
  REQUIRE(params.ResolutionFor(5) == 10);
  REQUIRE(params.ResolutionFor(6) == 8);
  REQUIRE(params.ResolutionFor(7) == 6);
  REQUIRE(params.ResolutionFor(8) == 5);
}

TEST_CASE("feasible profile enumeration", "[oracle]") {
  SECTION("reference game: every joint profile has a witness") {
    // Each type's regions partition the simplex by "which coordinate is
    // smallest", and the uniform point ties all of them, so all 3^6 joint
    // profiles are feasible.
    GameInstance game = restack::appendix_c_game();
    const auto profiles = restack::precompute_feasible_profiles(game);
    REQUIRE(profiles.size() == 729);
    // Lexicographic order, last type fastest.
    REQUIRE(profiles.front() == std::vector<int>{0, 0, 0, 0, 0, 0});
    REQUIRE(profiles[1] == std::vector<int>{0, 0, 0, 0, 0, 1});
    REQUIRE(profiles.back() == std::vector<int>{2, 2, 2, 2, 2, 2});
  }

  SECTION("strictly dominated actions never appear") {
    Mat u = Mat::Ones(2, 2);
    Mat v(2, 2);
    v << 2.0, 0.0,
         2.0, 0.0;  // column 0 dominates column 1 everywhere
    GameInstance game(u, {v}, 1.0);
    const auto profiles = restack::precompute_feasible_profiles(game);
    REQUIRE(profiles.size() == 1);
    REQUIRE(profiles[0] == std::vector<int>{0});
  }

  SECTION("identical columns are feasible everywhere") {
    Mat u = Mat::Ones(2, 3);
    Mat v = Mat::Zero(2, 3);
    GameInstance game(u, {v}, 1.0);
    REQUIRE(restack::precompute_feasible_profiles(game).size() == 3);
  }

  SECTION("the M^K cap rejects oversized enumerations up front") {
    Mat u = Mat::Ones(2, 10);
    std::vector<Mat> v(7, Mat::Zero(2, 10));  // 10^7 profiles
    GameInstance game(u, v, 1.0);
    CommitmentOracle oracle(game);
    REQUIRE_THROWS_AS(oracle.feasible_profiles(), restack::ConfigError);
  }
}

TEST_CASE("best-response oracle on a transparent instance", "[oracle]") {
  // U = V = I2: the follower mirrors the leader's larger coordinate, so
  // committing to e_1 earns 1; ties at the diagonal break toward action 0.
  GameInstance game(Mat::Identity(2, 2), {Mat::Identity(2, 2)}, 1.0);
  CommitmentOracle oracle(game);
  OracleRequest req;
  req.weights = TypeWeights(Vec::Ones(1));
  req.epsilon = 0.01;
  req.mode = ResponseMode::kBest;
  OracleResult result = oracle.Solve(req);
  REQUIRE(result.profile == std::vector<int>{0});
  REQUIRE(result.x_star[0] >= 0.98);
  REQUIRE(result.value >= 1.0 - req.epsilon - 1e-9);
  REQUIRE(result.certificate == restack::OracleCertificate::kEnumerationComplete);
  CheckAgainstGrid(game, req, result, 200);
}

TEST_CASE("oracle value re-evaluates the objective at the returned point",
          "[oracle]") {
  GameInstance game = restack::appendix_c_game();
  CommitmentOracle oracle(game);
  restack::SplitMix64 rng(404);
  for (ResponseMode mode : {ResponseMode::kBest, ResponseMode::kQuantal}) {
    Vec w(6);
    for (int k = 0; k < 6; ++k) w[k] = rng.next_uniform(0.0, 5.0);
    OracleRequest req;
    req.weights = TypeWeights(w);
    req.epsilon = 0.05;
    req.mode = mode;
    OracleResult result = oracle.Solve(req);
    const double recomputed = restack::weighted_objective(
        game, result.x_star, req.weights, req.tilt, mode);
    REQUIRE(std::abs(result.value - recomputed) <= 1e-9);
  }
}

TEST_CASE("best-response oracle profile matches realized responses",
          "[oracle]") {
  restack::SplitMix64 rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    GameInstance game = restack::random_game(3, 3, 2, 1.0, rng.next_u64());
    CommitmentOracle oracle(game);
    OracleRequest req;
    Vec w(2);
    w << rng.next_uniform(0.0, 3.0), rng.next_uniform(0.0, 3.0);
    req.weights = TypeWeights(w);
    req.epsilon = 0.02;
    req.mode = ResponseMode::kBest;
    OracleResult result = oracle.Solve(req);
    REQUIRE(result.profile.size() == 2);
    for (int k = 0; k < 2; ++k) {
      REQUIRE(restack::best_response(game, k, result.x_star) ==
              result.profile[k]);
    }
  }
}

TEST_CASE("oracles beat a fine grid up to epsilon", "[oracle]") {
  restack::SplitMix64 rng(1618);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = 1 + trial % 2;
    GameInstance game = restack::random_game(3, 3, k, 2.0, rng.next_u64());
    CommitmentOracle oracle(game);
    Vec w(k);
    for (int i = 0; i < k; ++i) w[i] = rng.next_uniform(0.0, 4.0);
    for (ResponseMode mode : {ResponseMode::kBest, ResponseMode::kQuantal}) {
      OracleRequest req;
      req.weights = TypeWeights(w);
      req.epsilon = 0.01;
      req.mode = mode;
      OracleResult result = oracle.Solve(req);
      CheckAgainstGrid(game, req, result, 60);
    }
  }
}

TEST_CASE("tilted objectives pull the commitment", "[oracle]") {
  GameInstance game = restack::appendix_c_game();
  CommitmentOracle oracle(game);
  // With zero type weights the objective is purely linear, so the oracle
  // must land (near) the tilt's favourite vertex in both modes.
  for (ResponseMode mode : {ResponseMode::kBest, ResponseMode::kQuantal}) {
    OracleRequest req;
    req.weights = TypeWeights::Zero(6);
    req.tilt = (Vec(3) << 0.0, 0.0, 5.0).finished();
    req.epsilon = 0.01;
    req.mode = mode;
    OracleResult result = oracle.Solve(req);
    REQUIRE(result.x_star[2] >= 0.99);
    REQUIRE(result.value >= 5.0 - req.epsilon - 1e-9);
  }
}

TEST_CASE("zero weights and zero tilt are a degenerate but legal request",
          "[oracle]") {
  GameInstance game = restack::appendix_c_game();
  CommitmentOracle oracle(game);
  OracleRequest req;
  req.weights = TypeWeights::Zero(6);
  req.epsilon = 0.0;
  req.mode = ResponseMode::kBest;
  OracleResult result = oracle.Solve(req);
  REQUIRE(result.value == 0.0);
  REQUIRE(result.x_star.dim() == 3);
  REQUIRE(result.profile.size() == 6);
}

TEST_CASE("scaling a best-response request scales its answer", "[oracle]") {
  restack::SplitMix64 rng(2718);
  GameInstance game = restack::random_game(3, 3, 2, 1.5, rng.next_u64());
  CommitmentOracle oracle(game);

  OracleRequest base;
  base.weights = TypeWeights((Vec(2) << 1.25, 0.75).finished());
  base.tilt = (Vec(3) << 0.5, -0.25, 0.125).finished();
  base.epsilon = 0.01;
  base.mode = ResponseMode::kBest;

  OracleRequest doubled = base;
  doubled.weights = TypeWeights(2.0 * base.weights.values());
  doubled.tilt = 2.0 * base.tilt;
  doubled.epsilon = 2.0 * base.epsilon;

  OracleResult a = oracle.Solve(base);
  OracleResult b = oracle.Solve(doubled);
  REQUIRE(a.profile == b.profile);
  // Doubling is exact in floating point, so the whole pivot path repeats.
  REQUIRE((a.x_star.probs().array() == b.x_star.probs().array()).all());
  REQUIRE(b.value == Catch::Approx(2.0 * a.value).epsilon(1e-13));
}

TEST_CASE("quantal oracle is deterministic", "[oracle]") {
  GameInstance game = restack::appendix_c_game();
  CommitmentOracle first(game);
  CommitmentOracle second(game);
  OracleRequest req;
  req.weights = TypeWeights((Vec(6) << 3, 1, 4, 1, 5, 9).finished());
  req.tilt = (Vec(3) << 0.1, 0.2, 0.3).finished();
  req.epsilon = 0.01;
  req.mode = ResponseMode::kQuantal;
  OracleResult a = first.Solve(req);
  OracleResult b = second.Solve(req);
  REQUIRE((a.x_star.probs().array() == b.x_star.probs().array()).all());
  REQUIRE(a.value == b.value);
  REQUIRE(a.certificate == restack::OracleCertificate::kSearchBudgetExhausted);
}

TEST_CASE("oracle request validation", "[oracle]") {
  GameInstance game = restack::appendix_c_game();
  CommitmentOracle oracle(game);
  OracleRequest req;
  req.weights = TypeWeights::Zero(2);  // game has 6 types
  REQUIRE_THROWS_AS(oracle.Solve(req), restack::ConfigError);
  req.weights = TypeWeights::Zero(6);
  req.tilt = Vec::Ones(2);
  REQUIRE_THROWS_AS(oracle.Solve(req), restack::ConfigError);
  req.tilt = Vec();
  req.epsilon = -1.0;
  REQUIRE_THROWS_AS(oracle.Solve(req), restack::ConfigError);

  // The quantal grid search caps the leader dimension.
  Mat u = Mat::Ones(9, 2);
  std::vector<Mat> v = {Mat::Zero(9, 2)};
  GameInstance wide(u, v, 1.0);
  CommitmentOracle wide_oracle(wide);
  OracleRequest qreq;
  qreq.weights = TypeWeights(Vec::Ones(1));
  qreq.mode = ResponseMode::kQuantal;
  REQUIRE_THROWS_AS(wide_oracle.Solve(qreq), restack::ConfigError);
}
