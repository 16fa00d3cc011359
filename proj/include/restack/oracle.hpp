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

#ifndef RESTACK_ORACLE_HPP_
#define RESTACK_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "restack/game.hpp"
#include "restack/lp.hpp"

namespace restack {

// -----------------------------------------------------------------------------
// Approximate commitment oracles.  Both maximize
//
//   F(x) = sum_k weights_k * x^T U y^k(x) + <tilt, x>     over x in Delta_N
//
// to within epsilon, where y^k is the follower response under the request's
// mode.  Best-response mode is piecewise linear, so it decomposes into one LP
// per response profile; quantal mode is smooth but non-concave, so it uses a
// deterministic multistart search.
// -----------------------------------------------------------------------------

struct OracleRequest {
  TypeWeights weights = TypeWeights::Zero(1);
  Vec tilt;  // empty vector means no linear tilt
  double epsilon = 0.0;
  ResponseMode mode = ResponseMode::kBest;
};

enum class OracleCertificate {
  kEnumerationComplete,      // every feasible response profile was solved
  kSearchBudgetExhausted,    // deterministic search net fully explored
};

struct OracleResult {
  SimplexPoint x_star;
  double value = 0.0;              // objective re-evaluated at x_star
  std::vector<int> profile;        // winning response profile (BR mode only)
  OracleCertificate certificate = OracleCertificate::kEnumerationComplete;
};

// Euclidean projection onto the probability simplex (sort-based; Held/Wolfe
// water-filling): out_i = max(v_i - theta, 0) with theta chosen so the
// positive part sums to one.
inline Vec project_to_simplex(const Vec& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int j = 0; j < n; ++j) {
    cum += u[j];
    const double candidate = (cum - 1.0) / (j + 1);
    if (u[j] - candidate > 0.0) {
      rho = j + 1;
      theta = candidate;
    }
  }
  (void)rho;
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
  // The positive part sums to 1 up to roundoff; rescale so callers can rely
  // on exact normalization.
  out /= out.sum();
  return out;
}

// Search-net parameters for the quantal-mode oracle.
struct QrSearchParams {
  // Simplicial grid subdivisions; 0 picks a default by dimension (20 for
  // N <= 4, coarser up to the cap).
  int grid_resolution = 0;
  // Grids are exponential in N; refuse instead of hanging.
  int max_dim = 8;
  double step_init = 1.0;
  double step_min = 1e-8;
  int max_iterations = 500;

  int ResolutionFor(int n) const {
    if (grid_resolution > 0) return grid_resolution;
    if (n <= 4) return 20;
    switch (n) {
      case 5: return 10;
      case 6: return 8;
      case 7: return 6;
      default: return 5;
    }
  }
};

namespace detail {

// All points of the simplicial grid { c / r : c in Z^n_{>=0}, sum c = r } in
// lexicographic order — a deterministic cover of Delta_N with 1-norm mesh 2/r.
inline std::vector<Vec> SimplexGrid(int n, int r) {
  std::vector<Vec> points;
  std::vector<int> c(n, 0);
  // Enumerate compositions of r into n parts, first coordinate slowest.
  int level = 0;
  std::vector<int> remaining(n + 1, 0);
  remaining[0] = r;
  while (true) {
    if (level == n - 1) {
      c[level] = remaining[level];
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = static_cast<double>(c[i]) / r;
      points.push_back(std::move(p));
      // Backtrack to the deepest coordinate that can still grow.
      int i = level - 1;
      while (i >= 0 && c[i] == remaining[i]) --i;
      if (i < 0) break;
      ++c[i];
      remaining[i + 1] = remaining[i] - c[i];
      for (int j = i + 1; j < n - 1; ++j) {
        c[j] = 0;
        remaining[j + 1] = remaining[j];
      }
      level = n - 1;
    } else {
      c[level] = 0;
      remaining[level + 1] = remaining[level];
      ++level;
    }
  }
  return points;
}

}  // namespace detail

class CommitmentOracle {
 public:
  explicit CommitmentOracle(GameInstance game, QrSearchParams params = {})
      : game_(std::move(game)), params_(params) {}

  const GameInstance& game() const { return game_; }

  // Builds the response-profile cache (feasibility plus an interior point per
  // feasible profile).  Called implicitly by best-response solves; call it
  // up front before sharing the oracle across threads.
  void EnsureProfileCache() {
    if (!profiles_.has_value()) profiles_ = BuildProfileCache();
  }

  const std::vector<std::vector<int>>& feasible_profiles() {
    EnsureProfileCache();
    feasible_view_.clear();
    feasible_view_.reserve(profiles_->size());
    for (const auto& p : *profiles_) feasible_view_.push_back(p.actions);
    return feasible_view_;
  }

  OracleResult Solve(const OracleRequest& req) {
    CheckRequest(req);
    return req.mode == ResponseMode::kBest ? SolveBest(req) : SolveQuantal(req);
  }

 private:
  struct ProfileRegion {
    std::vector<int> actions;  // i_k per type
    Mat constraints;           // rows <V_{i_k} - V_j, x> >= 0
    Vec interior;              // relative-interior point of the region
  };

  void CheckRequest(const OracleRequest& req) const {
    if (req.weights.num_types() != game_.num_types()) {
      throw ConfigError("oracle: weights/type count mismatch");
    }
    if (req.tilt.size() != 0 &&
        req.tilt.size() != game_.num_leader_actions()) {
      throw ConfigError("oracle: tilt dimension mismatch");
    }
    if (!(req.epsilon >= 0.0) || !std::isfinite(req.epsilon)) {
      throw ConfigError("oracle: epsilon must be finite and >= 0");
    }
  }

  // ---------------------------------------------------------------------
  // Best-response mode.  The simplex splits into polyhedral regions, one per
  // response profile (i_1, ..., i_K): the closure of the set where type k
  // best-responds with i_k.  On each region the objective is linear, so
  //
  //   sup F = max over feasible profiles of an LP with objective
  //           sum_k w_k U_{:, i_k} + tilt.
  //
  // The winning LP optimum can sit on a tie boundary where the realized
  // (lowest-index) response differs, so the point is nudged toward the
  // region's interior; a 1-norm move of delta costs at most
  // delta * (sum_k |w_k| u_max + ||tilt||_inf), hence the delta below keeps
  // the loss within epsilon.
  // ---------------------------------------------------------------------
  OracleResult SolveBest(const OracleRequest& req) {
    EnsureProfileCache();
    const Mat& u = game_.leader_matrix();
    const int n = game_.num_leader_actions();

    const ProfileRegion* winner = nullptr;
    Vec best_x;
    double best_value = 0.0;
    for (const ProfileRegion& region : *profiles_) {
      Vec c = Vec::Zero(n);
      for (int k = 0; k < game_.num_types(); ++k) {
        if (req.weights[k] != 0.0) c += req.weights[k] * u.col(region.actions[k]);
      }
      if (req.tilt.size() != 0) c += req.tilt;
      LpResult lp = lp_solve(c, region.constraints, Vec::Zero(region.constraints.rows()));
      if (lp.status == LpStatus::kInfeasible) {
        throw std::runtime_error("br oracle: cached-feasible profile became infeasible");
      }
      if (lp.status == LpStatus::kNumericalFailure) {
        throw std::runtime_error("br oracle: LP numerical failure");
      }
      if (winner == nullptr || lp.value > best_value) {
        winner = &region;
        best_value = lp.value;
        best_x = std::move(lp.x);
      }
    }
    if (winner == nullptr) {
      throw std::runtime_error("br oracle: no feasible profile (regions must cover the simplex)");
    }

    // Interior shift: move at most delta (1-norm) toward the region interior.
    double denom = 0.0;
    for (int k = 0; k < game_.num_types(); ++k) {
      denom += std::abs(req.weights[k]) * game_.u_max();
    }
    if (req.tilt.size() != 0) denom += req.tilt.cwiseAbs().maxCoeff();
    Vec direction = winner->interior - best_x;
    const double dist = direction.lpNorm<1>();
    double lambda = 0.0;
    if (dist > 0.0) {
      lambda = denom > 0.0 ? std::min(1.0, req.epsilon / denom / dist) : 1.0;
    }
    Vec shifted = best_x + lambda * direction;
    shifted = shifted.cwiseMax(0.0);
    shifted /= shifted.sum();

    OracleResult result{SimplexPoint::FromNormalized(std::move(shifted)), 0.0,
                        winner->actions, OracleCertificate::kEnumerationComplete};
    result.value = weighted_objective(game_, result.x_star, req.weights,
                                      req.tilt, ResponseMode::kBest);
    return result;
  }

  std::vector<ProfileRegion> BuildProfileCache() const {
    const int n = game_.num_leader_actions();
    const int m = game_.num_follower_actions();
    const int kk = game_.num_types();
    if (kk * std::log(static_cast<double>(m)) > std::log(1e6) + 1e-12) {
      throw ConfigError("br oracle: M^K response profiles exceed the 1e6 cap");
    }

    std::vector<ProfileRegion> regions;
    std::vector<int> actions(kk, 0);
    const Vec zero_obj = Vec::Zero(n);
    while (true) {
      Mat constraints(kk * (m - 1), n);
      int row = 0;
      for (int k = 0; k < kk; ++k) {
        const Mat& vk = game_.follower_matrix(k);
        for (int j = 0; j < m; ++j) {
          if (j == actions[k]) continue;
          constraints.row(row++) = (vk.col(actions[k]) - vk.col(j)).transpose();
        }
      }
      LpResult feas = lp_solve(zero_obj, constraints, Vec::Zero(constraints.rows()));
      if (feas.status == LpStatus::kNumericalFailure) {
        throw std::runtime_error("br oracle: feasibility LP numerical failure");
      }
      if (feas.status == LpStatus::kOptimal) {
        ProfileRegion region;
        region.actions = actions;
        region.interior = RegionInterior(constraints, n);
        region.constraints = std::move(constraints);
        regions.push_back(std::move(region));
      }
      // Advance the profile lexicographically, last type fastest.
      int k = kk - 1;
      while (k >= 0 && actions[k] == m - 1) actions[k--] = 0;
      if (k < 0) break;
      ++actions[k];
    }
    return regions;
  }

  // A relative-interior point: the average of the vertices optimizing +e_i
  // and -e_i over the region.  Averaging extreme points in every coordinate
  // direction lands strictly inside every constraint that is not tight on
  // the whole region.
  Vec RegionInterior(const Mat& constraints, int n) const {
    Vec sum = Vec::Zero(n);
    int count = 0;
    Vec obj = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        obj.setZero();
        obj[i] = sign;
        LpResult lp = lp_solve(obj, constraints, Vec::Zero(constraints.rows()));
        if (lp.status != LpStatus::kOptimal) {
          throw std::runtime_error("br oracle: interior-point LP failed");
        }
        sum += lp.x;
        ++count;
      }
    }
    return sum / count;
  }

  // ---------------------------------------------------------------------
  // Quantal mode.  F is smooth but non-concave, so global search uses a
  // deterministic net: every point of a simplicial grid is refined by
  // projected-gradient ascent with a halving step size, and the best refined
  // point wins.  Identical requests take identical floating-point paths, so
  // results are bit-reproducible.
  // ---------------------------------------------------------------------
  OracleResult SolveQuantal(const OracleRequest& req) {
    const int n = game_.num_leader_actions();
    if (n > params_.max_dim) {
      throw ConfigError("qr oracle: N exceeds the grid search cap");
    }
    if (grid_.empty() || grid_dim_ != n) {
      grid_ = detail::SimplexGrid(n, params_.ResolutionFor(n));
      grid_dim_ = n;
    }

    QrWork work(game_, req);
    Vec best_x;
    double best_value = -std::numeric_limits<double>::infinity();
    Vec x, grad, candidate;
    for (const Vec& start : grid_) {
      x = start;
      double fx = work.Value(x);
      double step = params_.step_init;
      // The gradient only changes when x moves, so rejected (step-halving)
      // iterations reuse it.
      bool grad_stale = true;
      for (int iter = 0; iter < params_.max_iterations && step >= params_.step_min;
           ++iter) {
        if (grad_stale) {
          work.Gradient(x, grad);
          grad_stale = false;
        }
        candidate = project_to_simplex(x + step * grad);
        const double fc = work.Value(candidate);
        if (fc > fx) {
          x.swap(candidate);
          fx = fc;
          grad_stale = true;
        } else {
          step *= 0.5;
        }
      }
      if (fx > best_value) {
        best_value = fx;
        best_x = x;
      }
    }

    OracleResult result{SimplexPoint::FromNormalized(std::move(best_x)), 0.0,
                        {}, OracleCertificate::kSearchBudgetExhausted};
    result.value = weighted_objective(game_, result.x_star, req.weights,
                                      req.tilt, ResponseMode::kQuantal);
    return result;
  }

  // Preallocated objective/gradient kernels for the quantal search.
  struct QrWork {
    QrWork(const GameInstance& game, const OracleRequest& req)
        : game(game), req(req), y(game.num_follower_actions()),
          ux(game.num_follower_actions()), scratch(game.num_follower_actions()) {}

    double Value(const Vec& x) {
      ux.noalias() = game.leader_matrix().transpose() * x;
      double value = req.tilt.size() != 0 ? req.tilt.dot(x) : 0.0;
      for (int k = 0; k < game.num_types(); ++k) {
        if (req.weights[k] == 0.0) continue;
        LogitResponse(game.follower_matrix(k), game.eta(), x, y);
        value += req.weights[k] * ux.dot(y);
      }
      return value;
    }

    // grad F = sum_k w_k [ U y^k + J_k^T U^T x ] + tilt, where the Jacobian
    // transpose-product collapses to eta * (V (y .* u) - (y . u) V y) with
    // u = U^T x.
    void Gradient(const Vec& x, Vec& grad) {
      ux.noalias() = game.leader_matrix().transpose() * x;
      if (req.tilt.size() != 0) {
        grad = req.tilt;
      } else {
        grad = Vec::Zero(x.size());
      }
      for (int k = 0; k < game.num_types(); ++k) {
        const double w = req.weights[k];
        if (w == 0.0) continue;
        const Mat& vk = game.follower_matrix(k);
        LogitResponse(vk, game.eta(), x, y);
        grad.noalias() += w * (game.leader_matrix() * y);
        scratch = y.cwiseProduct(ux);
        const double mean_payoff = y.dot(ux);
        grad.noalias() += (w * game.eta()) * (vk * scratch);
        grad.noalias() -= (w * game.eta() * mean_payoff) * (vk * y);
      }
    }

    const GameInstance& game;
    const OracleRequest& req;
    Vec y, ux, scratch;

   private:
    static void LogitResponse(const Mat& vk, double eta, const Vec& x, Vec& y) {
      restack::detail::LogitResponse(vk, eta, x, y);
    }
  };

  GameInstance game_;
  QrSearchParams params_;
  std::optional<std::vector<ProfileRegion>> profiles_;
  std::vector<std::vector<int>> feasible_view_;
  std::vector<Vec> grid_;
  int grid_dim_ = -1;
};

// Convenience wrapper matching the one-shot call sites in tests: feasibility
// of every response profile for `game`, as action-index tuples.
inline std::vector<std::vector<int>> precompute_feasible_profiles(
    const GameInstance& game) {
  CommitmentOracle oracle(game);
  return oracle.feasible_profiles();
}

}  // namespace restack

#endif  // RESTACK_ORACLE_HPP_
