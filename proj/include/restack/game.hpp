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

#ifndef RESTACK_GAME_HPP_
#define RESTACK_GAME_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace restack {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown whenever user-supplied data (game files, run configs, CLI options)
// fails validation.  Runtime faults use std::runtime_error instead so the
// two classes of failure stay distinguishable at the CLI boundary.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// -----------------------------------------------------------------------------
// SimplexPoint: a probability vector in the simplex
//   Delta_d = { p in R^d : p_i >= 0, sum_i p_i = 1 }.
//
// Construction validates its input.  Vectors whose mass differs from 1 by at
// most kTolerance (and whose entries are >= -kTolerance) are renormalized;
// anything further away is rejected.  Every SimplexPoint in the system is
// therefore a valid distribution, so downstream code never re-checks.
// -----------------------------------------------------------------------------
class SimplexPoint {
 public:
  static constexpr double kTolerance = 1e-9;

  explicit SimplexPoint(Vec p) : p_(std::move(p)) {
    if (p_.size() == 0) {
      throw ConfigError("SimplexPoint: dimension must be positive");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p_.size(); ++i) {
      if (!std::isfinite(p_[i]) || p_[i] < -kTolerance) {
        throw ConfigError("SimplexPoint: entry " + std::to_string(i) +
                          " is negative beyond tolerance");
      }
      sum += p_[i];
    }
    if (std::abs(sum - 1.0) > kTolerance) {
      throw ConfigError("SimplexPoint: mass " + std::to_string(sum) +
                        " differs from 1 beyond tolerance");
    }
    // Clip the sub-tolerance negatives, then renormalize exactly once.
    for (Eigen::Index i = 0; i < p_.size(); ++i) {
      if (p_[i] < 0.0) p_[i] = 0.0;
    }
    p_ /= p_.sum();
  }

  // Point mass on coordinate `i` of a d-dimensional simplex.
  static SimplexPoint Basis(int d, int i) {
    Vec p = Vec::Zero(d);
    p[i] = 1.0;
    return SimplexPoint(Trusted{}, std::move(p));
  }

  static SimplexPoint Uniform(int d) {
    return SimplexPoint(Trusted{}, Vec::Constant(d, 1.0 / d));
  }

  // Wraps a vector that is already normalized by construction (softmax
  // output, convex combination of stored points, ...).  Skips the paranoid
  // validation so hot loops stay cheap; callers own the invariant.
  static SimplexPoint FromNormalized(Vec p) {
    return SimplexPoint(Trusted{}, std::move(p));
  }

  const Vec& probs() const { return p_; }
  int dim() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }

 private:
  struct Trusted {};
  SimplexPoint(Trusted, Vec p) : p_(std::move(p)) {}
  Vec p_;
};

// Nonnegative per-type weights (cumulative type counts, perturbed counts).
class TypeWeights {
 public:
  explicit TypeWeights(Vec g) : g_(std::move(g)) {
    for (Eigen::Index k = 0; k < g_.size(); ++k) {
      if (!std::isfinite(g_[k]) || g_[k] < 0.0) {
        throw ConfigError("TypeWeights: entries must be finite and >= 0");
      }
    }
  }

  static TypeWeights Zero(int k) { return TypeWeights(Vec::Zero(k)); }

  const Vec& values() const { return g_; }
  int num_types() const { return static_cast<int>(g_.size()); }
  double operator[](int k) const { return g_[k]; }
  void add(int k, double amount) { g_[k] += amount; }

 private:
  Vec g_;
};

// How followers map a (perceived) commitment to a mixed action.
enum class ResponseMode {
  kQuantal,  // logit response with precision eta
  kBest,     // exact argmax, lowest index wins ties
};

inline std::string ToString(ResponseMode mode) {
  return mode == ResponseMode::kQuantal ? "qr" : "br";
}

// -----------------------------------------------------------------------------
// GameInstance: one leader (N pure strategies, payoff matrix U, N x M) facing
// K follower types.  Type k draws its mixed action from payoff matrix V^k
// (N x M); column V^k_{:,i} is the type's payoff vector for action i, so its
// expected payoff for action i against commitment x is <V^k_{:,i}, x>.
// -----------------------------------------------------------------------------
class GameInstance {
 public:
  GameInstance(Mat u, std::vector<Mat> v, double eta)
      : u_(std::move(u)), v_(std::move(v)), eta_(eta) {
    Validate();
    ComputeDerived();
  }

  int num_leader_actions() const { return static_cast<int>(u_.rows()); }   // N
  int num_follower_actions() const { return static_cast<int>(u_.cols()); } // M
  int num_types() const { return static_cast<int>(v_.size()); }            // K

  const Mat& leader_matrix() const { return u_; }
  const Mat& follower_matrix(int k) const { return v_[k]; }
  double eta() const { return eta_; }

  // Largest leader payoff magnitude; payoffs live in [0, u_max].
  double u_max() const { return u_max_; }
  // Induced 1-norms ||A||_1 = max_j sum_i |A_ij| (max absolute column sum).
  double norm1_u() const { return norm1_u_; }
  double norm1_v(int k) const { return norm1_v_[k]; }
  double max_norm1_v() const { return max_norm1_v_; }

  // 1-norm Lipschitz constant of the logit response map:
  //   || y(x) - y(z) ||_1 <= 2 * eta * ||V^k||_1 * || x - z ||_inf,
  // maximized over types.
  double response_lipschitz() const { return 2.0 * eta_ * max_norm1_v_; }

  // Lipschitz constants of the leader's weighted utility
  //   x -> sum_k g_k * x^T U y^k(x)
  // in || . ||_inf: utility_lipschitz bounds the full map, and
  // utility_shift_lipschitz bounds the response-only part
  //   x -> sum_k g_k * z^T U y^k(x) for any fixed z.
  double utility_lipschitz(const Vec& g) const {
    return (1.0 + response_lipschitz()) * g.lpNorm<1>() * norm1_u_;
  }
  double utility_shift_lipschitz(const Vec& g) const {
    return response_lipschitz() * norm1_u_ * g.lpNorm<1>();
  }

 private:
  void Validate() const {
    if (u_.rows() < 1 || u_.cols() < 1) {
      throw ConfigError("GameInstance: U must be a nonempty matrix");
    }
    if ((u_.array() < 0.0).any() || !u_.allFinite()) {
      throw ConfigError("GameInstance: U entries must be finite and >= 0");
    }
    if (v_.empty()) {
      throw ConfigError("GameInstance: need at least one follower type");
    }
    for (const Mat& vk : v_) {
      if (vk.rows() != u_.rows() || vk.cols() != u_.cols()) {
        throw ConfigError("GameInstance: every V^k must match U's shape");
      }
      if (!vk.allFinite()) {
        throw ConfigError("GameInstance: V entries must be finite");
      }
    }
    if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
      throw ConfigError("GameInstance: eta must be positive and finite");
    }
  }

  void ComputeDerived() {
    u_max_ = u_.array().abs().maxCoeff();
    norm1_u_ = u_.array().abs().colwise().sum().maxCoeff();
    norm1_v_.reserve(v_.size());
    max_norm1_v_ = 0.0;
    for (const Mat& vk : v_) {
      double n1 = vk.array().abs().colwise().sum().maxCoeff();
      norm1_v_.push_back(n1);
      max_norm1_v_ = std::max(max_norm1_v_, n1);
    }
  }

  Mat u_;
  std::vector<Mat> v_;
  double eta_;
  double u_max_ = 0.0;
  double norm1_u_ = 0.0;
  std::vector<double> norm1_v_;
  double max_norm1_v_ = 0.0;
};

namespace detail {

// y = softmax(eta * Vk^T x), evaluated with max-subtraction so that large
// eta (sharp, near-best-response followers) cannot overflow exp.
inline void LogitResponse(const Mat& vk, double eta, const Vec& x, Vec& y) {
  y.noalias() = eta * (vk.transpose() * x);
  double top = y.maxCoeff();
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = std::exp(y[i] - top);
    total += y[i];
  }
  y /= total;
}

// Jacobian J (M x N) of the logit response, J(i, :) = d y_i / d x.  From the
// quotient rule on y_i = exp(eta <V_i, x>) / sum_j exp(eta <V_j, x>):
//   d y_i / d x = eta * y_i * (V_i - V y).
inline void LogitJacobian(const Mat& vk, double eta, const Vec& y, Mat& jac) {
  Vec mean_col = vk * y;  // V y, the y-averaged payoff column
  jac.resize(y.size(), vk.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    jac.row(i) = (eta * y[i]) * (vk.col(i) - mean_col).transpose();
  }
}

// Index of the follower's exact best response, smallest index on ties.
inline int ArgmaxResponse(const Mat& vk, const Vec& x) {
  int best = 0;
  double best_score = vk.col(0).dot(x);
  for (int i = 1; i < vk.cols(); ++i) {
    double score = vk.col(i).dot(x);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// Mixed logit response of type k to commitment x:
//   y_i(x) proportional to exp(eta * <V^k_{:,i}, x>).
inline SimplexPoint quantal_response(const GameInstance& game, int k,
                                     const SimplexPoint& x) {
  Vec y;
  detail::LogitResponse(game.follower_matrix(k), game.eta(), x.probs(), y);
  return SimplexPoint::FromNormalized(std::move(y));
}

// Jacobian of the logit response at x; row i holds d y_i / d x (M x N).
inline Mat quantal_response_gradient(const GameInstance& game, int k,
                                     const SimplexPoint& x) {
  Vec y;
  detail::LogitResponse(game.follower_matrix(k), game.eta(), x.probs(), y);
  Mat jac;
  detail::LogitJacobian(game.follower_matrix(k), game.eta(), y, jac);
  return jac;
}

// Exact best response of type k to x; ties break to the smallest index.
inline int best_response(const GameInstance& game, int k,
                         const SimplexPoint& x) {
  return detail::ArgmaxResponse(game.follower_matrix(k), x.probs());
}

// M x K matrix whose column k is type k's response to x under `mode`.
inline Mat response_matrix(const GameInstance& game, const SimplexPoint& x,
                           ResponseMode mode) {
  const int m = game.num_follower_actions();
  const int kk = game.num_types();
  Mat resp = Mat::Zero(m, kk);
  Vec y;
  for (int k = 0; k < kk; ++k) {
    if (mode == ResponseMode::kQuantal) {
      detail::LogitResponse(game.follower_matrix(k), game.eta(), x.probs(), y);
      resp.col(k) = y;
    } else {
      resp(detail::ArgmaxResponse(game.follower_matrix(k), x.probs()), k) = 1.0;
    }
  }
  return resp;
}

// Leader's expected payoff x^T U y for commitment x and follower mix y.
inline double leader_payoff(const GameInstance& game, const SimplexPoint& x,
                            const SimplexPoint& y) {
  return x.probs().dot(game.leader_matrix() * y.probs());
}

// The commitment objective the oracles maximize:
//   F(x) = sum_k weights_k * x^T U y^k(x) + <tilt, x>,
// where y^k follows `mode`.  Pass an empty tilt for the un-tilted objective.
inline double weighted_objective(const GameInstance& game,
                                 const SimplexPoint& x,
                                 const TypeWeights& weights, const Vec& tilt,
                                 ResponseMode mode) {
  if (weights.num_types() != game.num_types()) {
    throw ConfigError("weighted_objective: weights/type count mismatch");
  }
  if (tilt.size() != 0 && tilt.size() != game.num_leader_actions()) {
    throw ConfigError("weighted_objective: tilt dimension mismatch");
  }
  const Vec& xv = x.probs();
  Vec ux = game.leader_matrix().transpose() * xv;  // U^T x, reused per type
  double value = 0.0;
  Vec y;
  for (int k = 0; k < game.num_types(); ++k) {
    if (weights[k] == 0.0) continue;
    if (mode == ResponseMode::kQuantal) {
      detail::LogitResponse(game.follower_matrix(k), game.eta(), xv, y);
      value += weights[k] * ux.dot(y);
    } else {
      value +=
          weights[k] * ux[detail::ArgmaxResponse(game.follower_matrix(k), xv)];
    }
  }
  if (tilt.size() != 0) value += tilt.dot(xv);
  return value;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization.  Schema:
//   { "U": [[...], ...],            N rows of M numbers
//     "V": [[[...], ...], ...],     K matrices shaped like U
//     "eta": number }
// ---------------------------------------------------------------------------
inline nlohmann::json GameToJson(const GameInstance& game) {
  nlohmann::json j;
  const Mat& u = game.leader_matrix();
  j["U"] = nlohmann::json::array();
  for (int r = 0; r < u.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < u.cols(); ++c) row.push_back(u(r, c));
    j["U"].push_back(row);
  }
  j["V"] = nlohmann::json::array();
  for (int k = 0; k < game.num_types(); ++k) {
    const Mat& vk = game.follower_matrix(k);
    nlohmann::json mat = nlohmann::json::array();
    for (int r = 0; r < vk.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < vk.cols(); ++c) row.push_back(vk(r, c));
      mat.push_back(row);
    }
    j["V"].push_back(mat);
  }
  j["eta"] = game.eta();
  return j;
}

namespace detail {

inline Mat MatrixFromJson(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw ConfigError("game json: " + name +
                      " must be a nonempty array of nonempty rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError("game json: " + name + " rows must share one length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ConfigError("game json: " + name + " entries must be numbers");
      }
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace detail

inline GameInstance GameFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("U") || !j.contains("V") ||
      !j.contains("eta")) {
    throw ConfigError("game json: expected object with U, V, eta");
  }
  Mat u = detail::MatrixFromJson(j["U"], "U");
  if (!j["V"].is_array() || j["V"].empty()) {
    throw ConfigError("game json: V must be a nonempty array of matrices");
  }
  std::vector<Mat> v;
  v.reserve(j["V"].size());
  for (std::size_t k = 0; k < j["V"].size(); ++k) {
    v.push_back(detail::MatrixFromJson(j["V"][k], "V[" + std::to_string(k) + "]"));
  }
  if (!j["eta"].is_number()) {
    throw ConfigError("game json: eta must be a number");
  }
  return GameInstance(std::move(u), std::move(v), j["eta"].get<double>());
}

inline GameInstance LoadGame(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open game file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("game file " + path + " is not valid JSON: " + e.what());
  }
  return GameFromJson(j);
}

inline void SaveGame(const GameInstance& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file: " + path);
  out << GameToJson(game).dump(2) << "\n";
}

}  // namespace restack

#endif  // RESTACK_GAME_HPP_
