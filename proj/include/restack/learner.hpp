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

#ifndef RESTACK_LEARNER_HPP_
#define RESTACK_LEARNER_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "restack/game.hpp"
#include "restack/oracle.hpp"
#include "restack/rng.hpp"

namespace restack {

// -----------------------------------------------------------------------------
// Follow-the-perturbed-leader against a sequence of follower types.  Each
// round the leader commits to x^t, the adversary reveals a type g^t (a basis
// vector), and the leader accumulates G^t = G^{t-1} + g^t.  A random
// perturbation sigma — drawn once, before round one, and held fixed — breaks
// the instability of plain follow-the-leader:
//
//   memoryless   x^t maximizes  sum_k (G^{t-1} + sigma)_k x^T U y^k(x),
//                sigma_k iid Uniform[0, 2/nu], one entry per type;
//   with-memory  x^t maximizes  sum_k G^{t-1}_k x^T U y^k(x) + <sigma, x>,
//                sigma_n iid Exponential(rate nu), one entry per leader
//                action, entering as a linear tilt.
//
// At t=1 both reduce to pure perturbation play (G^0 = 0).
// -----------------------------------------------------------------------------

enum class LearnerAlgorithm { kMemoryless, kWithMemory };

inline std::string ToString(LearnerAlgorithm a) {
  return a == LearnerAlgorithm::kMemoryless ? "ftpl-memoryless" : "ftpl-memory";
}

// Perturbation distribution: which family, its rate, dimension, and seed.
struct PerturbationSpec {
  enum class Kind { kUniformBox, kExponentialVec };

  Kind kind = Kind::kUniformBox;
  double nu = 1.0;
  int dim = 1;
  std::uint64_t seed = 0;

  // Deterministic given (kind, nu, dim, seed): entries are drawn in index
  // order from a SplitMix64 stream.
  Vec Draw() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw ConfigError("perturbation: nu must be positive and finite");
    }
    if (dim < 1) throw ConfigError("perturbation: dimension must be >= 1");
    SplitMix64 rng(seed);
    Vec sigma(dim);
    for (int i = 0; i < dim; ++i) {
      sigma[i] = kind == Kind::kUniformBox ? rng.next_uniform(0.0, 2.0 / nu)
                                           : rng.next_exponential(nu);
    }
    return sigma;
  }
};

// Perturbation rate for the memoryless learner at horizon H with K types.
inline double nu_memoryless(int num_types, int horizon) {
  if (num_types < 1 || horizon < 1) {
    throw ConfigError("nu_memoryless: need K >= 1 and H >= 1");
  }
  return std::sqrt(static_cast<double>(num_types) / horizon);
}

// Perturbation rate for the with-memory learner:
//   nu = ( ||U||_1 * (1 + L) * sqrt(50 N (theta + H)) )^{-1},
// where L = 2 eta max_k ||V^k||_1 and theta aggregates reputation staleness
// over the horizon (any upper bound on it is admissible and only shrinks nu).
inline double nu_memory(const GameInstance& game, int n, int horizon,
                        double theta) {
  if (n < 1 || horizon < 1) {
    throw ConfigError("nu_memory: need N >= 1 and H >= 1");
  }
  if (!(theta >= 0.0)) throw ConfigError("nu_memory: theta must be >= 0");
  const double lipschitz = game.response_lipschitz();
  return 1.0 / (game.norm1_u() * (1.0 + lipschitz) *
                std::sqrt(50.0 * n * (theta + horizon)));
}

class LearnerState {
 public:
  LearnerState(LearnerAlgorithm algorithm, ResponseMode mode,
               const GameInstance& game, double nu, double epsilon,
               std::uint64_t seed)
      : algorithm_(algorithm),
        mode_(mode),
        epsilon_(epsilon),
        weights_(TypeWeights::Zero(game.num_types())) {
    if (algorithm == LearnerAlgorithm::kWithMemory &&
        mode != ResponseMode::kQuantal) {
      throw ConfigError(
          "learner: the with-memory algorithm requires quantal responses");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw ConfigError("learner: epsilon must be finite and >= 0");
    }
    PerturbationSpec spec;
    spec.kind = algorithm == LearnerAlgorithm::kMemoryless
                    ? PerturbationSpec::Kind::kUniformBox
                    : PerturbationSpec::Kind::kExponentialVec;
    spec.nu = nu;
    spec.dim = algorithm == LearnerAlgorithm::kMemoryless
                   ? game.num_types()
                   : game.num_leader_actions();
    spec.seed = seed;
    sigma_ = spec.Draw();
  }

  LearnerAlgorithm algorithm() const { return algorithm_; }
  ResponseMode mode() const { return mode_; }
  const Vec& sigma() const { return sigma_; }
  const TypeWeights& cumulative_weights() const { return weights_; }
  // Index of the upcoming round (1-based; rounds observed so far + 1).
  int round() const { return observed_ + 1; }

  // The oracle problem defining this round's commitment.
  OracleRequest NextRequest() const {
    OracleRequest req;
    req.epsilon = epsilon_;
    req.mode = mode_;
    if (algorithm_ == LearnerAlgorithm::kMemoryless) {
      req.weights = TypeWeights(weights_.values() + sigma_);
      // no tilt
    } else {
      req.weights = weights_;
      req.tilt = sigma_;
    }
    return req;
  }

  // Issues exactly one oracle call and returns the round's commitment.
  SimplexPoint NextCommitment(CommitmentOracle& oracle) const {
    return oracle.Solve(NextRequest()).x_star;
  }

  // Records the revealed type: G^t = G^{t-1} + e_k, t advances.
  void Observe(int type_index) {
    if (type_index < 0 || type_index >= weights_.num_types()) {
      throw ConfigError("learner: observed type index out of range");
    }
    weights_.add(type_index, 1.0);
    ++observed_;
  }

 private:
  LearnerAlgorithm algorithm_;
  ResponseMode mode_;
  double epsilon_;
  TypeWeights weights_{Vec::Zero(1)};
  Vec sigma_;
  int observed_ = 0;
};

}  // namespace restack

#endif  // RESTACK_LEARNER_HPP_
