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

#ifndef RESTACK_BENCH_HPP_
#define RESTACK_BENCH_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "restack/game.hpp"
#include "restack/learner.hpp"
#include "restack/memory.hpp"
#include "restack/rng.hpp"
#include "restack/sim.hpp"

namespace restack {

// -----------------------------------------------------------------------------
// Reference experiment instance and named benchmark presets.
// -----------------------------------------------------------------------------

// The 3x3 six-type benchmark game: leader payoffs
//   U = [[3,2,1],[2,3,1],[1,2,3]],
// follower payoff matrices the six column permutations of -I3 (in
// lexicographic permutation order), logit precision eta = 2.  Each type's
// best response dodges the leader's most likely action, making commitment
// genuinely valuable.
inline GameInstance appendix_c_game() {
  Mat u(3, 3);
  u << 3, 2, 1,
       2, 3, 1,
       1, 2, 3;
  std::vector<Mat> v;
  std::vector<int> perm = {0, 1, 2};
  do {
    Mat vk = Mat::Zero(3, 3);
    for (int j = 0; j < 3; ++j) vk(perm[j], j) = -1.0;
    v.push_back(vk);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return GameInstance(std::move(u), std::move(v), 2.0);
}

// A random valid instance: U entries uniform on [0, 3], V entries uniform on
// [-1, 1].  Deterministic in the seed.
inline GameInstance random_game(int n, int m, int k, double eta,
                                std::uint64_t seed) {
  if (n < 1 || m < 1 || k < 1) {
    throw ConfigError("random_game: need N, M, K >= 1");
  }
  SplitMix64 rng(seed);
  Mat u(n, m);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) u(r, c) = rng.next_uniform(0.0, 3.0);
  }
  std::vector<Mat> v;
  v.reserve(k);
  for (int t = 0; t < k; ++t) {
    Mat vk(n, m);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < m; ++c) vk(r, c) = rng.next_uniform(-1.0, 1.0);
    }
    v.push_back(std::move(vk));
  }
  return GameInstance(std::move(u), std::move(v), eta);
}

// Default oracle tolerance at horizon H.
inline double default_epsilon(int horizon) {
  if (horizon < 1) throw ConfigError("default_epsilon: horizon must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(horizon));
}

// Default perturbation rate: the analytic schedule for the chosen algorithm.
inline double default_nu(const GameInstance& game, LearnerAlgorithm algorithm,
                         const MemoryModel& memory, int horizon) {
  if (algorithm == LearnerAlgorithm::kMemoryless) {
    return nu_memoryless(game.num_types(), horizon);
  }
  return nu_memory(game, game.num_leader_actions(), horizon,
                   theta_h(memory, horizon));
}

// Named benchmark presets on the reference game, horizon 200: best-response
// followers for the memoryless pairs, quantal followers with a 10-round
// window (fm) or a 0.9 discount (dm) for the with-memory pairs; adversaries
// i.i.d.-uniform (stoc) or round robin holding each type 5 rounds (cyc).
struct BenchPreset {
  std::string name;
  LearnerAlgorithm algorithm = LearnerAlgorithm::kMemoryless;
  ResponseMode mode = ResponseMode::kBest;
  AdversarySpec adversary;
  MemoryModel memory = MemoryModel::Memoryless();
  int horizon = 200;
};

inline const std::vector<std::string>& bench_preset_names() {
  static const std::vector<std::string> names = {
      "stoc-nomem", "cyc-nomem", "stoc-fm", "cyc-fm", "stoc-dm", "cyc-dm"};
  return names;
}

inline BenchPreset bench_preset(const std::string& name) {
  BenchPreset preset;
  preset.name = name;
  preset.horizon = 200;

  std::string adversary, memory;
  const auto dash = name.find('-');
  if (dash != std::string::npos) {
    adversary = name.substr(0, dash);
    memory = name.substr(dash + 1);
  }
  if ((adversary != "stoc" && adversary != "cyc") ||
      (memory != "nomem" && memory != "fm" && memory != "dm")) {
    throw ConfigError("bench: unknown preset '" + name +
                      "' (expected {stoc,cyc}-{nomem,fm,dm})");
  }

  preset.adversary.kind = adversary == "stoc" ? AdversarySpec::Kind::kStoc
                                              : AdversarySpec::Kind::kCyc;
  preset.adversary.hold = 5;
  if (memory == "nomem") {
    preset.algorithm = LearnerAlgorithm::kMemoryless;
    preset.mode = ResponseMode::kBest;
    preset.memory = MemoryModel::Memoryless();
  } else {
    preset.algorithm = LearnerAlgorithm::kWithMemory;
    preset.mode = ResponseMode::kQuantal;
    preset.memory = memory == "fm" ? MemoryModel::FiniteMemory(10)
                                   : MemoryModel::Discounted(0.9);
  }
  return preset;
}

// The batch an entire preset runs: reference game, analytic step size,
// epsilon = 1/sqrt(H), S iterations from base_seed.
inline BatchConfig bench_batch_config(const GameInstance& game,
                                      const BenchPreset& preset, int iterations,
                                      std::uint64_t base_seed, int threads) {
  BatchConfig cfg;
  cfg.episode.algorithm = preset.algorithm;
  cfg.episode.mode = preset.mode;
  cfg.episode.memory = preset.memory;
  cfg.episode.adversary = preset.adversary;
  cfg.episode.horizon = preset.horizon;
  cfg.episode.epsilon = default_epsilon(preset.horizon);
  cfg.episode.nu =
      default_nu(game, preset.algorithm, preset.memory, preset.horizon);
  cfg.iterations = iterations;
  cfg.base_seed = base_seed;
  cfg.threads = threads;
  return cfg;
}

}  // namespace restack

#endif  // RESTACK_BENCH_HPP_
