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

#ifndef RESTACK_SIM_HPP_
#define RESTACK_SIM_HPP_

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "restack/game.hpp"
#include "restack/learner.hpp"
#include "restack/memory.hpp"
#include "restack/oracle.hpp"
#include "restack/rng.hpp"

namespace restack {

// -----------------------------------------------------------------------------
// Experiment harness: adversary type sequences, the round loop (with or
// without reputation), regret accounting against the best-in-hindsight
// benchmark, theoretical bound curves, and batch aggregation.
// -----------------------------------------------------------------------------

// Which follower type shows up each round.
struct AdversarySpec {
  enum class Kind {
    kStoc,   // i.i.d. uniform over the K types
    kCyc,    // round robin, holding each type for `hold` rounds
    kFixed,  // explicit sequence
  };

  Kind kind = Kind::kStoc;
  int hold = 5;                  // Cyc only
  std::vector<int> sequence;     // Fixed only; 0-based type indices
  std::uint64_t seed = 0;        // Stoc only

  // Config syntax: "stoc" | "cyc:L" | "fixed:t1,t2,..." (types 1-based in
  // config text and CSV output, 0-based in memory).
  static AdversarySpec Parse(const std::string& text) {
    AdversarySpec spec;
    auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args =
        colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
      if (head == "stoc" && args.empty()) {
        spec.kind = Kind::kStoc;
        return spec;
      }
      if (head == "cyc") {
        spec.kind = Kind::kCyc;
        spec.hold = std::stoi(args);
        if (spec.hold < 1) throw ConfigError("adversary cyc: L must be >= 1");
        return spec;
      }
      if (head == "fixed") {
        spec.kind = Kind::kFixed;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
          int one_based = std::stoi(item);
          if (one_based < 1) {
            throw ConfigError("adversary fixed: type indices are 1-based");
          }
          spec.sequence.push_back(one_based - 1);
        }
        if (spec.sequence.empty()) {
          throw ConfigError("adversary fixed: empty sequence");
        }
        return spec;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("adversary: cannot parse arguments in '" + text + "'");
    }
    throw ConfigError("adversary: unknown kind '" + text +
                      "' (expected stoc|cyc:L|fixed:t1,t2,...)");
  }

  std::string ToText() const {
    switch (kind) {
      case Kind::kStoc:
        return "stoc";
      case Kind::kCyc:
        return "cyc:" + std::to_string(hold);
      case Kind::kFixed: {
        std::string out = "fixed:";
        for (std::size_t i = 0; i < sequence.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(sequence[i] + 1);
        }
        return out;
      }
    }
    return "stoc";
  }
};

// The full H-round type sequence (0-based types), deterministic given the
// spec.  Cyc round t (1-based) shows type floor((t-1)/L) mod K, so every type
// is held for exactly L rounds per cycle.
inline std::vector<int> adversary_sequence(const AdversarySpec& spec,
                                           int num_types, int horizon) {
  if (num_types < 1 || horizon < 0) {
    throw ConfigError("adversary_sequence: bad K or H");
  }
  std::vector<int> seq(horizon);
  switch (spec.kind) {
    case AdversarySpec::Kind::kStoc: {
      SplitMix64 rng(spec.seed);
      for (int t = 0; t < horizon; ++t) seq[t] = rng.next_index(num_types);
      break;
    }
    case AdversarySpec::Kind::kCyc: {
      for (int t = 0; t < horizon; ++t) seq[t] = (t / spec.hold) % num_types;
      break;
    }
    case AdversarySpec::Kind::kFixed: {
      if (static_cast<int>(spec.sequence.size()) < horizon) {
        throw ConfigError("adversary fixed: sequence shorter than horizon");
      }
      for (int t = 0; t < horizon; ++t) {
        if (spec.sequence[t] >= num_types) {
          throw ConfigError("adversary fixed: type index exceeds K");
        }
        seq[t] = spec.sequence[t];
      }
      break;
    }
  }
  return seq;
}

// The leader's realized payoff in one round: the type-g follower responds to
// the perceived commitment z (the reputation; z = x without memory), while
// the payoff is paid against the actual commitment x:  x^T U y^g(z).
inline double realized_payoff(const GameInstance& game, ResponseMode mode,
                              const SimplexPoint& x, const SimplexPoint& z,
                              int g) {
  if (mode == ResponseMode::kQuantal) {
    Vec y;
    detail::LogitResponse(game.follower_matrix(g), game.eta(), z.probs(), y);
    return x.probs().dot(game.leader_matrix() * y);
  }
  const int i = detail::ArgmaxResponse(game.follower_matrix(g), z.probs());
  return x.probs().dot(game.leader_matrix().col(i));
}

struct RoundRecord {
  int t = 0;        // 1-based round index
  Vec x;            // commitment
  Vec z;            // reputation seen by the follower (= x without memory)
  int g = 0;        // follower type, 0-based
  double payoff = 0.0;
};

struct RunLedger {
  std::vector<RoundRecord> rounds;
  double cumulative_payoff = 0.0;
  double benchmark_value = 0.0;        // best-in-hindsight at the horizon
  std::vector<double> regret;          // prefix-benchmark regret, index t-1
  std::vector<double> bound;           // theoretical bound at horizon t
  double mean_step_l1 = 0.0;           // diagnostic: mean ||x^{t+1} - x^t||_1
};

// Best static commitment against realized cumulative weights:
//   max_{x in Delta_N} sum_k G_k x^T U y^k(x),
// solved by the matching oracle at tolerance 1e-4 * u_max * ||G||_1 (tighter
// than the learner's own epsilon, and scaling with the prefix length).
struct BenchmarkPoint {
  SimplexPoint x;
  double value = 0.0;
};

inline BenchmarkPoint best_in_hindsight(CommitmentOracle& oracle,
                                        const TypeWeights& weights,
                                        ResponseMode mode) {
  OracleRequest req;
  req.weights = weights;
  req.epsilon = 1e-4 * oracle.game().u_max() * weights.values().sum();
  req.mode = mode;
  OracleResult result = oracle.Solve(req);
  return BenchmarkPoint{std::move(result.x_star), result.value};
}

struct EpisodeConfig {
  LearnerAlgorithm algorithm = LearnerAlgorithm::kMemoryless;
  ResponseMode mode = ResponseMode::kBest;
  MemoryModel memory = MemoryModel::Memoryless();
  AdversarySpec adversary;
  int horizon = 1;
  double epsilon = 0.0;         // learner's oracle tolerance
  double nu = 1.0;              // perturbation rate
  std::uint64_t learner_seed = 0;
  bool compute_regret = true;   // prefix benchmarks cost one oracle call per t
  bool compute_bound = true;
};

inline void ValidateEpisodeConfig(const EpisodeConfig& cfg) {
  if (cfg.horizon < 1) throw ConfigError("episode: horizon must be >= 1");
  if (cfg.memory.kind() != MemoryKind::kMemoryless &&
      (cfg.algorithm != LearnerAlgorithm::kWithMemory ||
       cfg.mode != ResponseMode::kQuantal)) {
    throw ConfigError(
        "episode: followers with memory require algorithm=ftpl-memory and "
        "response=qr");
  }
}

// Theoretical regret bound at horizon t for the configured learner:
//   memoryless:  2 u_max sqrt(K t) + eps (t + 1)
//   with-memory: 10 N ||U||_1 (1 + L) sqrt(2 N (t + Theta_t)) + eps (13 t + 1)
inline double bound_curve(const GameInstance& game, LearnerAlgorithm algorithm,
                          const MemoryModel& memory, double epsilon, int t) {
  if (t < 0) throw ConfigError("bound_curve: t must be >= 0");
  const double td = static_cast<double>(t);
  if (algorithm == LearnerAlgorithm::kMemoryless) {
    return 2.0 * game.u_max() * std::sqrt(game.num_types() * td) +
           epsilon * (td + 1.0);
  }
  const double n = game.num_leader_actions();
  const double lipschitz = game.response_lipschitz();
  const double theta = theta_h(memory, t);
  return 10.0 * n * game.norm1_u() * (1.0 + lipschitz) *
             std::sqrt(2.0 * n * (td + theta)) +
         epsilon * (13.0 * td + 1.0);
}

// Rebuilds the prefix-benchmark regret curve from a ledger's stored
// (x^t, z^t, g^t) records: regret(t) = bench(G^t) - sum_{tau<=t} payoff^tau.
// run_episode itself uses this, so recomputation is bit-for-bit.
inline std::vector<double> recompute_regret_curve(CommitmentOracle& oracle,
                                                  const RunLedger& ledger,
                                                  ResponseMode mode) {
  const GameInstance& game = oracle.game();
  TypeWeights prefix = TypeWeights::Zero(game.num_types());
  std::vector<double> regret;
  regret.reserve(ledger.rounds.size());
  double cumulative = 0.0;
  for (const RoundRecord& round : ledger.rounds) {
    prefix.add(round.g, 1.0);
    cumulative += realized_payoff(game, mode,
                                  SimplexPoint::FromNormalized(round.x),
                                  SimplexPoint::FromNormalized(round.z),
                                  round.g);
    regret.push_back(best_in_hindsight(oracle, prefix, mode).value -
                     cumulative);
  }
  return regret;
}

inline RunLedger run_episode(CommitmentOracle& oracle,
                             const EpisodeConfig& cfg) {
  ValidateEpisodeConfig(cfg);
  const GameInstance& game = oracle.game();
  LearnerState learner(cfg.algorithm, cfg.mode, game, cfg.nu, cfg.epsilon,
                       cfg.learner_seed);
  const std::vector<int> types =
      adversary_sequence(cfg.adversary, game.num_types(), cfg.horizon);
  ReputationState reputation(cfg.memory, game.num_leader_actions());

  RunLedger ledger;
  ledger.rounds.reserve(cfg.horizon);
  double cumulative = 0.0;
  double step_total = 0.0;
  for (int t = 1; t <= cfg.horizon; ++t) {
    SimplexPoint x = [&] {
      try {
        return learner.NextCommitment(oracle);
      } catch (const std::exception& e) {
        throw std::runtime_error("episode aborted at round " +
                                 std::to_string(t) + ": " + e.what());
      }
    }();
    const SimplexPoint z = cfg.algorithm == LearnerAlgorithm::kWithMemory
                               ? reputation.Update(x)
                               : x;
    const int g = types[t - 1];
    const double payoff = realized_payoff(game, cfg.mode, x, z, g);
    learner.Observe(g);
    cumulative += payoff;
    if (t > 1) step_total += (x.probs() - ledger.rounds.back().x).lpNorm<1>();
    ledger.rounds.push_back(RoundRecord{t, x.probs(), z.probs(), g, payoff});
  }
  ledger.cumulative_payoff = cumulative;
  ledger.mean_step_l1 =
      cfg.horizon > 1 ? step_total / (cfg.horizon - 1) : 0.0;

  if (cfg.compute_regret) {
    ledger.regret = recompute_regret_curve(oracle, ledger, cfg.mode);
    ledger.benchmark_value = ledger.regret.back() + cumulative;
  }
  if (cfg.compute_bound) {
    ledger.bound.reserve(cfg.horizon);
    for (int t = 1; t <= cfg.horizon; ++t) {
      ledger.bound.push_back(
          bound_curve(game, cfg.algorithm, cfg.memory, cfg.epsilon, t));
    }
  }
  return ledger;
}

// -----------------------------------------------------------------------------
// Batches: S independent episodes with fresh adversary draws and fresh
// perturbations, reduced into mean/std regret trajectories.  Run r derives
// its seeds from base_seed + r, so any run is reproducible in isolation and
// the reduction is independent of execution order.
// -----------------------------------------------------------------------------

struct BatchConfig {
  EpisodeConfig episode;   // learner_seed / adversary.seed are overwritten
  int iterations = 50;     // S
  std::uint64_t base_seed = 12345;
  int threads = 1;
  // When false every run reuses base_seed verbatim (identical runs; handy
  // for determinism checks).
  bool reseed_per_run = true;
};

struct BatchResult {
  std::vector<RunLedger> runs;
  std::vector<std::uint64_t> run_seeds;
  std::vector<double> mean_regret;  // index t-1
  std::vector<double> std_regret;   // population std over the S runs
  std::vector<double> bound;
  double mean_final_regret = 0.0;
  double mean_step_l1 = 0.0;
};

inline EpisodeConfig SeededEpisode(const BatchConfig& cfg, int run_index) {
  EpisodeConfig episode = cfg.episode;
  const std::uint64_t run_seed =
      cfg.reseed_per_run ? cfg.base_seed + static_cast<std::uint64_t>(run_index)
                         : cfg.base_seed;
  // Separate sub-streams so perturbation and adversary draws never overlap.
  SplitMix64 root(run_seed);
  episode.learner_seed = root.next_u64();
  episode.adversary.seed = root.next_u64();
  return episode;
}

inline BatchResult run_batch(const GameInstance& game, const BatchConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigError("batch: iterations must be >= 1");
  if (cfg.threads < 1) throw ConfigError("batch: threads must be >= 1");
  ValidateEpisodeConfig(cfg.episode);

  BatchResult result;
  result.runs.resize(cfg.iterations);
  result.run_seeds.resize(cfg.iterations);
  for (int r = 0; r < cfg.iterations; ++r) {
    result.run_seeds[r] =
        cfg.reseed_per_run ? cfg.base_seed + static_cast<std::uint64_t>(r)
                           : cfg.base_seed;
  }

  const auto worker = [&](int first, int stride) {
    // Oracles hold lazily built caches, so each worker owns a private copy.
    CommitmentOracle oracle(game);
    for (int r = first; r < cfg.iterations; r += stride) {
      result.runs[r] = run_episode(oracle, SeededEpisode(cfg, r));
    }
  };
  if (cfg.threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(cfg.threads);
    for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker, i, cfg.threads);
    for (std::thread& th : pool) th.join();
  }

  // Deterministic reduction in run order.
  const int horizon = cfg.episode.horizon;
  for (const RunLedger& run : result.runs) result.mean_step_l1 += run.mean_step_l1;
  result.mean_step_l1 /= cfg.iterations;
  if (cfg.episode.compute_regret) {
    result.mean_regret.assign(horizon, 0.0);
    result.std_regret.assign(horizon, 0.0);
    for (const RunLedger& run : result.runs) {
      for (int t = 0; t < horizon; ++t) result.mean_regret[t] += run.regret[t];
    }
    for (int t = 0; t < horizon; ++t) result.mean_regret[t] /= cfg.iterations;
    for (const RunLedger& run : result.runs) {
      for (int t = 0; t < horizon; ++t) {
        const double d = run.regret[t] - result.mean_regret[t];
        result.std_regret[t] += d * d;
      }
    }
    for (int t = 0; t < horizon; ++t) {
      result.std_regret[t] = std::sqrt(result.std_regret[t] / cfg.iterations);
    }
    result.mean_final_regret = result.mean_regret.back();
  }
  result.bound.reserve(horizon);
  for (int t = 1; t <= horizon; ++t) {
    result.bound.push_back(bound_curve(game, cfg.episode.algorithm,
                                       cfg.episode.memory, cfg.episode.epsilon,
                                       t));
  }
  return result;
}

}  // namespace restack

#endif  // RESTACK_SIM_HPP_
