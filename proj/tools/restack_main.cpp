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
//
// Command-line driver: validate configs, build or ingest game instances,
// dispatch simulation batches, run property suites, and emit artifacts.
//
// Exit codes: 0 success, 1 usage error, 2 invalid configuration,
// 3 runtime failure (including `check` suite failures).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "restack/bench.hpp"
#include "restack/game.hpp"
#include "restack/learner.hpp"
#include "restack/memory.hpp"
#include "restack/oracle.hpp"
#include "restack/report.hpp"
#include "restack/rng.hpp"
#include "restack/sim.hpp"

namespace {

using restack::AdversarySpec;
using restack::BatchConfig;
using restack::BatchResult;
using restack::CommitmentOracle;
using restack::ConfigError;
using restack::GameInstance;
using restack::LearnerAlgorithm;
using restack::MemoryModel;
using restack::ResponseMode;
using restack::Vec;

struct CliOverrides {
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<double> epsilon;
  std::optional<double> nu;
};

void AddOverrideFlags(CLI::App* cmd, CliOverrides* ov) {
  cmd->add_option("--iterations", ov->iterations, "Number of batch runs S");
  cmd->add_option("--seed", ov->seed, "Base seed (run r uses base + r)");
  cmd->add_option("--out", ov->out, "Output directory");
  cmd->add_option("--threads", ov->threads, "Parallel worker threads");
  cmd->add_option("--epsilon", ov->epsilon, "Oracle tolerance override");
  cmd->add_option("--nu", ov->nu, "Perturbation rate override");
}

LearnerAlgorithm ParseAlgorithm(const std::string& text) {
  if (text == "ftpl-memoryless") return LearnerAlgorithm::kMemoryless;
  if (text == "ftpl-memory") return LearnerAlgorithm::kWithMemory;
  throw ConfigError("config: unknown algorithm '" + text +
                    "' (expected ftpl-memoryless|ftpl-memory)");
}

ResponseMode ParseMode(const std::string& text) {
  if (text == "qr") return ResponseMode::kQuantal;
  if (text == "br") return ResponseMode::kBest;
  throw ConfigError("config: unknown response '" + text + "' (expected qr|br)");
}

// Writes batch.csv, run_###.csv, and plot.svg into out_dir.
void EmitArtifacts(const std::string& out_dir, const std::string& title,
                   const BatchResult& batch) {
  std::filesystem::create_directories(out_dir);
  restack::write_batch_csv(out_dir + "/batch.csv", batch);
  for (std::size_t r = 0; r < batch.runs.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03zu.csv", r);
    restack::write_run_csv(out_dir + "/" + name, batch.runs[r]);
  }
  restack::write_batch_svg(out_dir + "/plot.svg", title, batch);
}

void PrintSummary(const std::string& label, const BatchResult& batch) {
  std::cout << label << ": S=" << batch.runs.size()
            << " H=" << batch.bound.size();
  if (!batch.mean_regret.empty()) {
    std::cout << " mean_final_regret=" << batch.mean_final_regret
              << " (bound " << batch.bound.back() << ")";
  }
  std::cout << " mean_step_l1=" << batch.mean_step_l1 << "\n";
}

int RunFromConfig(const std::string& config_path, const CliOverrides& ov) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const char* key : {"game", "algorithm", "response", "adversary",
                          "memory", "horizon"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("config: missing required key '") + key +
                        "'");
    }
  }

  const GameInstance game = restack::LoadGame(j["game"].get<std::string>());
  BatchConfig cfg;
  cfg.episode.algorithm = ParseAlgorithm(j["algorithm"].get<std::string>());
  cfg.episode.mode = ParseMode(j["response"].get<std::string>());
  cfg.episode.adversary = AdversarySpec::Parse(j["adversary"].get<std::string>());
  cfg.episode.memory = MemoryModel::Parse(j["memory"].get<std::string>());
  cfg.episode.horizon = j["horizon"].get<int>();
  if (cfg.episode.horizon < 1) throw ConfigError("config: horizon must be >= 1");
  cfg.iterations = j.value("iterations", 50);
  cfg.base_seed = j.value("seed", std::uint64_t{12345});
  cfg.threads = j.value("threads", 1);
  cfg.episode.epsilon = j.value("epsilon",
                                restack::default_epsilon(cfg.episode.horizon));
  cfg.episode.nu = j.value(
      "nu", restack::default_nu(game, cfg.episode.algorithm, cfg.episode.memory,
                                cfg.episode.horizon));
  std::string out_dir = j.value("out", std::string("out/run"));

  if (ov.iterations) cfg.iterations = *ov.iterations;
  if (ov.seed) cfg.base_seed = *ov.seed;
  if (ov.threads) cfg.threads = *ov.threads;
  if (ov.epsilon) cfg.episode.epsilon = *ov.epsilon;
  if (ov.nu) cfg.episode.nu = *ov.nu;
  if (ov.out) out_dir = *ov.out;
  restack::ValidateEpisodeConfig(cfg.episode);

  const BatchResult batch = restack::run_batch(game, cfg);
  EmitArtifacts(out_dir, "run (" + restack::ToString(cfg.episode.algorithm) +
                             ", " + cfg.episode.adversary.ToText() + ", " +
                             cfg.episode.memory.ToText() + ")",
                batch);
  PrintSummary("run", batch);
  std::cout << "artifacts written to " << out_dir << "\n";
  return 0;
}

int RunBench(const std::string& preset_name, const CliOverrides& ov) {
  const restack::BenchPreset preset = restack::bench_preset(preset_name);
  const GameInstance game = restack::appendix_c_game();
  BatchConfig cfg = restack::bench_batch_config(
      game, preset, ov.iterations.value_or(50), ov.seed.value_or(12345),
      ov.threads.value_or(1));
  if (ov.epsilon) cfg.episode.epsilon = *ov.epsilon;
  if (ov.nu) cfg.episode.nu = *ov.nu;
  const std::string out_dir = ov.out.value_or("out/" + preset_name);

  const BatchResult batch = restack::run_batch(game, cfg);
  EmitArtifacts(out_dir, "bench " + preset_name, batch);
  PrintSummary("bench " + preset_name, batch);
  std::cout << "artifacts written to " << out_dir << "\n";
  return 0;
}

int GenGame(const std::string& preset, const std::string& out_file, int n,
            int m, int k, double eta, std::uint64_t seed) {
  if (preset == "appendixC") {
    restack::SaveGame(restack::appendix_c_game(), out_file);
  } else if (preset == "random") {
    restack::SaveGame(restack::random_game(n, m, k, eta, seed), out_file);
  } else {
    throw ConfigError("gen-game: unknown preset '" + preset +
                      "' (expected appendixC|random)");
  }
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// `check`: quick property suites over every module.  Smaller sample counts
// than the acceptance tests, intended as a field smoke test.
// ---------------------------------------------------------------------------

struct CheckOutcome {
  std::string name;
  int trials = 0;
  int failures = 0;
};

int RunChecks() {
  std::vector<CheckOutcome> outcomes;
  restack::SplitMix64 rng(20260826);

  {  // Logit responses are valid distributions and 1-norm Lipschitz in x.
    CheckOutcome o{"qr-lipschitz", 2000, 0};
    for (int i = 0; i < o.trials; ++i) {
      const int n = 2 + rng.next_index(4), m = 2 + rng.next_index(4);
      const double eta = rng.next_uniform(0.1, 10.0);
      GameInstance g = restack::random_game(n, m, 1, eta, rng.next_u64());
      Vec a(n), b(n);
      for (int d = 0; d < n; ++d) a[d] = rng.next_uniform(0.0, 1.0);
      for (int d = 0; d < n; ++d) b[d] = rng.next_uniform(0.0, 1.0);
      auto x = restack::SimplexPoint::FromNormalized(Vec(a / a.sum()));
      auto z = restack::SimplexPoint::FromNormalized(Vec(b / b.sum()));
      auto yx = restack::quantal_response(g, 0, x);
      auto yz = restack::quantal_response(g, 0, z);
      const double lhs = (yx.probs() - yz.probs()).lpNorm<1>();
      const double rhs = 2.0 * eta * g.norm1_v(0) *
                         (x.probs() - z.probs()).lpNorm<Eigen::Infinity>();
      if (lhs > rhs + 1e-12 || std::abs(yx.probs().sum() - 1.0) > 1e-12) {
        ++o.failures;
      }
    }
    outcomes.push_back(o);
  }

  {  // Analytic response Jacobian vs central differences.
    CheckOutcome o{"qr-gradient-fd", 200, 0};
    for (int i = 0; i < o.trials; ++i) {
      const int n = 2 + rng.next_index(3), m = 2 + rng.next_index(3);
      GameInstance g =
          restack::random_game(n, m, 1, rng.next_uniform(0.5, 4.0), rng.next_u64());
      Vec raw(n);
      for (int d = 0; d < n; ++d) raw[d] = rng.next_uniform(0.2, 1.0);
      auto x = restack::SimplexPoint::FromNormalized(Vec(raw / raw.sum()));
      restack::Mat jac = restack::quantal_response_gradient(g, 0, x);
      const double h = 1e-6;
      double worst = 0.0;
      for (int d = 0; d < n; ++d) {
        Vec xp = x.probs(), xm = x.probs();
        xp[d] += h;
        xm[d] -= h;
        Vec yp, ym;
        restack::detail::LogitResponse(g.follower_matrix(0), g.eta(), xp, yp);
        restack::detail::LogitResponse(g.follower_matrix(0), g.eta(), xm, ym);
        for (int r = 0; r < m; ++r) {
          worst = std::max(worst,
                           std::abs(jac(r, d) - (yp[r] - ym[r]) / (2 * h)));
        }
      }
      if (worst > 1e-5 * std::max(1.0, jac.cwiseAbs().maxCoeff())) ++o.failures;
    }
    outcomes.push_back(o);
  }

  {  // Sharp logit responses concentrate on the unique best response.
    CheckOutcome o{"qr-br-consistency", 200, 0};
    for (int i = 0; i < o.trials; ++i) {
      const int n = 3, m = 3;
      GameInstance g = restack::random_game(n, m, 1, 1.0, rng.next_u64());
      Vec raw(n);
      for (int d = 0; d < n; ++d) raw[d] = rng.next_uniform(0.1, 1.0);
      auto x = restack::SimplexPoint::FromNormalized(Vec(raw / raw.sum()));
      Vec scores = g.follower_matrix(0).transpose() * x.probs();
      int best = 0;
      for (int a = 1; a < m; ++a) {
        if (scores[a] > scores[best]) best = a;
      }
      double gap = std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) {
        if (a != best) gap = std::min(gap, scores[best] - scores[a]);
      }
      if (gap < 0.1) continue;  // only test instances with a clear winner
      GameInstance sharp(g.leader_matrix(), {g.follower_matrix(0)}, 1e4);
      auto y = restack::quantal_response(sharp, 0, x);
      if (y[best] < 1.0 - 1e-3 ||
          restack::best_response(sharp, 0, x) != best) {
        ++o.failures;
      }
    }
    outcomes.push_back(o);
  }

  {  // Oracles beat a brute-force grid up to epsilon + grid slack.
    CheckOutcome o{"oracle-vs-grid", 10, 0};
    for (int i = 0; i < o.trials; ++i) {
      const int kk = 1 + rng.next_index(2);
      GameInstance g =
          restack::random_game(3, 3, kk, rng.next_uniform(0.5, 4.0), rng.next_u64());
      Vec w(kk);
      for (int t = 0; t < kk; ++t) w[t] = rng.next_uniform(0.0, 5.0);
      const double eps = 0.01;
      CommitmentOracle oracle(g);
      for (ResponseMode mode : {ResponseMode::kBest, ResponseMode::kQuantal}) {
        restack::OracleRequest req;
        req.weights = restack::TypeWeights(w);
        req.epsilon = eps;
        req.mode = mode;
        const double value = oracle.Solve(req).value;
        double grid_best = -1e300;
        for (const Vec& p : restack::detail::SimplexGrid(3, 100)) {
          grid_best = std::max(
              grid_best, restack::weighted_objective(
                             g, restack::SimplexPoint::FromNormalized(Vec(p)),
                             req.weights, Vec(), mode));
        }
        const double slack = eps + g.utility_lipschitz(w) * 0.01;
        if (value < grid_best - slack) ++o.failures;
      }
    }
    outcomes.push_back(o);
  }

  {  // The reported profile is each type's realized best response.
    CheckOutcome o{"br-profile-match", 50, 0};
    for (int i = 0; i < o.trials; ++i) {
      const int kk = 1 + rng.next_index(2);
      GameInstance g = restack::random_game(3, 3, kk, 2.0, rng.next_u64());
      Vec w(kk);
      for (int t = 0; t < kk; ++t) w[t] = rng.next_uniform(0.1, 5.0);
      CommitmentOracle oracle(g);
      restack::OracleRequest req;
      req.weights = restack::TypeWeights(w);
      req.epsilon = 0.01;
      req.mode = ResponseMode::kBest;
      auto res = oracle.Solve(req);
      for (int t = 0; t < kk; ++t) {
        if (restack::best_response(g, t, res.x_star) != res.profile[t]) {
          ++o.failures;
          break;
        }
      }
    }
    outcomes.push_back(o);
  }

  {  // Doubling weights, tilt, and epsilon doubles the objective exactly.
    CheckOutcome o{"br-scale-invariance", 50, 0};
    for (int i = 0; i < o.trials; ++i) {
      GameInstance g = restack::random_game(3, 3, 2, 2.0, rng.next_u64());
      Vec w(2);
      w << rng.next_uniform(0.1, 5.0), rng.next_uniform(0.1, 5.0);
      Vec tilt(3);
      for (int d = 0; d < 3; ++d) tilt[d] = rng.next_uniform(-1.0, 1.0);
      CommitmentOracle oracle(g);
      restack::OracleRequest req;
      req.weights = restack::TypeWeights(w);
      req.tilt = tilt;
      req.epsilon = 0.01;
      req.mode = ResponseMode::kBest;
      auto base = oracle.Solve(req);
      restack::OracleRequest doubled;
      doubled.weights = restack::TypeWeights(Vec(2.0 * w));
      doubled.tilt = 2.0 * tilt;
      doubled.epsilon = 0.02;
      doubled.mode = ResponseMode::kBest;
      auto scaled = oracle.Solve(doubled);
      if (scaled.profile != base.profile ||
          std::abs(scaled.value - 2.0 * base.value) >
              1e-9 * std::max(1.0, std::abs(base.value))) {
        ++o.failures;
      }
    }
    outcomes.push_back(o);
  }

  {  // Incremental reputation equals the defining weighted average.
    CheckOutcome o{"reputation-recompute", 100, 0};
    for (int i = 0; i < o.trials; ++i) {
      MemoryModel model = [&]() {
        switch (rng.next_index(3)) {
          case 0: return MemoryModel::FiniteMemory(1 + rng.next_index(12));
          case 1: return MemoryModel::Discounted(rng.next_uniform(0.1, 0.99));
          default:
            return MemoryModel::Custom(
                {1.0, rng.next_uniform(0.0, 1.0), rng.next_uniform(0.0, 1.0)});
        }
      }();
      const int n = 3, horizon = 20;
      restack::ReputationState state(model, n);
      std::vector<Vec> history;
      for (int t = 1; t <= horizon; ++t) {
        Vec raw(n);
        for (int d = 0; d < n; ++d) raw[d] = rng.next_uniform(0.01, 1.0);
        Vec x = raw / raw.sum();
        history.push_back(x);
        Vec z = state.Update(restack::SimplexPoint::FromNormalized(Vec(x))).probs();
        Vec expect = Vec::Zero(n);
        double mass = 0.0;
        for (int tau = 1; tau <= t; ++tau) {
          const double a = model.weight(t - tau);
          expect += a * history[tau - 1];
          mass += a;
        }
        expect /= mass;
        if ((z - expect).lpNorm<1>() > 1e-12) ++o.failures;
      }
    }
    outcomes.push_back(o);
  }

  {  // Staleness closed form for sliding windows; discount upper bound.
    CheckOutcome o{"theta-aggregates", 0, 0};
    for (int b = 1; b <= 20; ++b) {
      for (int h = b; h <= 100; h += 7) {
        ++o.trials;
        const double closed = restack::theta_h(MemoryModel::FiniteMemory(b), h);
        if (std::abs(closed - (b - 1.0) * (h - b + 2.0) / 4.0) > 1e-9) {
          ++o.failures;
        }
      }
    }
    for (double gamma : {0.5, 0.9, 0.99}) {
      for (int h : {10, 100, 1000}) {
        ++o.trials;
        const double theta = restack::theta_h(MemoryModel::Discounted(gamma), h);
        if (theta + h > h / (1.0 - gamma) + 1e-6) ++o.failures;
      }
    }
    outcomes.push_back(o);
  }

  {  // Perturbation sample means match 1/nu within 1%.
    CheckOutcome o{"perturbation-means", 2, 0};
    for (auto kind : {restack::PerturbationSpec::Kind::kUniformBox,
                      restack::PerturbationSpec::Kind::kExponentialVec}) {
      restack::PerturbationSpec spec;
      spec.kind = kind;
      spec.nu = 0.37;
      spec.dim = 1000000;
      spec.seed = 99;
      const double mean = spec.Draw().mean();
      if (std::abs(mean - 1.0 / spec.nu) > 0.01 / spec.nu) ++o.failures;
    }
    outcomes.push_back(o);
  }

  {  // Fixed seeds reproduce entire episodes bit-for-bit.
    CheckOutcome o{"episode-determinism", 2, 0};
    const GameInstance game = restack::appendix_c_game();
    for (const std::string& name : {std::string("stoc-nomem"), std::string("stoc-fm")}) {
      auto preset = restack::bench_preset(name);
      preset.horizon = 12;
      BatchConfig cfg = restack::bench_batch_config(game, preset, 1, 777, 1);
      cfg.episode.compute_regret = false;
      const BatchResult a = restack::run_batch(game, cfg);
      const BatchResult b = restack::run_batch(game, cfg);
      for (int t = 0; t < preset.horizon; ++t) {
        if (a.runs[0].rounds[t].x != b.runs[0].rounds[t].x ||
            a.runs[0].rounds[t].payoff != b.runs[0].rounds[t].payoff) {
          ++o.failures;
          break;
        }
      }
    }
    outcomes.push_back(o);
  }

  {  // Bound curves never decrease in t.
    CheckOutcome o{"bound-monotone", 0, 0};
    const GameInstance game = restack::appendix_c_game();
    for (const std::string& name : restack::bench_preset_names()) {
      auto preset = restack::bench_preset(name);
      ++o.trials;
      double prev = -1.0;
      for (int t = 1; t <= 200; ++t) {
        const double bound = restack::bound_curve(
            game, preset.algorithm, preset.memory, 1.0 / std::sqrt(200.0), t);
        if (bound < prev - 1e-12) {
          ++o.failures;
          break;
        }
        prev = bound;
      }
    }
    outcomes.push_back(o);
  }

  int total_failures = 0;
  for (const CheckOutcome& o : outcomes) {
    total_failures += o.failures;
    std::cout << (o.failures == 0 ? "[ok]   " : "[FAIL] ") << o.name
              << ": trials=" << o.trials << " failures=" << o.failures << "\n";
  }
  std::cout << (total_failures == 0 ? "all checks passed\n"
                                    : "some checks FAILED\n");
  return total_failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"restack: repeated Stackelberg commitment simulator"};
  app.require_subcommand(1);

  std::string config_path;
  CliOverrides run_ov;
  CLI::App* run = app.add_subcommand("run", "Run a batch from a JSON config");
  run->add_option("--config", config_path, "Path to run config JSON")
      ->required();
  AddOverrideFlags(run, &run_ov);

  std::string preset_name;
  CliOverrides bench_ov;
  CLI::App* bench = app.add_subcommand("bench", "Run a named benchmark preset");
  bench->add_option("preset", preset_name, "One of stoc-nomem cyc-nomem stoc-fm cyc-fm stoc-dm cyc-dm")
      ->required();
  AddOverrideFlags(bench, &bench_ov);

  CLI::App* check = app.add_subcommand("check", "Run quick property suites");

  std::string gen_preset = "appendixC";
  std::string gen_out = "game.json";
  int gen_n = 3, gen_m = 3, gen_k = 2;
  double gen_eta = 2.0;
  std::uint64_t gen_seed = 1;
  CLI::App* gen = app.add_subcommand("gen-game", "Write a game instance JSON");
  gen->add_option("preset", gen_preset, "appendixC or random");
  gen->add_option("--out", gen_out, "Output file path");
  gen->add_option("--n", gen_n, "Leader actions (random preset)");
  gen->add_option("--m", gen_m, "Follower actions (random preset)");
  gen->add_option("--k", gen_k, "Follower types (random preset)");
  gen->add_option("--eta", gen_eta, "Logit precision (random preset)");
  gen->add_option("--seed", gen_seed, "Seed (random preset)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return RunFromConfig(config_path, run_ov);
    if (bench->parsed()) return RunBench(preset_name, bench_ov);
    if (check->parsed()) return RunChecks();
    if (gen->parsed()) {
      return GenGame(gen_preset, gen_out, gen_n, gen_m, gen_k, gen_eta,
                     gen_seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
