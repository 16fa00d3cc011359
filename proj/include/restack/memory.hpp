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

#ifndef RESTACK_MEMORY_HPP_
#define RESTACK_MEMORY_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "restack/game.hpp"

namespace restack {

// -----------------------------------------------------------------------------
// Followers with memory judge the leader by a reputation: a weighted average
// of past commitments,
//
//   z^t = (1/b_t) * sum_{tau=1}^{t} a_{t-tau} x^tau,   b_t = sum_{tau=1}^{t} a_{t-tau},
//
// where a_s >= 0 weights a commitment made s rounds ago and a_0 > 0.  The
// built-in weight families:
//   Memoryless    a_0 = 1, a_s = 0 otherwise (z^t = x^t)
//   FiniteMemory  a_s = 1 for s < B (uniform sliding window of width B)
//   Discounted    a_s = gamma^s (exponential forgetting)
//   Custom        explicit finite list a_0, a_1, ...
// -----------------------------------------------------------------------------

enum class MemoryKind { kMemoryless, kFiniteMemory, kDiscounted, kCustom };

class MemoryModel {
 public:
  // Custom weight tails below this threshold are dropped to bound storage.
  static constexpr double kCustomWeightFloor = 1e-15;

  static MemoryModel Memoryless() { return MemoryModel(MemoryKind::kMemoryless); }

  static MemoryModel FiniteMemory(int b) {
    if (b < 1) throw ConfigError("memory fm: window B must be >= 1");
    MemoryModel m(MemoryKind::kFiniteMemory);
    m.window_ = b;
    return m;
  }

  static MemoryModel Discounted(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
      throw ConfigError("memory dm: gamma must lie in (0, 1)");
    }
    MemoryModel m(MemoryKind::kDiscounted);
    m.gamma_ = gamma;
    return m;
  }

  static MemoryModel Custom(std::vector<double> weights) {
    for (double a : weights) {
      if (!std::isfinite(a) || a < 0.0) {
        throw ConfigError("memory custom: weights must be finite and >= 0");
      }
    }
    if (weights.empty() || weights[0] < kCustomWeightFloor) {
      throw ConfigError("memory custom: need a_0 > 0");
    }
    // Truncate at the first weight below the floor so the stored window stays
    // finite; warn because any later (even large) weights are dropped too.
    for (std::size_t s = 1; s < weights.size(); ++s) {
      if (weights[s] < kCustomWeightFloor) {
        std::cerr << "warning: custom memory weights truncated at index " << s
                  << " (first entry below " << kCustomWeightFloor << ")\n";
        weights.resize(s);
        break;
      }
    }
    MemoryModel m(MemoryKind::kCustom);
    m.custom_ = std::move(weights);
    return m;
  }

  // Config syntax: "none" | "fm:B" | "dm:gamma" | "custom:a0,a1,...".
  static MemoryModel Parse(const std::string& text) {
    if (text == "none") return Memoryless();
    auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args =
        colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
      if (head == "fm") return FiniteMemory(std::stoi(args));
      if (head == "dm") return Discounted(std::stod(args));
      if (head == "custom") {
        std::vector<double> weights;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) weights.push_back(std::stod(item));
        return Custom(std::move(weights));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("memory model: cannot parse arguments in '" + text + "'");
    }
    throw ConfigError("memory model: unknown kind '" + text +
                      "' (expected none|fm:B|dm:gamma|custom:a0,a1,...)");
  }

  std::string ToText() const {
    switch (kind_) {
      case MemoryKind::kMemoryless:
        return "none";
      case MemoryKind::kFiniteMemory:
        return "fm:" + std::to_string(window_);
      case MemoryKind::kDiscounted: {
        std::ostringstream out;
        out << "dm:" << gamma_;
        return out.str();
      }
      case MemoryKind::kCustom: {
        std::ostringstream out;
        out << "custom:";
        for (std::size_t s = 0; s < custom_.size(); ++s) {
          if (s) out << ',';
          out << custom_[s];
        }
        return out.str();
      }
    }
    return "none";
  }

  MemoryKind kind() const { return kind_; }
  int window() const { return window_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& custom_weights() const { return custom_; }

  // Weight a_s on a commitment made s >= 0 rounds ago.
  double weight(int s) const {
    switch (kind_) {
      case MemoryKind::kMemoryless:
        return s == 0 ? 1.0 : 0.0;
      case MemoryKind::kFiniteMemory:
        return s < window_ ? 1.0 : 0.0;
      case MemoryKind::kDiscounted:
        return std::pow(gamma_, s);
      case MemoryKind::kCustom:
        return s < static_cast<int>(custom_.size()) ? custom_[s] : 0.0;
    }
    return 0.0;
  }

  // Rounds of history that can carry nonzero weight (INT_MAX-ish for DM).
  int span() const {
    switch (kind_) {
      case MemoryKind::kMemoryless:
        return 1;
      case MemoryKind::kFiniteMemory:
        return window_;
      case MemoryKind::kDiscounted:
        return -1;  // unbounded; handled by O(1) accumulators
      case MemoryKind::kCustom:
        return static_cast<int>(custom_.size());
    }
    return 1;
  }

 private:
  explicit MemoryModel(MemoryKind kind) : kind_(kind) {}
  MemoryKind kind_;
  int window_ = 1;
  double gamma_ = 0.5;
  std::vector<double> custom_;
};

// -----------------------------------------------------------------------------
// ReputationState: incrementally maintains z^t as commitments arrive.
// Sliding-window models store the last `span` commitments; the discounted
// model needs only the O(1) recursions s <- gamma*s + x, c <- gamma*c + 1,
// z = s / c.
// -----------------------------------------------------------------------------
class ReputationState {
 public:
  ReputationState(MemoryModel model, int n)
      : model_(std::move(model)), dim_(n), discounted_sum_(Vec::Zero(n)) {}

  int round() const { return t_; }
  int dim() const { return dim_; }

  // Feeds x^t (t advances by one) and returns the updated reputation z^t.
  SimplexPoint Update(const SimplexPoint& x) {
    if (x.dim() != dim_) {
      throw ConfigError("ReputationState: commitment dimension mismatch");
    }
    ++t_;
    switch (model_.kind()) {
      case MemoryKind::kMemoryless:
        return x;
      case MemoryKind::kDiscounted: {
        const double gamma = model_.gamma();
        discounted_sum_ = gamma * discounted_sum_ + x.probs();
        discounted_count_ = gamma * discounted_count_ + 1.0;
        // A convex combination of simplex points is normalized up to
        // roundoff; no rescale, so a width-one window returns x bit-exactly.
        return SimplexPoint::FromNormalized(discounted_sum_ /
                                            discounted_count_);
      }
      case MemoryKind::kFiniteMemory:
      case MemoryKind::kCustom: {
        window_.push_front(x.probs());
        if (static_cast<int>(window_.size()) > model_.span()) {
          window_.pop_back();
        }
        Vec z = Vec::Zero(dim_);
        double total = 0.0;
        for (std::size_t s = 0; s < window_.size(); ++s) {
          const double a = model_.weight(static_cast<int>(s));
          if (a == 0.0) continue;
          z += a * window_[s];
          total += a;
        }
        z /= total;
        return SimplexPoint::FromNormalized(std::move(z));
      }
    }
    return x;
  }

 private:
  MemoryModel model_;
  int dim_;
  int t_ = 0;
  std::deque<Vec> window_;  // newest commitment at the front
  Vec discounted_sum_;
  double discounted_count_ = 0.0;
};

// -----------------------------------------------------------------------------
// Reputation staleness aggregate
//   Theta_H = sum_{t=1}^{H} (1/b_t) * sum_{tau=1}^{t} a_{t-tau} * (t - tau),
// the total weighted age of the history entering each round's reputation.
// It drives the with-memory step size and regret bound: slower-forgetting
// followers force a smaller perturbation rate.
// -----------------------------------------------------------------------------

namespace detail {

// Evaluates the defining sum with running aggregates: after processing round
// t, `mass` = sum_{s<t} a_s and `age` = sum_{s<t} a_s * s, so the round's
// staleness is age / mass.
inline double ThetaRunningSum(const MemoryModel& model, int horizon) {
  double theta = 0.0;
  double mass = 0.0;
  double age = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const int s = t - 1;  // weight index newly active in round t
    const double a = model.weight(s);
    mass += a;
    age += a * static_cast<double>(s);
    theta += age / mass;
  }
  return theta;
}

}  // namespace detail

inline double theta_h(const MemoryModel& model, int horizon) {
  if (horizon < 0) throw ConfigError("theta_h: horizon must be >= 0");
  if (horizon == 0) return 0.0;
  switch (model.kind()) {
    case MemoryKind::kMemoryless:
      return 0.0;
    case MemoryKind::kFiniteMemory: {
      const double b = model.window();
      const double h = horizon;
      // Tuning constant used by the with-memory step size: (B-1)(H-B+2)/4,
      // i.e. roughly H/2 rounds at the window's mean staleness (B-1)/2.
      // Clamped at zero for horizons shorter than the window so the value
      // stays non-negative and non-decreasing in H (the per-round bound
      // curve inherits monotonicity from this).
      return std::max(0.0, (b - 1.0) * (h - b + 2.0) / 4.0);
    }
    case MemoryKind::kDiscounted:
    case MemoryKind::kCustom:
      return detail::ThetaRunningSum(model, horizon);
  }
  return 0.0;
}

}  // namespace restack

#endif  // RESTACK_MEMORY_HPP_
