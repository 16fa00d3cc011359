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
// Reference implementations used to cross-check the library.  Everything
// here is written from the defining formulas, independently of the library
// code paths it validates: plain softmax, argmax responses, brute-force grid
// maximization, and the raw double-sum staleness aggregate.

#ifndef RESTACK_TESTS_HELPERS_HPP_
#define RESTACK_TESTS_HELPERS_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace testutil {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// softmax(eta * V^T x), the logit response, computed directly.
inline Vec RefSoftmax(const Mat& v, double eta, const Vec& x) {
  Vec s = eta * (v.transpose() * x);
  const double top = s.maxCoeff();
  Vec y(s.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    y[i] = std::exp(s[i] - top);
    total += y[i];
  }
  return y / total;
}

// Exact best response with lowest-index tie-breaking.
inline int RefArgmax(const Mat& v, const Vec& x) {
  int best = 0;
  double best_score = v.col(0).dot(x);
  for (int i = 1; i < v.cols(); ++i) {
    const double score = v.col(i).dot(x);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

// One round's leader payoff when the follower of matrix vk perceives z and
// the leader actually plays x.
inline double RefRoundPayoff(const Mat& u, const Mat& vk, double eta,
                             bool quantal, const Vec& x, const Vec& z) {
  if (quantal) return x.dot(u * RefSoftmax(vk, eta, z));
  return x.dot(u.col(RefArgmax(vk, z)));
}

// The commitment objective sum_k w_k x^T U y^k(x) + <tilt, x>.
inline double RefObjective(const Mat& u, const std::vector<Mat>& v, double eta,
                           bool quantal, const Vec& x, const Vec& w,
                           const Vec& tilt) {
  double value = tilt.size() != 0 ? tilt.dot(x) : 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (w[static_cast<int>(k)] == 0.0) continue;
    value += w[static_cast<int>(k)] *
             RefRoundPayoff(u, v[k], eta, quantal, x, x);
  }
  return value;
}

namespace internal {

template <typename F>
void GridRec(int n, int r, int index, int left, std::vector<int>& c, F&& fn) {
  if (index == n - 1) {
    c[index] = left;
    Vec p(n);
    for (int i = 0; i < n; ++i) p[i] = static_cast<double>(c[i]) / r;
    fn(p);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    c[index] = v;
    GridRec(n, r, index + 1, left - v, c, fn);
  }
}

}  // namespace internal

// Visits every point of { c / r : c in Z^n_{>=0}, sum c = r }.
template <typename F>
void ForEachGridPoint(int n, int r, F&& fn) {
  std::vector<int> c(n, 0);
  internal::GridRec(n, r, 0, r, c, fn);
}

struct GridBest {
  Vec x;
  double value = -1e300;
};

// Brute-force maximization of RefObjective over the resolution-r grid.
inline GridBest GridSearch(const Mat& u, const std::vector<Mat>& v, double eta,
                           bool quantal, const Vec& w, const Vec& tilt, int r) {
  GridBest best;
  ForEachGridPoint(static_cast<int>(u.rows()), r, [&](const Vec& p) {
    const double value = RefObjective(u, v, eta, quantal, p, w, tilt);
    if (value > best.value) {
      best.value = value;
      best.x = p;
    }
  });
  return best;
}

// The staleness aggregate evaluated exactly as its defining double sum:
//   sum_{t=1}^{H} [ sum_{tau=1}^{t} a(t-tau) (t-tau) ] / [ sum_{tau=1}^{t} a(t-tau) ].
inline double DoubleSumTheta(const std::function<double(int)>& a, int horizon) {
  double theta = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    double mass = 0.0, age = 0.0;
    for (int tau = 1; tau <= t; ++tau) {
      const double w = a(t - tau);
      mass += w;
      age += w * (t - tau);
    }
    theta += age / mass;
  }
  return theta;
}

}  // namespace testutil

#endif  // RESTACK_TESTS_HELPERS_HPP_
