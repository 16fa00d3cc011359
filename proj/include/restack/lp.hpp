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

#ifndef RESTACK_LP_HPP_
#define RESTACK_LP_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "restack/game.hpp"

namespace restack {

// -----------------------------------------------------------------------------
// Small dense LP solver for the one problem family this project needs:
//
//   maximize <c, x>   subject to   x in Delta_N,   A x >= b.
//
// Two-phase primal simplex with Bland's anti-cycling rule.  The instances are
// tiny (N <= ~10 variables, tens of rows), so a dense tableau is simpler and
// faster than pulling in a general solver, and a deterministic pivot order
// makes results bit-reproducible across runs.
// -----------------------------------------------------------------------------

enum class LpStatus {
  kOptimal,
  kInfeasible,
  // Pivot breakdown, iteration overrun, or a solution failing the final
  // feasibility audit.  Reported distinctly from infeasibility: it signals a
  // solver limitation, not a property of the constraint set.
  kNumericalFailure,
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalFailure;
  Vec x;               // primal point (meaningful only when optimal)
  double value = 0.0;  // <c, x>
};

namespace detail {

class SimplexTableau {
 public:
  static constexpr double kReducedCostTol = 1e-9;
  static constexpr double kPivotTol = 1e-11;
  static constexpr double kFeasTol = 1e-7;

  // rows: the constraints in equality standard form with rhs >= 0; one
  // artificial variable per row completes the initial basis.
  SimplexTableau(const Mat& rows, const Vec& rhs, int num_structural)
      : m_(static_cast<int>(rows.rows())),
        n_struct_(num_structural),
        n_total_(num_structural + m_),
        tab_(m_, num_structural + m_ + 1),
        basis_(m_),
        active_(m_, true) {
    tab_.setZero();
    tab_.block(0, 0, m_, n_struct_) = rows;
    for (int i = 0; i < m_; ++i) {
      tab_(i, n_struct_ + i) = 1.0;  // artificial
      tab_(i, n_total_) = rhs[i];
      basis_[i] = n_struct_ + i;
    }
  }

  // Minimizes `cost` (sized n_total_) starting from the current basis.
  // Returns false on iteration overrun or pivot breakdown.
  bool Minimize(const std::vector<double>& cost, bool allow_artificials) {
    const int max_iter = 50 * (m_ + n_total_) + 200;
    for (int iter = 0; iter < max_iter; ++iter) {
      // Reduced costs d_j = c_j - c_B^T B^{-1} A_j, priced from the tableau.
      int entering = -1;
      for (int j = 0; j < n_total_; ++j) {
        if (!allow_artificials && j >= n_struct_) break;
        if (InBasis(j)) continue;
        double d = cost[j];
        for (int i = 0; i < m_; ++i) {
          if (active_[i] && cost[basis_[i]] != 0.0) {
            d -= cost[basis_[i]] * tab_(i, j);
          }
        }
        if (d < -kReducedCostTol) {
          entering = j;  // Bland: first improving column
          break;
        }
      }
      if (entering < 0) return true;  // optimal

      // Ratio test; Bland tie-break on the smallest basic variable index.
      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (!active_[i] || tab_(i, entering) <= kPivotTol) continue;
        double ratio = tab_(i, n_total_) / tab_(i, entering);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leaving >= 0 &&
             basis_[i] < basis_[leaving])) {
          best_ratio = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) return false;  // unbounded: impossible over a simplex
      Pivot(leaving, entering);
    }
    return false;  // iteration overrun
  }

  void Pivot(int row, int col) {
    const double p = tab_(row, col);
    tab_.row(row) /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tab_(i, col);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(row);
    }
    basis_[row] = col;
  }

  // After phase one: pivot still-basic artificials onto structural columns
  // (degenerate pivots), or deactivate redundant rows when none exists.
  bool EvictArtificials() {
    for (int i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < n_struct_) continue;
      int col = -1;
      for (int j = 0; j < n_struct_; ++j) {
        if (std::abs(tab_(i, j)) > 1e-8) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        Pivot(i, col);
      } else if (std::abs(tab_(i, n_total_)) <= kFeasTol) {
        active_[i] = false;  // 0 = 0 row: redundant constraint
      } else {
        return false;  // inconsistent row that phase one failed to flag
      }
    }
    return true;
  }

  double PhaseOneObjective() const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] >= n_struct_) v += tab_(i, n_total_);
    }
    return v;
  }

  Vec Extract(int dim) const {
    Vec x = Vec::Zero(dim);
    for (int i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] < dim) x[basis_[i]] = tab_(i, n_total_);
    }
    return x;
  }

  int num_structural() const { return n_struct_; }
  int num_total() const { return n_total_; }

 private:
  bool InBasis(int j) const {
    for (int i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] == j) return true;
    }
    return false;
  }

  int m_;
  int n_struct_;
  int n_total_;
  Mat tab_;  // m_ rows, n_total_ + 1 columns (last column is the rhs)
  std::vector<int> basis_;
  std::vector<bool> active_;
};

}  // namespace detail

// Maximizes <c, x> over { x in Delta_N : A x >= b }.  A may have zero rows.
inline LpResult lp_solve(const Vec& c, const Mat& a, const Vec& b) {
  const int n = static_cast<int>(c.size());
  const int j_rows = static_cast<int>(a.rows());
  if (n < 1 || (j_rows > 0 && a.cols() != n) || b.size() != j_rows) {
    throw ConfigError("lp_solve: inconsistent problem dimensions");
  }

  // Standard form: x >= 0 plus one equality and j_rows surplus rows, each
  // sign-normalized to a nonnegative right-hand side.
  const int m = 1 + j_rows;
  const int n_struct = n + j_rows;
  Mat rows = Mat::Zero(m, n_struct);
  Vec rhs = Vec::Zero(m);
  rows.block(0, 0, 1, n).setOnes();  // sum_i x_i = 1
  rhs[0] = 1.0;
  for (int r = 0; r < j_rows; ++r) {
    double sign = b[r] >= 0.0 ? 1.0 : -1.0;
    rows.block(1 + r, 0, 1, n) = sign * a.row(r);
    rows(1 + r, n + r) = -sign;  // surplus: a x - s = b
    rhs[1 + r] = sign * b[r];
  }

  detail::SimplexTableau tab(rows, rhs, n_struct);

  // Phase one: minimize the artificial mass.
  std::vector<double> phase1(tab.num_total(), 0.0);
  for (int j = n_struct; j < tab.num_total(); ++j) phase1[j] = 1.0;
  LpResult result;
  if (!tab.Minimize(phase1, /*allow_artificials=*/true)) {
    result.status = LpStatus::kNumericalFailure;
    return result;
  }
  if (tab.PhaseOneObjective() > 1e-7) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  if (!tab.EvictArtificials()) {
    result.status = LpStatus::kNumericalFailure;
    return result;
  }

  // Phase two: minimize -<c, x> without the artificial columns.
  std::vector<double> phase2(tab.num_total(), 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = -c[j];
  if (!tab.Minimize(phase2, /*allow_artificials=*/false)) {
    result.status = LpStatus::kNumericalFailure;
    return result;
  }

  Vec x = tab.Extract(n);

  // Final audit: the tableau can silently drift on ill-conditioned input, so
  // check the reported point actually satisfies every constraint.
  constexpr double tol = detail::SimplexTableau::kFeasTol;
  bool feasible = std::abs(x.sum() - 1.0) <= tol && (x.array() >= -tol).all();
  for (int r = 0; feasible && r < j_rows; ++r) {
    feasible = a.row(r).dot(x) >= b[r] - tol;
  }
  if (!feasible) {
    result.status = LpStatus::kNumericalFailure;
    return result;
  }

  result.status = LpStatus::kOptimal;
  result.x = std::move(x);
  result.value = c.dot(result.x);
  return result;
}

}  // namespace restack

#endif  // RESTACK_LP_HPP_
