#pragma once

// Two-phase revised simplex for  minimize c^T x  s.t.  A x = b, x >= 0.
//
// The basis inverse is kept dense (row-major) and updated by elementary row
// operations, which is exact when Scalar is Rational. Entering variables are
// priced by Dantzig's rule; after a run of degenerate pivots the solver falls
// back to Bland's smallest-index rule until the objective moves again, so no
// basis can repeat and the method terminates.
//
// For exact scalars an optional double-precision pass supplies a starting
// basis; it is refactored exactly and only accepted if primal feasible.

#include "regen/rational.hpp"

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace regen {

enum class LPStatus { Optimal, Infeasible, Unbounded };

inline const char* status_name(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "OPTIMAL";
    case LPStatus::Infeasible: return "INFEASIBLE";
    case LPStatus::Unbounded: return "UNBOUNDED";
  }
  return "?";
}

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct StandardForm {
  Eigen::SparseMatrix<Scalar, Eigen::ColMajor> A;
  DenseVector<Scalar> b;
  DenseVector<Scalar> c;
};

template <typename Scalar>
struct StandardSolution {
  LPStatus status = LPStatus::Infeasible;
  Scalar objective{0};
  DenseVector<Scalar> x;  // primal, size n
  DenseVector<Scalar> y;  // simplex multipliers, size m: c - A^T y >= 0 at optimum
  std::vector<Eigen::Index> basis;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 32;
  /// 0 = unlimited.
  std::size_t max_iterations = 0;
  /// Exact scalars only: solve in double first and restart the exact phase
  /// from that basis when it is exactly feasible. Results are still exact.
  bool float_warm_start = true;
};

namespace detail {

template <typename Scalar>
Scalar tolerance() {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return Scalar(1e-9);
  } else {
    return Scalar(0);
  }
}

template <typename Scalar>
class RevisedSimplex {
 public:
  using Index = Eigen::Index;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  RevisedSimplex(const StandardForm<Scalar>& lp, const SimplexOptions& options)
      : lp_(lp), options_(options), m_(lp.A.rows()), n_(lp.A.cols()), tol_(tolerance<Scalar>()) {
    if (lp.b.size() != m_ || lp.c.size() != n_) {
      throw std::domain_error("standard form dimensions are inconsistent");
    }
  }

  StandardSolution<Scalar> run() {
    StandardSolution<Scalar> out;
    init_signs();
    bool warm = false;
    if constexpr (!std::is_floating_point_v<Scalar>) {
      if (options_.float_warm_start && m_ > 0) warm = try_warm_start(out.iterations);
    }
    if (!warm) slack_basis();
    allow_artificial_ = false;

    // Phase 1: minimize the sum of artificials.
    if (infeasibility() > tol_) {
      cost_.assign(static_cast<std::size_t>(n_ + m_), Scalar(0));
      for (Index i = 0; i < m_; ++i) cost_[static_cast<std::size_t>(n_ + i)] = Scalar(1);
      iterate(out.iterations);  // bounded below by 0
      if (infeasibility() > tol_) {
        out.status = LPStatus::Infeasible;
        return finish(std::move(out));
      }
    }
    drive_out_artificials();

    // Phase 2.
    set_phase2_costs();
    out.status = iterate(out.iterations);
    return finish(std::move(out));
  }

 private:
  StandardSolution<Scalar> finish(StandardSolution<Scalar> out) const {
    out.x = DenseVector<Scalar>::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) out.x(j) = xb_(i);
    }
    out.objective = Scalar(0);
    for (Index j = 0; j < n_; ++j) {
      if (out.x(j) != Scalar(0)) out.objective += lp_.c(j) * out.x(j);
    }
    out.y = y_;
    out.basis = basis_;
    return out;
  }

  // Phase-2 costs on structural columns, zero on artificials.
  void set_phase2_costs() {
    cost_.assign(static_cast<std::size_t>(n_ + m_), Scalar(0));
    for (Index j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = lp_.c(j);
  }

  void init_signs() {
    sign_.assign(static_cast<std::size_t>(m_), Scalar(1));
    for (Index i = 0; i < m_; ++i) {
      if (lp_.b(i) < 0) sign_[static_cast<std::size_t>(i)] = Scalar(-1);
    }
  }

  // Artificial basis: row i flipped so that its artificial starts at |b_i|.
  void slack_basis() {
    xb_ = lp_.b;
    binv_ = Matrix::Zero(m_, m_);
    basis_.resize(static_cast<std::size_t>(m_));
    in_basis_.assign(static_cast<std::size_t>(n_ + m_), false);
    for (Index i = 0; i < m_; ++i) {
      const Scalar& s = sign_[static_cast<std::size_t>(i)];
      xb_(i) *= s;
      binv_(i, i) = s;
      basis_[static_cast<std::size_t>(i)] = n_ + i;
      in_basis_[static_cast<std::size_t>(n_ + i)] = true;
    }
  }

  Scalar infeasibility() const {
    Scalar sum(0);
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= n_) sum += xb_(i);
    }
    return sum;
  }

  // Solves the problem in double and installs its final basis exactly; phase
  // 1 and 2 then resume from it. Returns false when the basis is singular or
  // not exactly nonnegative, leaving the caller to start cold.
  bool try_warm_start(std::size_t& iterations) {
    StandardForm<double> approx;
    approx.A = lp_.A.template cast<double>();
    approx.b = lp_.b.template cast<double>();
    approx.c = lp_.c.template cast<double>();
    SimplexOptions inner = options_;
    inner.bland_after = std::max<std::size_t>(options_.bland_after, 4096);
    inner.max_iterations = static_cast<std::size_t>(20 * (m_ + n_));
    // Perturbing b breaks the heavy primal degeneracy of certificate LPs.
    const DenseVector<double> exact_b = approx.b;
    for (Index i = 0; i < m_; ++i) {
      const double delta = 1e-7 * (1.0 + static_cast<double>((i * 7919) % 1009) / 1009.0);
      approx.b(i) += exact_b(i) < 0 ? -delta : delta;
    }
    std::vector<Index> start;
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (attempt == 1) approx.b = exact_b;
      try {
        StandardSolution<double> guess = RevisedSimplex<double>(approx, inner).run();
        iterations += guess.iterations;
        start = std::move(guess.basis);
        if (guess.status == LPStatus::Optimal) break;
      } catch (const std::exception&) {
      }
    }
    if (start.size() != static_cast<std::size_t>(m_)) return false;

    basis_ = std::move(start);
    if (!factor_basis()) return false;
    for (Index i = 0; i < m_; ++i) {
      if (xb_(i) < 0) return false;
    }
    in_basis_.assign(static_cast<std::size_t>(n_ + m_), false);
    for (Index j : basis_) in_basis_[static_cast<std::size_t>(j)] = true;
    return true;
  }

  // Exact B^{-1} and x_B for basis_ by Gauss-Jordan elimination on [B | I].
  bool factor_basis() {
    Matrix work = Matrix::Zero(m_, m_);
    for (Index k = 0; k < m_; ++k) {
      const Index j = basis_[static_cast<std::size_t>(k)];
      if (j >= n_) {
        work(j - n_, k) = sign_[static_cast<std::size_t>(j - n_)];
      } else {
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(lp_.A, j); it; ++it) work(it.row(), k) = it.value();
      }
    }
    Matrix inv = Matrix::Identity(m_, m_);
    // Row r of the reduced system ends up pivoting on column pivot_col[r].
    std::vector<Index> row_for_col(static_cast<std::size_t>(m_), -1);
    std::vector<bool> used(static_cast<std::size_t>(m_), false);
    for (Index k = 0; k < m_; ++k) {
      Index pr = -1;
      std::size_t best_fill = 0;
      for (Index i = 0; i < m_; ++i) {
        if (used[static_cast<std::size_t>(i)] || work(i, k) == Scalar(0)) continue;
        std::size_t fill = 0;
        for (Index c = k; c < m_; ++c) fill += work(i, c) != Scalar(0);
        if (pr < 0 || fill < best_fill) {
          pr = i;
          best_fill = fill;
        }
      }
      if (pr < 0) return false;
      used[static_cast<std::size_t>(pr)] = true;
      row_for_col[static_cast<std::size_t>(k)] = pr;
      const Scalar p = work(pr, k);
      for (Index c = 0; c < m_; ++c) {
        if (work(pr, c) != Scalar(0)) work(pr, c) /= p;
        if (inv(pr, c) != Scalar(0)) inv(pr, c) /= p;
      }
      std::vector<Index> wsup, isup;
      for (Index c = 0; c < m_; ++c) {
        if (work(pr, c) != Scalar(0)) wsup.push_back(c);
        if (inv(pr, c) != Scalar(0)) isup.push_back(c);
      }
      for (Index i = 0; i < m_; ++i) {
        if (i == pr || work(i, k) == Scalar(0)) continue;
        const Scalar f = work(i, k);
        for (Index c : wsup) work(i, c) -= f * work(pr, c);
        for (Index c : isup) inv(i, c) -= f * inv(pr, c);
      }
    }
    // Column k of B is now e_{row_for_col[k]}: B^{-1} row k = inv row row_for_col[k].
    binv_.resize(m_, m_);
    for (Index k = 0; k < m_; ++k) binv_.row(k) = inv.row(row_for_col[static_cast<std::size_t>(k)]);
    xb_ = DenseVector<Scalar>::Zero(m_);
    for (Index k = 0; k < m_; ++k) {
      for (Index i = 0; i < m_; ++i) {
        if (binv_(k, i) != Scalar(0) && lp_.b(i) != Scalar(0)) xb_(k) += binv_(k, i) * lp_.b(i);
      }
    }
    return true;
  }

  // Reduced cost of column j under the current multipliers.
  Scalar reduced_cost(Index j) const {
    Scalar d = cost_[static_cast<std::size_t>(j)];
    if (j >= n_) return d - sign_[static_cast<std::size_t>(j - n_)] * y_(j - n_);
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(lp_.A, j); it; ++it) {
      d -= y_(it.row()) * it.value();
    }
    return d;
  }

  // B^{-1} a_j.
  DenseVector<Scalar> column(Index j) const {
    DenseVector<Scalar> col = DenseVector<Scalar>::Zero(m_);
    if (j >= n_) {
      // Artificial i is sign_i e_i in the original row orientation.
      const Scalar& s = sign_[static_cast<std::size_t>(j - n_)];
      for (Index k = 0; k < m_; ++k) col(k) = s * binv_(k, j - n_);
      return col;
    }
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(lp_.A, j); it; ++it) {
      const Index i = it.row();
      for (Index k = 0; k < m_; ++k) {
        if (binv_(k, i) != Scalar(0)) col(k) += binv_(k, i) * it.value();
      }
    }
    return col;
  }

  void recompute_multipliers() {
    y_ = DenseVector<Scalar>::Zero(m_);
    for (Index k = 0; k < m_; ++k) {
      const Scalar& cb = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])];
      if (cb == Scalar(0)) continue;
      for (Index i = 0; i < m_; ++i) {
        if (binv_(k, i) != Scalar(0)) y_(i) += cb * binv_(k, i);
      }
    }
  }

  void pivot(Index row, Index entering, const DenseVector<Scalar>& col, const Scalar& entering_cost) {
    const Scalar pivot_value = col(row);
    const Scalar step = xb_(row) / pivot_value;
    if (step != Scalar(0)) {
      for (Index i = 0; i < m_; ++i) {
        if (i != row && col(i) != Scalar(0)) xb_(i) -= step * col(i);
      }
    }
    xb_(row) = step;
    for (Index k = 0; k < m_; ++k) {
      if (binv_(row, k) != Scalar(0)) binv_(row, k) /= pivot_value;
    }
    std::vector<Index> support;
    for (Index k = 0; k < m_; ++k) {
      if (binv_(row, k) != Scalar(0)) support.push_back(k);
    }
    for (Index i = 0; i < m_; ++i) {
      if (i == row || col(i) == Scalar(0)) continue;
      const Scalar factor = col(i);
      for (Index k : support) binv_(i, k) -= factor * binv_(row, k);
    }
    if (entering_cost != Scalar(0)) {
      for (Index k : support) y_(k) += entering_cost * binv_(row, k);
    }
    const Index leaving = basis_[static_cast<std::size_t>(row)];
    in_basis_[static_cast<std::size_t>(leaving)] = false;
    in_basis_[static_cast<std::size_t>(entering)] = true;
    basis_[static_cast<std::size_t>(row)] = entering;
  }

  LPStatus iterate(std::size_t& iterations) {
    recompute_multipliers();
    std::size_t degenerate_streak = 0;
    const Index columns = allow_artificial_ ? n_ + m_ : n_;
    for (;;) {
      if (options_.max_iterations != 0 && iterations >= options_.max_iterations) {
        throw std::runtime_error("simplex iteration limit reached");
      }
      const bool bland = degenerate_streak >= options_.bland_after;
      Index entering = -1;
      Scalar best(0);
      for (Index j = 0; j < columns; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        Scalar d = reduced_cost(j);
        if (!(d < -tol_)) continue;
        if (bland) {
          entering = j;
          best = d;
          break;
        }
        if (entering < 0 || d < best) {
          entering = j;
          best = d;
        }
      }
      if (entering < 0) return LPStatus::Optimal;

      const DenseVector<Scalar> col = column(entering);
      Index leave = -1;
      Scalar best_ratio(0);
      for (Index i = 0; i < m_; ++i) {
        if (!(col(i) > tol_)) continue;
        Scalar ratio = xb_(i) / col(i);
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LPStatus::Unbounded;
      degenerate_streak = best_ratio == Scalar(0) ? degenerate_streak + 1 : 0;
      pivot(leave, entering, col, best);
      ++iterations;
    }
  }

  void drive_out_artificials() {
    for (Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_) continue;
      for (Index j = 0; j < n_; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        Scalar entry(0);
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(lp_.A, j); it; ++it) {
          entry += binv_(r, it.row()) * it.value();
        }
        if (entry > tol_ || entry < -tol_) {
          pivot(r, j, column(j), Scalar(0));
          break;
        }
      }
      // Otherwise row r is redundant: its artificial stays basic at zero.
    }
  }

  const StandardForm<Scalar>& lp_;
  SimplexOptions options_;
  Index m_;
  Index n_;
  Scalar tol_;
  std::vector<Scalar> sign_;
  std::vector<Scalar> cost_;
  std::vector<Index> basis_;
  std::vector<bool> in_basis_;
  bool allow_artificial_ = false;
  Matrix binv_;
  DenseVector<Scalar> xb_;
  DenseVector<Scalar> y_;
};

}  // namespace detail

/// Solves a standard-form LP. Exact when Scalar is Rational.
template <typename Scalar>
StandardSolution<Scalar> solve_standard(const StandardForm<Scalar>& lp, const SimplexOptions& options = {}) {
  return detail::RevisedSimplex<Scalar>(lp, options).run();
}

}  // namespace regen
