#pragma once

// General exact LP:  minimize c^T x  subject to per-row senses and per-variable
// bounds (free or nonnegative). Solved either directly in standard form or
// through its dual, whichever has the smaller basis.

#include "regen/rational.hpp"
#include "regen/simplex.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace regen {

using RationalVector = DenseVector<Rational>;
using RationalSparse = Eigen::SparseMatrix<Rational, Eigen::RowMajor>;

enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class VarBound { Free, NonNegative };

struct LPInstance {
  RationalSparse A;  // one row per constraint
  RationalVector b;
  RationalVector c;
  std::vector<RowSense> senses;
  std::vector<VarBound> bounds;  // empty means all free

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
  VarBound bound(Eigen::Index j) const {
    return bounds.empty() ? VarBound::Free : bounds[static_cast<std::size_t>(j)];
  }
  /// Throws std::domain_error on inconsistent dimensions.
  void validate() const;
};

/// Builds an LPInstance from triplets; convenience for small problems.
struct LPBuilder {
  std::vector<Eigen::Triplet<Rational>> entries;
  std::vector<Rational> rhs;
  std::vector<RowSense> senses;
  std::vector<Rational> cost;
  std::vector<VarBound> bounds;

  explicit LPBuilder(Eigen::Index variables);
  /// Adds sum(coeffs) (sense) rhs; returns the row index.
  Eigen::Index add_row(const std::vector<std::pair<Eigen::Index, Rational>>& coeffs, RowSense sense,
                       const Rational& rhs_value);
  LPInstance build() const;
};

/// Dual convention: with each inequality oriented as g_i x <= h_i (a ">=" row
/// is negated), multipliers lambda satisfy
///   c + sum_i lambda_i g_i = mu,  mu_j = 0 for free x_j,  mu_j >= 0 for x_j >= 0,
///   lambda_i >= 0 for inequality rows, free for equality rows,
/// and at optimum  c^T x = -sum_i lambda_i h_i.
struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  Rational objective;
  RationalVector primal;
  RationalVector duals;
  std::size_t iterations = 0;
};

enum class SolveRoute { Auto, Primal, Dual };

LPSolution solve(const LPInstance& lp, SolveRoute route = SolveRoute::Auto,
                 const SimplexOptions& options = {});

/// Exact KKT residuals of a claimed optimal solution; empty when it certifies.
std::vector<std::string> check_optimality(const LPInstance& lp, const LPSolution& sol);

}  // namespace regen
