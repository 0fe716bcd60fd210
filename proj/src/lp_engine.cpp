#include "regen/lp_engine.hpp"

#include <stdexcept>

namespace regen {

namespace {

using Index = Eigen::Index;
using Triplet = Eigen::Triplet<Rational>;

// Orientation factor turning row i into g_i x <= h_i (or = h_i).
Rational orientation(RowSense s) { return s == RowSense::GreaterEqual ? Rational(-1) : Rational(1); }

// Standard form of the dual. Columns: one per inequality row (lambda_i >= 0),
// two per equality row (lambda+ and lambda-), one slack -e_j per nonnegative
// variable. Rows: one per primal variable.
struct DualForm {
  StandardForm<Rational> lp;
  std::vector<Index> row_of_column;  // -1 for slacks
  std::vector<int> sign_of_column;
};

DualForm dual_form(const LPInstance& p, bool zero_rhs) {
  DualForm d;
  std::vector<Triplet> entries;
  std::vector<Rational> cost;
  Index col = 0;
  auto add_row_column = [&](Index i, int sign) {
    const Rational f = orientation(p.senses[static_cast<std::size_t>(i)]) * sign;
    for (RationalSparse::InnerIterator it(p.A, i); it; ++it) entries.emplace_back(it.col(), col, f * it.value());
    cost.push_back(f * p.b(i));
    d.row_of_column.push_back(i);
    d.sign_of_column.push_back(sign);
    ++col;
  };
  for (Index i = 0; i < p.rows(); ++i) {
    add_row_column(i, 1);
    if (p.senses[static_cast<std::size_t>(i)] == RowSense::Equal) add_row_column(i, -1);
  }
  for (Index j = 0; j < p.cols(); ++j) {
    if (p.bound(j) != VarBound::NonNegative) continue;
    entries.emplace_back(j, col, Rational(-1));
    cost.push_back(Rational(0));
    d.row_of_column.push_back(-1);
    d.sign_of_column.push_back(0);
    ++col;
  }
  d.lp.A.resize(p.cols(), col);
  d.lp.A.setFromTriplets(entries.begin(), entries.end());
  d.lp.A.makeCompressed();
  d.lp.b = zero_rhs ? RationalVector(RationalVector::Zero(p.cols())) : RationalVector(-p.c);
  d.lp.c.resize(col);
  for (Index k = 0; k < col; ++k) d.lp.c(k) = cost[static_cast<std::size_t>(k)];
  return d;
}

LPSolution solve_via_dual(const LPInstance& p, const SimplexOptions& options) {
  LPSolution out;
  const DualForm d = dual_form(p, false);
  const auto s = solve_standard(d.lp, options);
  out.iterations = s.iterations;
  if (s.status == LPStatus::Unbounded) {
    out.status = LPStatus::Infeasible;
    return out;
  }
  if (s.status == LPStatus::Infeasible) {
    // Dual infeasible: primal is unbounded iff it is feasible. The
    // homogeneous dual is feasible at 0 and unbounded iff the primal is infeasible.
    const DualForm h = dual_form(p, true);
    const auto hs = solve_standard(h.lp, options);
    out.iterations += hs.iterations;
    out.status = hs.status == LPStatus::Unbounded ? LPStatus::Infeasible : LPStatus::Unbounded;
    return out;
  }
  out.status = LPStatus::Optimal;
  out.primal = s.y;
  out.duals = RationalVector::Zero(p.rows());
  for (Index k = 0; k < d.lp.A.cols(); ++k) {
    const Index i = d.row_of_column[static_cast<std::size_t>(k)];
    if (i < 0 || s.x(k) == 0) continue;
    out.duals(i) += d.sign_of_column[static_cast<std::size_t>(k)] * s.x(k);
  }
  out.objective = -s.objective;
  return out;
}

LPSolution solve_via_primal(const LPInstance& p, const SimplexOptions& options) {
  // Columns: x+ (and x- for free variables), then one slack per inequality row.
  std::vector<Triplet> entries;
  std::vector<Rational> cost;
  std::vector<std::pair<Index, int>> var_of_column;
  const RationalSparse At = p.A.transpose();  // row-major transpose gives column access per variable
  Index col = 0;
  for (Index j = 0; j < p.cols(); ++j) {
    const int copies = p.bound(j) == VarBound::Free ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
      const int sign = c == 0 ? 1 : -1;
      for (RationalSparse::InnerIterator it(At, j); it; ++it) {
        const Index i = it.col();
        entries.emplace_back(i, col, orientation(p.senses[static_cast<std::size_t>(i)]) * sign * it.value());
      }
      cost.push_back(sign * p.c(j));
      var_of_column.emplace_back(j, sign);
      ++col;
    }
  }
  for (Index i = 0; i < p.rows(); ++i) {
    if (p.senses[static_cast<std::size_t>(i)] == RowSense::Equal) continue;
    entries.emplace_back(i, col, Rational(1));
    cost.push_back(Rational(0));
    var_of_column.emplace_back(-1, 0);
    ++col;
  }
  StandardForm<Rational> sf;
  sf.A.resize(p.rows(), col);
  sf.A.setFromTriplets(entries.begin(), entries.end());
  sf.A.makeCompressed();
  sf.b.resize(p.rows());
  for (Index i = 0; i < p.rows(); ++i) sf.b(i) = orientation(p.senses[static_cast<std::size_t>(i)]) * p.b(i);
  sf.c.resize(col);
  for (Index k = 0; k < col; ++k) sf.c(k) = cost[static_cast<std::size_t>(k)];

  const auto s = solve_standard(sf, options);
  LPSolution out;
  out.iterations = s.iterations;
  out.status = s.status;
  if (s.status != LPStatus::Optimal) return out;
  out.primal = RationalVector::Zero(p.cols());
  for (Index k = 0; k < col; ++k) {
    const auto [j, sign] = var_of_column[static_cast<std::size_t>(k)];
    if (j >= 0 && s.x(k) != 0) out.primal(j) += sign * s.x(k);
  }
  out.duals = -s.y;
  out.objective = s.objective;
  return out;
}

}  // namespace

void LPInstance::validate() const {
  if (b.size() != A.rows()) throw std::domain_error("LP: b has wrong length");
  if (c.size() != A.cols()) throw std::domain_error("LP: c has wrong length");
  if (senses.size() != static_cast<std::size_t>(A.rows())) throw std::domain_error("LP: one sense per row required");
  if (!bounds.empty() && bounds.size() != static_cast<std::size_t>(A.cols())) {
    throw std::domain_error("LP: bounds must be empty or one per variable");
  }
}

LPBuilder::LPBuilder(Index variables) : cost(static_cast<std::size_t>(variables)), bounds(static_cast<std::size_t>(variables), VarBound::Free) {}

Index LPBuilder::add_row(const std::vector<std::pair<Index, Rational>>& coeffs, RowSense sense,
                         const Rational& rhs_value) {
  const auto row = static_cast<Index>(rhs.size());
  for (const auto& [j, v] : coeffs) {
    if (j < 0 || j >= static_cast<Index>(cost.size())) throw std::domain_error("LP: variable index out of range");
    if (v != 0) entries.emplace_back(row, j, v);
  }
  rhs.push_back(rhs_value);
  senses.push_back(sense);
  return row;
}

LPInstance LPBuilder::build() const {
  LPInstance lp;
  lp.A.resize(static_cast<Index>(rhs.size()), static_cast<Index>(cost.size()));
  lp.A.setFromTriplets(entries.begin(), entries.end());
  lp.A.makeCompressed();
  lp.b.resize(static_cast<Index>(rhs.size()));
  for (std::size_t i = 0; i < rhs.size(); ++i) lp.b(static_cast<Index>(i)) = rhs[i];
  lp.c.resize(static_cast<Index>(cost.size()));
  for (std::size_t j = 0; j < cost.size(); ++j) lp.c(static_cast<Index>(j)) = cost[j];
  lp.senses = senses;
  lp.bounds = bounds;
  return lp;
}

LPSolution solve(const LPInstance& lp, SolveRoute route, const SimplexOptions& options) {
  lp.validate();
  if (route == SolveRoute::Auto) {
    // Basis size is rows for the primal route and columns for the dual route.
    route = lp.cols() < lp.rows() ? SolveRoute::Dual : SolveRoute::Primal;
  }
  return route == SolveRoute::Dual ? solve_via_dual(lp, options) : solve_via_primal(lp, options);
}

std::vector<std::string> check_optimality(const LPInstance& lp, const LPSolution& sol) {
  std::vector<std::string> issues;
  if (sol.status != LPStatus::Optimal) {
    issues.push_back(std::string("status is ") + status_name(sol.status));
    return issues;
  }
  const Index m = lp.rows();
  const Index n = lp.cols();
  const RationalVector ax = lp.A * sol.primal;
  RationalVector stationarity = lp.c;
  Rational dual_objective(0);
  for (Index i = 0; i < m; ++i) {
    const RowSense s = lp.senses[static_cast<std::size_t>(i)];
    const Rational f = orientation(s);
    const Rational slack = f * (lp.b(i) - ax(i));  // h_i - g_i x
    if (s == RowSense::Equal ? slack != 0 : slack < 0) {
      issues.push_back("row " + std::to_string(i) + " violated by " + to_string(slack));
    }
    const Rational& lam = sol.duals(i);
    if (s != RowSense::Equal && lam < 0) issues.push_back("row " + std::to_string(i) + " has negative multiplier");
    if (lam != 0 && slack != 0) issues.push_back("row " + std::to_string(i) + " breaks complementary slackness");
    for (RationalSparse::InnerIterator it(lp.A, i); it; ++it) stationarity(it.col()) += lam * f * it.value();
    dual_objective -= lam * f * lp.b(i);
  }
  for (Index j = 0; j < n; ++j) {
    const Rational& mu = stationarity(j);
    if (lp.bound(j) == VarBound::Free && mu != 0) {
      issues.push_back("stationarity fails at variable " + std::to_string(j));
    } else if (lp.bound(j) == VarBound::NonNegative) {
      if (mu < 0) issues.push_back("negative reduced cost at variable " + std::to_string(j));
      if (sol.primal(j) < 0) issues.push_back("variable " + std::to_string(j) + " below its bound");
      if (mu != 0 && sol.primal(j) != 0) issues.push_back("bound slackness fails at variable " + std::to_string(j));
    }
  }
  const Rational primal_objective = lp.c.dot(sol.primal);
  if (primal_objective != sol.objective) issues.push_back("reported objective differs from c^T x");
  if (dual_objective != sol.objective) issues.push_back("duality gap " + to_string(sol.objective - dual_objective));
  return issues;
}

}  // namespace regen
