#pragma once

// Storage/repair-bandwidth tradeoff of the reduced system: min beta for fixed
// alpha (with B = 1), grid sweeps, and exact detection of supporting lines.

#include "regen/constraint_factory.hpp"
#include "regen/lp_engine.hpp"

#include <span>
#include <string>
#include <vector>

namespace regen {

/// The LP  minimize beta  over (beta, FREE classes) with B = 1, alpha = alpha0.
/// Variable 0 is beta; variable k >= 1 is FREE symbol k + 2.
LPInstance build_min_beta_lp(const Rational& alpha0, const ReducedSystem& sys);

struct MinBetaResult {
  LPStatus status = LPStatus::Infeasible;
  Rational beta;  // valid when status is Optimal
  std::size_t iterations = 0;
};

/// Throws std::domain_error if alpha0 < 0.
MinBetaResult min_beta(const Rational& alpha0, const ReducedSystem& sys, const SimplexOptions& options = {});

struct RatePoint {
  Rational alpha_bar;
  Rational beta_bar;
  LPStatus status = LPStatus::Optimal;  // Infeasible entries keep their grid slot
};

/// from, from + step, ..., up to and including `to` when it lies on the grid.
std::vector<Rational> make_grid(const Rational& from, const Rational& to, const Rational& step);

/// One point per grid value, in grid order. threads = 0 uses all cores.
std::vector<RatePoint> sweep_curve(std::span<const Rational> grid, const ReducedSystem& sys, unsigned threads = 0);

/// gamma_alpha * alpha + gamma_beta * beta >= gamma_B * B, as coprime nonnegative integers.
struct FacetCandidate {
  Rational gamma_alpha;
  Rational gamma_beta;
  Rational gamma_B;

  /// Scales to coprime integers. Throws std::domain_error on negative entries.
  FacetCandidate normalized() const;
  bool all_zero() const { return gamma_alpha == 0 && gamma_beta == 0 && gamma_B == 0; }
  /// gamma_alpha a + gamma_beta b - gamma_B.
  Rational slack(const Rational& a, const Rational& b) const { return gamma_alpha * a + gamma_beta * b - gamma_B; }
  /// "4,6,3".
  std::string to_string() const;
  /// Parses "a,b,c" of nonnegative integers.
  static FacetCandidate parse(std::string_view text);

  friend bool operator==(const FacetCandidate&, const FacetCandidate&) = default;
};

/// Supporting lines through maximal runs of collinear consecutive feasible
/// points; duplicates and lines with a negative coefficient are dropped.
/// Throws std::domain_error with fewer than 2 distinct feasible points.
std::vector<FacetCandidate> candidate_facets(std::span<const RatePoint> curve);

/// The exact-repair region facets and the functional-repair outer bound.
std::vector<FacetCandidate> region_facets();
std::vector<FacetCandidate> cut_set_facets();

/// max(1 - 2a, (3 - 4a)/6, 1/6) for a >= 1/3.
Rational region_min_beta(const Rational& alpha_bar);
/// sum_{i=0}^{2} min(a, (3 - i) b).
Rational cut_set_value(const Rational& alpha_bar, const Rational& beta_bar);

/// "alpha,beta,alpha_decimal,beta_decimal,status" rows.
std::string curve_to_csv(std::span<const RatePoint> curve);
nlohmann::json curve_to_json(std::span<const RatePoint> curve, std::span<const FacetCandidate> facets);

}  // namespace regen
