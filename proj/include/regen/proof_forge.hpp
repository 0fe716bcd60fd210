#pragma once

// Dual certificates for bounds  gamma_alpha alpha + gamma_beta beta >= gamma_B B:
// the l1 certificate-search LP, exact verification, and a family-weighted
// rendering of the resulting converse proof.

#include "regen/constraint_factory.hpp"
#include "regen/lp_engine.hpp"
#include "regen/region_sweep.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace regen {

/// [-gamma_B, gamma_alpha, gamma_beta, 0, ...] over the symbols of `table`.
RationalVector secondary_cost_vector(const FacetCandidate& facet, const ClassTable& table);

/// minimize sum(lambda)  s.t.  sum_r lambda_r f_r = c  (one equality per
/// symbol), lambda >= 0, where f_r >= 0 are the reduced rows. Variable r is
/// the multiplier of sys.rows[r].
LPInstance build_secondary_lp(const FacetCandidate& facet, const ReducedSystem& sys);

/// The min-c LP over all symbols with B pinned by the two rows B <= 1 and
/// B >= 1, which are its last two rows.
LPInstance build_expanded_primal(const FacetCandidate& facet, const ReducedSystem& sys);

struct BRowBalance {
  LPStatus status = LPStatus::Infeasible;
  Rational objective;
  Rational lambda_upper;  // multiplier of B <= 1
  Rational lambda_lower;  // multiplier of B >= 1
};

BRowBalance b_row_balance(const FacetCandidate& facet, const ReducedSystem& sys);

class NotProvable : public std::runtime_error {
 public:
  NotProvable() : std::runtime_error("facet not provable from Shannon-type + problem constraints") {}
};

struct CertificateRow {
  std::optional<std::size_t> row;  // reduced-row id when extracted from a system
  InfoMeasure measure;
  Rational multiplier;
};

/// sum multiplier * measure >= 0 recombines to the facet.
struct DualCertificate {
  FacetCandidate facet;
  std::vector<CertificateRow> rows;

  /// {facet:"a,b,c", rows:[{provenance, multiplier[, row]}]}
  nlohmann::json to_json() const;
  static DualCertificate from_json(const nlohmann::json& doc);
};

/// Throws NotProvable when the secondary LP is infeasible.
DualCertificate extract_certificate(const FacetCandidate& facet, const ReducedSystem& sys,
                                    const SimplexOptions& options = {});

struct CoordinateMismatch {
  SymbolId symbol;
  std::string label;
  Rational expected;
  Rational actual;
};

struct VerificationReport {
  bool passed = false;
  std::vector<std::size_t> negative_rows;
  std::vector<CoordinateMismatch> mismatches;
  Rational constant_residual;
  LinearForm recombined;

  /// Human readable, one finding per line.
  std::string to_string() const;
};

/// Exact check that multipliers are >= 0 and sum multiplier * reduce(measure)
/// equals gamma_alpha alpha + gamma_beta beta - gamma_B B coordinate-wise.
VerificationReport verify_certificate(const DualCertificate& cert, const ClassTable& table);

struct ProofStep {
  Rational weight;
  std::string statement;  // with node placeholders, e.g. "I(S_{i,j};W_k) >= 0"
  std::string origin;     // first concrete member, e.g. "I(S12;W3)"
  std::size_t members = 0;
};

struct ProofDocument {
  FacetCandidate facet;
  std::vector<ProofStep> steps;
  std::string footer;

  std::string to_markdown() const;
};

/// Groups rows into permutation-orbit families, heaviest first.
/// Throws std::domain_error if the certificate does not verify.
ProofDocument render_proof(const DualCertificate& cert, const ClassTable& table);

/// Orbit representative of a measure under the 24 node permutations.
InfoMeasure canonical_measure(const InfoMeasure& m);

/// Measure text with nodes relabelled i, j, k, t by first appearance.
std::string placeholder_form(const InfoMeasure& m);

/// "4α + 6β ≥ 3B" for a recombined form; "0 ≥ 0" when it vanishes.
std::string render_bound(const LinearForm& form, const ClassTable& table);

}  // namespace regen
