#pragma once

// Elemental Shannon inequalities, the problem-specific equalities of a (4,3,3)
// exact-repair code, and their rewriting over the reduced symbolic variables
// (B, alpha, beta, FREE classes).

#include "regen/entropy_model.hpp"
#include "regen/rational.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace regen {

/// H(A|C) or I(A;B|C) over subsets of the problem variables.
struct InfoMeasure {
  enum class Kind : std::uint8_t { Entropy, Mutual };

  Kind kind = Kind::Entropy;
  RVSubset a;
  RVSubset b;  // unused for Entropy
  RVSubset given;

  static InfoMeasure entropy(RVSubset a, RVSubset given = {});
  static InfoMeasure mutual(RVSubset a, RVSubset b, RVSubset given = {});

  /// Elemental in the sense of the minimal Shannon basis: H(X_i | all others)
  /// or I(X_i;X_j|X_K) with i, j, K pairwise disjoint.
  bool elemental() const;
  InfoMeasure permuted(const NodePermutation& p) const;

  /// "H(W1|S12,S13)", "I(S12;W3)", "I(W1;W2,S34|S14,S21,W4)".
  std::string to_string() const;
  /// Inverse of to_string; also accepts braces and the H(A) / I(A;B) forms.
  static InfoMeasure parse(std::string_view text);

  friend bool operator==(const InfoMeasure&, const InfoMeasure&) = default;
};

struct RawTerm {
  RVSubset set;
  int coeff = 0;
};

/// Signed sum of joint entropies; empty-set terms are omitted.
std::vector<RawTerm> expand(const InfoMeasure& m);

enum class Sense : std::uint8_t { GreaterEqualZero, EqualZero };

struct ProblemTag {
  enum class Kind : std::uint8_t { Reconstruction, RepairEncoding, RepairDecoding, TotalInformation };
  Kind kind;
  int index;  // 0-based within its family
  std::string to_string() const;
};

/// Row over joint entropies, before reduction: sum(coeff * H(set)) + b_coeff * B  (sense) 0.
struct RawRow {
  std::vector<RawTerm> terms;
  int b_coeff = 0;
  Sense sense = Sense::GreaterEqualZero;
  std::variant<InfoMeasure, ProblemTag> origin;
};

/// Number of elemental inequalities on n variables: n + C(n,2) 2^(n-2).
std::uint64_t elemental_count(int n);

/// Streams the elemental inequalities on n variables (2 <= n <= 16), using
/// positions 0..n-1 of the subset encoding. Order: the n conditional
/// entropies, then pairs (i<j) with conditioning masks in increasing order.
void for_each_elemental(int n, const std::function<void(const InfoMeasure&)>& visit);

/// Materialized form of for_each_elemental. Throws std::domain_error if n < 2.
std::vector<RawRow> gen_elemental(int n);

/// The 21 equalities: 4 reconstruction, 12 repair encoding, 4 repair
/// decoding, 1 total information, in that order.
std::vector<RawRow> gen_problem_equalities();

/// Sparse exact linear expression over symbolic variables plus a constant.
class LinearForm {
 public:
  using Term = std::pair<SymbolId, Rational>;

  LinearForm() = default;

  void add(SymbolId sym, const Rational& coeff);
  void add_constant(const Rational& value) { constant_ += value; }

  std::span<const Term> terms() const { return terms_; }
  Rational coeff(SymbolId sym) const;
  const Rational& constant() const { return constant_; }
  bool is_zero() const { return terms_.empty() && constant_ == 0; }

  /// sum coeff * values[sym] + constant.
  Rational evaluate(std::span<const Rational> values) const;

  LinearForm& operator+=(const LinearForm& other);
  LinearForm& operator-=(const LinearForm& other);
  LinearForm& operator*=(const Rational& scale);
  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(const Rational& s, LinearForm a) { return a *= s; }
  friend LinearForm operator-(LinearForm a) { return a *= Rational(-1); }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;

  /// "4 alpha + 6 beta - 3 B"; uses symbol labels from the table.
  std::string to_string(const ClassTable& table) const;

 private:
  std::vector<Term> terms_;  // sorted by symbol, no zero coefficients
  Rational constant_;
};

LinearForm reduce_linear_form(std::span<const RawTerm> terms, int b_coeff, const ClassTable& table);
LinearForm reduce_linear_form(const RawRow& row, const ClassTable& table);
LinearForm reduce_linear_form(const InfoMeasure& m, const ClassTable& table);

/// reduced(measure) == scale * row.form.
struct RowOrigin {
  InfoMeasure measure;
  int scale = 1;
};

struct ConstraintRow {
  LinearForm form;
  Sense sense = Sense::GreaterEqualZero;
  std::vector<RowOrigin> provenance;  // first entry is the first generated origin
};

struct ReductionStats {
  std::uint64_t elemental_rows = 0;
  std::uint64_t zero_rows = 0;        // reduced to 0 >= 0
  std::uint64_t duplicate_rows = 0;   // merged into an earlier row
  std::uint64_t problem_equalities = 0;
  std::uint64_t equalities_absorbed = 0;
  std::uint64_t storage_bandwidth_rows = 0;  // H(W_i) <= alpha, H(S_ij) <= beta
  std::uint64_t storage_bandwidth_absorbed = 0;
};

/// Deduplicated inequality system over (B, alpha, beta, FREE classes).
struct ReducedSystem {
  std::shared_ptr<const ClassTable> table;
  std::vector<ConstraintRow> rows;
  ReductionStats stats;

  std::size_t symbol_count() const { return table->symbol_count(); }
  std::size_t inequality_count() const;
  std::size_t equality_count() const { return rows.size() - inequality_count(); }
  /// Variables of the min-beta LP once B and alpha are fixed: beta plus the FREE classes.
  std::size_t primal_variable_count() const { return table->free_count() + 1; }

  /// {variables:[...], rows:[{coeffs, sense, provenance, merged}]}
  nlohmann::json to_json() const;
  /// CPLEX LP text. With alpha0 set, B and alpha are fixed by bounds and the
  /// objective is beta (the min-beta LP); otherwise all symbols are free.
  std::string to_lp_format(const std::optional<Rational>& alpha0 = std::nullopt) const;
};

ReducedSystem build_reduced_system(std::shared_ptr<const ClassTable> table);

}  // namespace regen
