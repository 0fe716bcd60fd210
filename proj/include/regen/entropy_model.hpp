#pragma once

// The 16 random variables of a (4,3,3) regenerating code, the action of node
// permutations on them, the set-growth closure, and the equivalence classes
// (permutation orbit of the closure) that index the reduced entropy LP.
//
// Position ordering, used by every encoding in this project:
//   0..3   W1 W2 W3 W4
//   4..15  S12 S13 S14 S21 S23 S24 S31 S32 S34 S41 S42 S43
// A subset is encoded as the 16-bit integer with bit p set iff position p is a
// member. Node ids are 1-based throughout the public API.

#include "json.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regen {

inline constexpr int kNodes = 4;
inline constexpr int kVariables = 16;
inline constexpr std::uint32_t kSubsetCount = 1u << kVariables;

/// W_i (node content) or S_{i,j} (repair message from node i to node j).
class RandomVar {
 public:
  enum class Kind : std::uint8_t { Node, Repair };

  static RandomVar W(int node);
  static RandomVar S(int from, int to);
  static RandomVar at(int position);

  Kind kind() const { return kind_; }
  int from() const { return from_; }
  /// Target node of a repair message; 0 for node contents.
  int to() const { return to_; }
  int position() const;
  std::string name() const;

  friend bool operator==(const RandomVar&, const RandomVar&) = default;

 private:
  RandomVar(Kind kind, int from, int to) : kind_(kind), from_(from), to_(to) {}
  Kind kind_;
  int from_;
  int to_;
};

class RVSubset {
 public:
  constexpr RVSubset() = default;
  constexpr explicit RVSubset(std::uint16_t bits) : bits_(bits) {}
  RVSubset(std::initializer_list<RandomVar> vars);

  static constexpr RVSubset all() { return RVSubset(0xFFFF); }
  static constexpr RVSubset nodes() { return RVSubset(0x000F); }

  constexpr std::uint16_t encoding() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const;
  bool contains(const RandomVar& v) const { return (bits_ >> v.position()) & 1u; }
  constexpr bool subset_of(RVSubset other) const { return (bits_ & ~other.bits_) == 0; }
  int node_count() const;  // |A ∩ W|
  std::vector<RandomVar> members() const;

  /// "{W1,S12}"; the empty set renders as "{}".
  std::string to_string() const;
  /// Accepts comma separated names with optional braces, e.g. "W1,S12" or "{W1, S12}".
  static RVSubset parse(std::string_view text);

  friend constexpr RVSubset operator|(RVSubset a, RVSubset b) { return RVSubset(a.bits_ | b.bits_); }
  friend constexpr RVSubset operator&(RVSubset a, RVSubset b) { return RVSubset(a.bits_ & b.bits_); }
  friend constexpr auto operator<=>(RVSubset, RVSubset) = default;

 private:
  std::uint16_t bits_ = 0;
};

/// Bijection on {1,2,3,4}.
class NodePermutation {
 public:
  NodePermutation();  // identity
  explicit NodePermutation(std::array<int, kNodes> images);

  int operator()(int node) const { return image_[node - 1]; }
  NodePermutation inverse() const;
  /// (a.then(b))(x) = b(a(x)).
  NodePermutation then(const NodePermutation& next) const;
  const std::array<int, kNodes>& images() const { return image_; }
  std::string to_string() const;

  /// All 24 permutations in lexicographic order of their image tuples.
  static const std::array<NodePermutation, 24>& all();

  friend bool operator==(const NodePermutation&, const NodePermutation&) = default;

 private:
  std::array<int, kNodes> image_;
};

RVSubset apply_permutation(RVSubset s, const NodePermutation& p);

/// Least superset closed under: W_i present => all S_{i,.}; all S_{.,i} present => W_i.
RVSubset closure(RVSubset s);

/// min over the 24 permutations of closure(permuted s), compared as encodings.
RVSubset canonical_key(RVSubset s);

enum class Pin : std::uint8_t { Free, Zero, B, Alpha, Beta };
std::string_view pin_name(Pin pin);

using ClassId = std::uint32_t;

struct EntropyClass {
  RVSubset representative;  // smallest closed set in the orbit
  Pin pin = Pin::Free;
  int orbit_size = 0;    // distinct closed sets in the permutation orbit
  int member_count = 0;  // nonempty subsets mapping to this class
};

/// Symbolic LP coordinates: B, alpha, beta, then FREE classes in
/// representative order.
using SymbolId = int;
inline constexpr SymbolId kSymbolB = 0;
inline constexpr SymbolId kSymbolAlpha = 1;
inline constexpr SymbolId kSymbolBeta = 2;

class ClassTable {
 public:
  /// Throws std::domain_error for the empty set.
  ClassId class_of(RVSubset s) const;
  const EntropyClass& info(ClassId id) const { return classes_.at(id); }
  std::span<const EntropyClass> classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t free_count() const { return free_ids_.size(); }

  /// 3 + free_count().
  std::size_t symbol_count() const { return 3 + free_ids_.size(); }
  SymbolId symbol_of(ClassId id) const { return symbol_of_class_.at(id); }
  /// Inverse of symbol_of for B/alpha/beta and FREE symbols.
  ClassId class_of_symbol(SymbolId sym) const;
  /// "B", "alpha", "beta", or "h<representative encoding>".
  std::string symbol_name(SymbolId sym) const;
  /// Human readable name, e.g. "H(W1,S21)".
  std::string symbol_label(SymbolId sym) const;

  nlohmann::json to_json() const;
  /// Rebuilds a table from its serialized form; the document is checked
  /// against a fresh canonicalization and rejected on mismatch.
  static ClassTable from_json(const nlohmann::json& doc);

 private:
  friend ClassTable build_class_table();
  void finalize();

  std::vector<ClassId> class_of_;  // indexed by encoding; [0] unused
  std::vector<EntropyClass> classes_;
  std::vector<SymbolId> symbol_of_class_;
  std::vector<ClassId> free_ids_;
  std::array<ClassId, 3> pinned_ids_{};
};

ClassTable build_class_table();

/// Same as table.class_of(s).
ClassId canonical_class(RVSubset s, const ClassTable& table);

}  // namespace regen
