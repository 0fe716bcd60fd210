#include "regen/constraint_factory.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace regen {

namespace {

std::string set_list(RVSubset s) {
  const std::string braced = s.to_string();
  return braced.substr(1, braced.size() - 2);
}

// Integer form used on the hot path of the reduction; sorted by symbol.
using IntForm = std::vector<std::pair<SymbolId, int>>;

void accumulate(IntForm& form, SymbolId sym, int coeff) {
  for (auto& [s, c] : form) {
    if (s == sym) {
      c += coeff;
      return;
    }
  }
  form.emplace_back(sym, coeff);
}

IntForm reduce_int(std::span<const RawTerm> terms, int b_coeff, const ClassTable& table) {
  IntForm form;
  form.reserve(terms.size() + 1);
  for (const RawTerm& t : terms) {
    if (t.set.empty() || t.coeff == 0) continue;
    accumulate(form, table.symbol_of(table.class_of(t.set)), t.coeff);
  }
  if (b_coeff != 0) accumulate(form, kSymbolB, b_coeff);
  std::erase_if(form, [](const auto& term) { return term.second == 0; });
  std::sort(form.begin(), form.end());
  return form;
}

std::string dedup_key(const IntForm& form, Sense sense) {
  std::string key;
  key.reserve(form.size() * 2 * sizeof(int) + 1);
  key.push_back(static_cast<char>(sense));
  for (const auto& [sym, c] : form) {
    key.append(reinterpret_cast<const char*>(&sym), sizeof sym);
    key.append(reinterpret_cast<const char*>(&c), sizeof c);
  }
  return key;
}

std::string lp_number(const Rational& value) {
  if (is_integer(value)) return to_string(value);
  std::ostringstream out;
  out << std::setprecision(17) << to_double(value);
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// InfoMeasure

InfoMeasure InfoMeasure::entropy(RVSubset a, RVSubset given) {
  if (a.empty()) throw std::domain_error("H(A|C) needs a nonempty A");
  return InfoMeasure{Kind::Entropy, a, RVSubset{}, given};
}

InfoMeasure InfoMeasure::mutual(RVSubset a, RVSubset b, RVSubset given) {
  if (a.empty() || b.empty()) throw std::domain_error("I(A;B|C) needs nonempty A and B");
  return InfoMeasure{Kind::Mutual, a, b, given};
}

bool InfoMeasure::elemental() const {
  if (kind == Kind::Entropy) {
    return a.size() == 1 && (a | given) == RVSubset::all() && (a & given).empty();
  }
  return a.size() == 1 && b.size() == 1 && a != b && (a & given).empty() && (b & given).empty();
}

InfoMeasure InfoMeasure::permuted(const NodePermutation& p) const {
  return InfoMeasure{kind, apply_permutation(a, p), apply_permutation(b, p),
                     apply_permutation(given, p)};
}

std::string InfoMeasure::to_string() const {
  std::string out = kind == Kind::Entropy ? "H(" + set_list(a) : "I(" + set_list(a) + ";" + set_list(b);
  if (!given.empty()) out += "|" + set_list(given);
  return out + ")";
}

InfoMeasure InfoMeasure::parse(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("malformed information measure '" + std::string(text) + "'"); };
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  if (t.size() < 4 || t[1] != '(' || t.back() != ')') fail();
  const char head = t[0];
  std::string_view body = t.substr(2, t.size() - 3);
  RVSubset given;
  if (const auto bar = body.find('|'); bar != std::string_view::npos) {
    given = RVSubset::parse(body.substr(bar + 1));
    body = body.substr(0, bar);
  }
  if (head == 'H') {
    if (body.find(';') != std::string_view::npos) fail();
    return entropy(RVSubset::parse(body), given);
  }
  if (head == 'I') {
    const auto semi = body.find(';');
    if (semi == std::string_view::npos) fail();
    return mutual(RVSubset::parse(body.substr(0, semi)), RVSubset::parse(body.substr(semi + 1)), given);
  }
  fail();
  return {};
}

std::vector<RawTerm> expand(const InfoMeasure& m) {
  std::vector<RawTerm> terms;
  auto add = [&](RVSubset s, int c) {
    if (s.empty()) return;
    for (auto& t : terms) {
      if (t.set == s) {
        t.coeff += c;
        return;
      }
    }
    terms.push_back({s, c});
  };
  if (m.kind == InfoMeasure::Kind::Entropy) {
    add(m.a | m.given, 1);
    add(m.given, -1);
  } else {
    add(m.a | m.given, 1);
    add(m.b | m.given, 1);
    add(m.a | m.b | m.given, -1);
    add(m.given, -1);
  }
  std::erase_if(terms, [](const RawTerm& t) { return t.coeff == 0; });
  return terms;
}

std::string ProblemTag::to_string() const {
  switch (kind) {
    case Kind::Reconstruction: return "reconstruction#" + std::to_string(index);
    case Kind::RepairEncoding: return "repair-encoding#" + std::to_string(index);
    case Kind::RepairDecoding: return "repair-decoding#" + std::to_string(index);
    case Kind::TotalInformation: return "total-information";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Generation

std::uint64_t elemental_count(int n) {
  if (n < 2) throw std::domain_error("elemental inequalities need at least 2 variables");
  const auto nn = static_cast<std::uint64_t>(n);
  return nn + nn * (nn - 1) / 2 * (std::uint64_t{1} << (nn - 2));
}

void for_each_elemental(int n, const std::function<void(const InfoMeasure&)>& visit) {
  if (n < 2) throw std::domain_error("elemental inequalities need at least 2 variables");
  if (n > kVariables) throw std::domain_error("at most 16 variables are representable");
  const auto universe = static_cast<std::uint16_t>((std::uint32_t{1} << n) - 1);
  for (int i = 0; i < n; ++i) {
    const auto xi = static_cast<std::uint16_t>(1u << i);
    visit(InfoMeasure{InfoMeasure::Kind::Entropy, RVSubset(xi), RVSubset{},
                      RVSubset(static_cast<std::uint16_t>(universe & ~xi))});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto xi = static_cast<std::uint16_t>(1u << i);
      const auto xj = static_cast<std::uint16_t>(1u << j);
      const auto others = static_cast<std::uint16_t>(universe & ~(xi | xj));
      std::uint16_t sub = 0;
      do {
        visit(InfoMeasure{InfoMeasure::Kind::Mutual, RVSubset(xi), RVSubset(xj), RVSubset(sub)});
        sub = static_cast<std::uint16_t>((sub - others) & others);
      } while (sub != 0);
    }
  }
}

std::vector<RawRow> gen_elemental(int n) {
  std::vector<RawRow> rows;
  rows.reserve(static_cast<std::size_t>(elemental_count(n)));
  for_each_elemental(n, [&](const InfoMeasure& m) {
    rows.push_back(RawRow{expand(m), 0, Sense::GreaterEqualZero, m});
  });
  return rows;
}

std::vector<RawRow> gen_problem_equalities() {
  std::vector<RawRow> rows;
  auto push = [&](const InfoMeasure& m, ProblemTag::Kind kind, int index) {
    rows.push_back(RawRow{expand(m), 0, Sense::EqualZero, ProblemTag{kind, index}});
  };
  // H(W u S | A) = 0 for every triple A of node contents; index = omitted node - 1.
  for (int omitted = 1; omitted <= kNodes; ++omitted) {
    RVSubset triple;
    for (int i = 1; i <= kNodes; ++i) {
      if (i != omitted) triple = triple | RVSubset{RandomVar::W(i)};
    }
    push(InfoMeasure::entropy(RVSubset(static_cast<std::uint16_t>(~triple.encoding())), triple),
         ProblemTag::Kind::Reconstruction, omitted - 1);
  }
  // H(S_ij | W_i) = 0.
  int index = 0;
  for (int i = 1; i <= kNodes; ++i) {
    for (int j = 1; j <= kNodes; ++j) {
      if (i == j) continue;
      push(InfoMeasure::entropy(RVSubset{RandomVar::S(i, j)}, RVSubset{RandomVar::W(i)}),
           ProblemTag::Kind::RepairEncoding, index++);
    }
  }
  // H(W_j | S_{.,j}) = 0.
  for (int j = 1; j <= kNodes; ++j) {
    RVSubset incoming;
    for (int i = 1; i <= kNodes; ++i) {
      if (i != j) incoming = incoming | RVSubset{RandomVar::S(i, j)};
    }
    push(InfoMeasure::entropy(RVSubset{RandomVar::W(j)}, incoming), ProblemTag::Kind::RepairDecoding, j - 1);
  }
  // H(W u S) - B = 0.
  rows.push_back(RawRow{{RawTerm{RVSubset::all(), 1}}, -1, Sense::EqualZero,
                        ProblemTag{ProblemTag::Kind::TotalInformation, 0}});
  return rows;
}

// ---------------------------------------------------------------------------
// LinearForm

void LinearForm::add(SymbolId sym, const Rational& coeff) {
  if (coeff == 0) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), sym,
                             [](const Term& t, SymbolId s) { return t.first < s; });
  if (it != terms_.end() && it->first == sym) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  } else {
    terms_.insert(it, Term{sym, coeff});
  }
}

Rational LinearForm::coeff(SymbolId sym) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), sym,
                             [](const Term& t, SymbolId s) { return t.first < s; });
  return it != terms_.end() && it->first == sym ? it->second : Rational(0);
}

Rational LinearForm::evaluate(std::span<const Rational> values) const {
  Rational sum = constant_;
  for (const auto& [sym, c] : terms_) sum += c * values[static_cast<std::size_t>(sym)];
  return sum;
}

LinearForm& LinearForm::operator+=(const LinearForm& other) {
  for (const auto& [sym, c] : other.terms_) add(sym, c);
  constant_ += other.constant_;
  return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& other) {
  for (const auto& [sym, c] : other.terms_) add(sym, -c);
  constant_ -= other.constant_;
  return *this;
}

LinearForm& LinearForm::operator*=(const Rational& scale) {
  if (scale == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& term : terms_) term.second *= scale;
  constant_ *= scale;
  return *this;
}

std::string LinearForm::to_string(const ClassTable& table) const {
  std::string out;
  auto emit = [&](const Rational& c, const std::string& name) {
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (out.empty()) {
      out += negative ? "-" : "";
    } else {
      out += negative ? " - " : " + ";
    }
    if (name.empty()) {
      out += regen::to_string(mag);
    } else {
      if (mag != 1) out += regen::to_string(mag) + " ";
      out += name;
    }
  };
  for (const auto& [sym, c] : terms_) emit(c, table.symbol_label(sym));
  if (constant_ != 0) emit(constant_, "");
  return out.empty() ? "0" : out;
}

LinearForm reduce_linear_form(std::span<const RawTerm> terms, int b_coeff, const ClassTable& table) {
  LinearForm form;
  for (const auto& [sym, c] : reduce_int(terms, b_coeff, table)) form.add(sym, Rational(c));
  return form;
}

LinearForm reduce_linear_form(const RawRow& row, const ClassTable& table) {
  return reduce_linear_form(row.terms, row.b_coeff, table);
}

LinearForm reduce_linear_form(const InfoMeasure& m, const ClassTable& table) {
  return reduce_linear_form(expand(m), 0, table);
}

// ---------------------------------------------------------------------------
// ReducedSystem

std::size_t ReducedSystem::inequality_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ConstraintRow& r) {
    return r.sense == Sense::GreaterEqualZero;
  }));
}

ReducedSystem build_reduced_system(std::shared_ptr<const ClassTable> table) {
  ReducedSystem sys;
  sys.table = std::move(table);
  const ClassTable& tab = *sys.table;
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(16384);

  auto insert = [&](IntForm form, Sense sense, const InfoMeasure& origin) {
    if (form.empty()) {
      ++sys.stats.zero_rows;
      return;
    }
    int g = 0;
    for (const auto& term : form) g = std::gcd(g, std::abs(term.second));
    for (auto& term : form) term.second /= g;
    auto [it, fresh] = index.try_emplace(dedup_key(form, sense), sys.rows.size());
    if (fresh) {
      ConstraintRow row;
      for (const auto& [sym, c] : form) row.form.add(sym, Rational(c));
      row.sense = sense;
      row.provenance.push_back({origin, g});
      sys.rows.push_back(std::move(row));
    } else {
      ++sys.stats.duplicate_rows;
      sys.rows[it->second].provenance.push_back({origin, g});
    }
  };

  for_each_elemental(kVariables, [&](const InfoMeasure& m) {
    ++sys.stats.elemental_rows;
    const auto terms = expand(m);
    insert(reduce_int(terms, 0, tab), Sense::GreaterEqualZero, m);
  });

  for (const RawRow& row : gen_problem_equalities()) {
    ++sys.stats.problem_equalities;
    if (reduce_int(row.terms, row.b_coeff, tab).empty()) {
      ++sys.stats.equalities_absorbed;
    } else {
      const auto* m = std::get_if<InfoMeasure>(&row.origin);
      insert(reduce_int(row.terms, row.b_coeff, tab), Sense::EqualZero,
             m ? *m : InfoMeasure::entropy(RVSubset::all()));
    }
  }

  // alpha - H(W_i) >= 0 and beta - H(S_ij) >= 0 become 0 >= 0 once pinned.
  for (int p = 0; p < kVariables; ++p) {
    ++sys.stats.storage_bandwidth_rows;
    const RandomVar v = RandomVar::at(p);
    IntForm form = reduce_int(std::vector<RawTerm>{{RVSubset{v}, -1}}, 0, tab);
    accumulate(form, v.kind() == RandomVar::Kind::Node ? kSymbolAlpha : kSymbolBeta, 1);
    std::erase_if(form, [](const auto& term) { return term.second == 0; });
    if (form.empty()) ++sys.stats.storage_bandwidth_absorbed;
  }
  return sys;
}

nlohmann::json ReducedSystem::to_json() const {
  nlohmann::json vars = nlohmann::json::array();
  for (SymbolId s = 0; s < static_cast<SymbolId>(symbol_count()); ++s) {
    vars.push_back({{"name", table->symbol_name(s)}, {"label", table->symbol_label(s)}});
  }
  nlohmann::json list = nlohmann::json::array();
  for (const ConstraintRow& row : rows) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [sym, c] : row.form.terms()) coeffs[table->symbol_name(sym)] = to_string(c);
    list.push_back({{"coeffs", coeffs},
                    {"sense", row.sense == Sense::GreaterEqualZero ? ">=0" : "=0"},
                    {"provenance", row.provenance.front().measure.to_string()},
                    {"scale", row.provenance.front().scale},
                    {"merged", row.provenance.size()}});
  }
  return {{"variables", vars},
          {"num_vars", symbol_count()},
          {"num_ineq", inequality_count()},
          {"rows", list}};
}

std::string ReducedSystem::to_lp_format(const std::optional<Rational>& alpha0) const {
  std::ostringstream out;
  out << "\\ Reduced (4,3,3) exact-repair entropy system: " << symbol_count() << " symbols, "
      << rows.size() << " rows\n";
  out << "Minimize\n obj: beta\nSubject To\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << " r" << r << ":";
    bool first = true;
    for (const auto& [sym, c] : rows[r].form.terms()) {
      const bool negative = c < 0;
      out << (negative ? " - " : (first ? " " : " + "));
      const Rational mag = negative ? Rational(-c) : c;
      if (mag != 1) out << lp_number(mag) << " ";
      out << table->symbol_name(sym);
      first = false;
    }
    out << (rows[r].sense == Sense::GreaterEqualZero ? " >= 0\n" : " = 0\n");
  }
  out << "Bounds\n";
  if (alpha0) {
    out << " B = 1\n alpha = " << lp_number(*alpha0) << "\n";
  } else {
    out << " B free\n alpha free\n";
  }
  for (SymbolId s = kSymbolBeta; s < static_cast<SymbolId>(symbol_count()); ++s) {
    out << " " << table->symbol_name(s) << " free\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace regen
