#include "regen/proof_forge.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <tuple>

namespace regen {

RationalVector secondary_cost_vector(const FacetCandidate& facet, const ClassTable& table) {
  RationalVector c = RationalVector::Zero(static_cast<Eigen::Index>(table.symbol_count()));
  c(kSymbolB) = -facet.gamma_B;
  c(kSymbolAlpha) = facet.gamma_alpha;
  c(kSymbolBeta) = facet.gamma_beta;
  return c;
}

LPInstance build_secondary_lp(const FacetCandidate& facet, const ReducedSystem& sys) {
  const auto symbols = static_cast<Eigen::Index>(sys.symbol_count());
  const auto rows = static_cast<Eigen::Index>(sys.rows.size());
  const bool has_constant = std::any_of(sys.rows.begin(), sys.rows.end(),
                                        [](const ConstraintRow& r) { return r.form.constant() != 0; });
  const Eigen::Index equations = symbols + (has_constant ? 1 : 0);

  std::vector<Eigen::Triplet<Rational>> entries;
  LPInstance lp;
  lp.c.resize(rows);
  lp.bounds.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const ConstraintRow& row = sys.rows[static_cast<std::size_t>(r)];
    for (const auto& [sym, v] : row.form.terms()) entries.emplace_back(sym, r, v);
    if (row.form.constant() != 0) entries.emplace_back(symbols, r, row.form.constant());
    const bool inequality = row.sense == Sense::GreaterEqualZero;
    lp.bounds[static_cast<std::size_t>(r)] = inequality ? VarBound::NonNegative : VarBound::Free;
    lp.c(r) = inequality ? 1 : 0;
  }
  lp.A.resize(equations, rows);
  lp.A.setFromTriplets(entries.begin(), entries.end());
  lp.A.makeCompressed();
  lp.b = RationalVector::Zero(equations);
  lp.b.head(symbols) = secondary_cost_vector(facet, *sys.table);
  lp.senses.assign(static_cast<std::size_t>(equations), RowSense::Equal);
  return lp;
}

LPInstance build_expanded_primal(const FacetCandidate& facet, const ReducedSystem& sys) {
  LPBuilder builder(static_cast<Eigen::Index>(sys.symbol_count()));
  const RationalVector c = secondary_cost_vector(facet, *sys.table);
  for (Eigen::Index j = 0; j < c.size(); ++j) builder.cost[static_cast<std::size_t>(j)] = c(j);
  std::vector<std::pair<Eigen::Index, Rational>> coeffs;
  for (const ConstraintRow& row : sys.rows) {
    coeffs.assign(row.form.terms().begin(), row.form.terms().end());
    builder.add_row(coeffs, row.sense == Sense::EqualZero ? RowSense::Equal : RowSense::GreaterEqual,
                    -row.form.constant());
  }
  builder.add_row({{kSymbolB, Rational(1)}}, RowSense::LessEqual, Rational(1));
  builder.add_row({{kSymbolB, Rational(1)}}, RowSense::GreaterEqual, Rational(1));
  return builder.build();
}

BRowBalance b_row_balance(const FacetCandidate& facet, const ReducedSystem& sys) {
  const LPInstance lp = build_expanded_primal(facet, sys);
  const LPSolution sol = solve(lp);
  BRowBalance out;
  out.status = sol.status;
  if (sol.status != LPStatus::Optimal) return out;
  out.objective = sol.objective;
  out.lambda_upper = sol.duals(lp.rows() - 2);
  out.lambda_lower = sol.duals(lp.rows() - 1);
  return out;
}

DualCertificate extract_certificate(const FacetCandidate& facet, const ReducedSystem& sys,
                                    const SimplexOptions& options) {
  const LPInstance lp = build_secondary_lp(facet, sys);
  const LPSolution sol = solve(lp, SolveRoute::Primal, options);
  if (sol.status != LPStatus::Optimal) throw NotProvable();
  DualCertificate cert{facet, {}};
  for (Eigen::Index r = 0; r < lp.cols(); ++r) {
    const Rational& lambda = sol.primal(r);
    if (lambda == 0) continue;
    const RowOrigin& origin = sys.rows[static_cast<std::size_t>(r)].provenance.front();
    cert.rows.push_back({static_cast<std::size_t>(r), origin.measure, lambda / origin.scale});
  }
  return cert;
}

nlohmann::json DualCertificate::to_json() const {
  nlohmann::json doc;
  doc["facet"] = facet.to_string();
  doc["rows"] = nlohmann::json::array();
  for (const CertificateRow& r : rows) {
    nlohmann::json e{{"provenance", r.measure.to_string()}, {"multiplier", regen::to_string(r.multiplier)}};
    if (r.row) e["row"] = *r.row;
    doc["rows"].push_back(std::move(e));
  }
  return doc;
}

DualCertificate DualCertificate::from_json(const nlohmann::json& doc) {
  DualCertificate cert;
  if (!doc.is_object() || !doc.contains("facet") || !doc.contains("rows")) {
    throw std::invalid_argument("certificate needs 'facet' and 'rows'");
  }
  const auto& f = doc.at("facet");
  if (f.is_string()) {
    cert.facet = FacetCandidate::parse(f.get<std::string>());
  } else if (f.is_array() && f.size() == 3) {
    cert.facet = FacetCandidate{Rational(f[0].get<long long>()), Rational(f[1].get<long long>()),
                                Rational(f[2].get<long long>())};
  } else {
    throw std::invalid_argument("certificate facet must be \"a,b,c\" or [a,b,c]");
  }
  for (const auto& e : doc.at("rows")) {
    CertificateRow row;
    row.measure = InfoMeasure::parse(e.at("provenance").get<std::string>());
    const auto& m = e.at("multiplier");
    row.multiplier = m.is_string() ? parse_rational(m.get<std::string>()) : Rational(m.get<long long>());
    if (e.contains("row")) row.row = e.at("row").get<std::size_t>();
    cert.rows.push_back(std::move(row));
  }
  return cert;
}

std::string VerificationReport::to_string() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << '\n';
  for (std::size_t r : negative_rows) os << "negative multiplier at certificate row " << r << '\n';
  for (const auto& m : mismatches) {
    os << "coordinate " << m.label << ": expected " << regen::to_string(m.expected) << ", got "
       << regen::to_string(m.actual) << '\n';
  }
  if (constant_residual != 0) os << "constant term: got " << regen::to_string(constant_residual) << '\n';
  return os.str();
}

VerificationReport verify_certificate(const DualCertificate& cert, const ClassTable& table) {
  VerificationReport report;
  for (std::size_t k = 0; k < cert.rows.size(); ++k) {
    const CertificateRow& r = cert.rows[k];
    if (r.multiplier < 0) report.negative_rows.push_back(k);
    if (r.multiplier == 0) continue;
    report.recombined += r.multiplier * reduce_linear_form(r.measure, table);
  }
  const RationalVector target = secondary_cost_vector(cert.facet, table);
  for (Eigen::Index s = 0; s < target.size(); ++s) {
    const Rational actual = report.recombined.coeff(static_cast<SymbolId>(s));
    if (actual != target(s)) {
      report.mismatches.push_back({static_cast<SymbolId>(s), table.symbol_label(static_cast<SymbolId>(s)), target(s), actual});
    }
  }
  report.constant_residual = report.recombined.constant();
  report.passed = report.negative_rows.empty() && report.mismatches.empty() && report.constant_residual == 0;
  return report;
}

namespace {

using MeasureKey = std::tuple<int, std::uint16_t, std::uint16_t, std::uint16_t>;

MeasureKey key_of(const InfoMeasure& m) {
  return {static_cast<int>(m.kind), m.a.encoding(), m.b.encoding(), m.given.encoding()};
}

InfoMeasure oriented(InfoMeasure m) {
  if (m.kind == InfoMeasure::Kind::Mutual && m.b < m.a) std::swap(m.a, m.b);
  return m;
}

std::string term(const Rational& c, const std::string& name, bool glued) {
  if (c == 1) return name;
  const std::string num = regen::to_string(c);
  return glued ? num + name : num + " " + name;
}

}  // namespace

InfoMeasure canonical_measure(const InfoMeasure& m) {
  InfoMeasure best = oriented(m);
  for (const NodePermutation& p : NodePermutation::all()) {
    const InfoMeasure cand = oriented(m.permuted(p));
    if (key_of(cand) < key_of(best)) best = cand;
  }
  return best;
}

std::string placeholder_form(const InfoMeasure& m) {
  static constexpr std::array<const char*, kNodes> names{"i", "j", "k", "t"};
  std::array<int, kNodes + 1> label{};
  label.fill(-1);
  int used = 0;
  auto node = [&](int n) {
    if (label[static_cast<std::size_t>(n)] < 0) label[static_cast<std::size_t>(n)] = used++;
    return std::string(names[static_cast<std::size_t>(label[static_cast<std::size_t>(n)])]);
  };
  auto list = [&](RVSubset s) {
    std::string out;
    for (const RandomVar& v : s.members()) {
      if (!out.empty()) out += ",";
      if (v.kind() == RandomVar::Kind::Node) {
        out += "W_" + node(v.from());
      } else {
        const std::string from = node(v.from());
        out += "S_{" + from + "," + node(v.to()) + "}";
      }
    }
    return out;
  };
  std::string out = m.kind == InfoMeasure::Kind::Entropy ? "H(" : "I(";
  out += list(m.a);
  if (m.kind == InfoMeasure::Kind::Mutual) {
    out += ";";
    out += list(m.b);
  }
  if (!m.given.empty()) {
    out += "|";
    out += list(m.given);
  }
  return out + ")";
}

std::string render_bound(const LinearForm& form, const ClassTable& table) {
  auto name = [&](SymbolId s) -> std::string {
    if (s == kSymbolB) return "B";
    if (s == kSymbolAlpha) return "α";
    if (s == kSymbolBeta) return "β";
    return table.symbol_label(s);
  };
  std::string lhs, rhs;
  for (const auto& [sym, c] : form.terms()) {
    std::string& side = c > 0 ? lhs : rhs;
    if (!side.empty()) side += " + ";
    side += term(c > 0 ? c : Rational(-c), name(sym), sym <= kSymbolBeta);
  }
  const Rational& k = form.constant();
  if (k != 0) {
    std::string& side = k > 0 ? lhs : rhs;
    if (!side.empty()) side += " + ";
    side += regen::to_string(k > 0 ? k : Rational(-k));
  }
  return (lhs.empty() ? "0" : lhs) + " ≥ " + (rhs.empty() ? "0" : rhs);
}

ProofDocument render_proof(const DualCertificate& cert, const ClassTable& table) {
  const VerificationReport report = verify_certificate(cert, table);
  if (!report.passed) throw std::domain_error("render_proof: certificate does not verify");

  ProofDocument doc;
  doc.facet = cert.facet;
  std::map<MeasureKey, std::size_t> family_of;
  std::vector<std::size_t> first_seen;
  for (const CertificateRow& r : cert.rows) {
    if (r.multiplier == 0) continue;
    const MeasureKey key = key_of(canonical_measure(r.measure));
    auto [it, inserted] = family_of.emplace(key, doc.steps.size());
    if (inserted) {
      doc.steps.push_back({Rational(0), placeholder_form(r.measure) + " ≥ 0", r.measure.to_string(), 0});
    }
    ProofStep& step = doc.steps[it->second];
    step.weight += r.multiplier;
    ++step.members;
  }
  std::stable_sort(doc.steps.begin(), doc.steps.end(),
                   [](const ProofStep& a, const ProofStep& b) { return a.weight > b.weight; });
  doc.footer = render_bound(report.recombined, table);
  return doc;
}

namespace {

std::string cell(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return "`" + out + "`";
}

}  // namespace

std::string ProofDocument::to_markdown() const {
  std::ostringstream os;
  os << "# Proof of " << footer << "\n\n";
  os << "| weight | inequality | first member | rows |\n";
  os << "|---|---|---|---|\n";
  for (const ProofStep& s : steps) {
    os << "| " << regen::to_string(s.weight) << " | " << cell(s.statement) << " | " << cell(s.origin) << " | " << s.members << " |\n";
  }
  os << "\nSumming the weighted rows gives\n\n    " << footer << "\n";
  return os.str();
}

}  // namespace regen
