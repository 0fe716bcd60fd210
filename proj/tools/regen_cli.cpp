// Command-line driver: one subcommand per pipeline stage.
//
// Exit status: 0 success, 1 failure (not provable, verification failed),
// 2 usage error. Failures print one JSON line {"error":..., "message":...}
// on stderr.

#include "regen/code_bench.hpp"
#include "regen/constraint_factory.hpp"
#include "regen/proof_forge.hpp"
#include "regen/region_sweep.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace regen;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr std::size_t kReferenceInequalityCount = 6152;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

void require_input(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("input file not found: " + path);
}

void require_output(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw UsageError("output directory does not exist: " + parent.string());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

Rational rational_arg(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

struct Globals {
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string cache;
};

std::shared_ptr<const ClassTable> load_table(const Globals& g) {
  if (!g.cache.empty() && fs::is_regular_file(g.cache)) {
    std::ifstream in(g.cache);
    return std::make_shared<const ClassTable>(ClassTable::from_json(nlohmann::json::parse(in)));
  }
  auto table = std::make_shared<const ClassTable>(build_class_table());
  if (!g.cache.empty()) write_file(g.cache, dump(table->to_json()));
  return table;
}

nlohmann::json facet_json(const FacetCandidate& f) {
  return {{"gamma_alpha", to_string(f.gamma_alpha)}, {"gamma_beta", to_string(f.gamma_beta)}, {"gamma_B", to_string(f.gamma_B)}};
}

// ---------------------------------------------------------------------------

struct ReduceArgs {
  std::string out;
  std::string lp;
  std::string alpha;
};

int run_reduce(const Globals& g, const ReduceArgs& a) {
  require_output(a.out);
  require_output(a.lp);
  std::optional<Rational> alpha0;
  if (!a.alpha.empty()) alpha0 = rational_arg(a.alpha, "--alpha");
  const auto table = load_table(g);
  const ReducedSystem sys = build_reduced_system(table);
  const auto equalities = gen_problem_equalities();
  std::array<int, 4> breakdown{};
  for (const RawRow& r : equalities) ++breakdown[static_cast<std::size_t>(std::get<ProblemTag>(r.origin).kind)];

  nlohmann::json counts{
      {"classes", table->class_count()},
      {"free_classes", table->free_count()},
      {"symbols", table->symbol_count()},
      {"primal_variables", sys.primal_variable_count()},
      {"elemental_inequalities", elemental_count(kVariables)},
      {"problem_equalities", equalities.size()},
      {"problem_equality_breakdown", {{"reconstruction", breakdown[0]}, {"repair_encoding", breakdown[1]},
                                      {"repair_decoding", breakdown[2]}, {"total_information", breakdown[3]}}},
      {"reduced_inequalities", sys.inequality_count()},
      {"reduced_equalities", sys.equality_count()},
      {"reference_inequalities", kReferenceInequalityCount},
      {"zero_rows", sys.stats.zero_rows},
      {"duplicate_rows", sys.stats.duplicate_rows},
      {"dedup_convention", "rows divided by the gcd of their integer coefficients; positive multiples merged"}};
  std::cout << dump(counts);
  if (!a.out.empty()) write_file(a.out, dump({{"counts", counts}, {"class_table", table->to_json()}, {"system", sys.to_json()}}));
  if (!a.lp.empty()) write_file(a.lp, sys.to_lp_format(alpha0));
  return 0;
}

struct SweepArgs {
  std::string from = "1/3";
  std::string to = "1/2";
  std::string step = "1/120";
  std::string out;
  std::string csv;
};

int run_sweep(const Globals& g, const SweepArgs& a) {
  require_output(a.out);
  require_output(a.csv);
  const std::vector<Rational> grid =
      make_grid(rational_arg(a.from, "--from"), rational_arg(a.to, "--to"), rational_arg(a.step, "--step"));
  const ReducedSystem sys = build_reduced_system(load_table(g));
  const std::vector<RatePoint> curve = sweep_curve(grid, sys, g.threads);
  std::vector<FacetCandidate> facets;
  std::size_t feasible = 0;
  for (const RatePoint& p : curve) feasible += p.status == LPStatus::Optimal;
  if (feasible >= 2) facets = candidate_facets(curve);
  const std::string csv = curve_to_csv(curve);
  if (!a.out.empty()) write_file(a.out, dump(curve_to_json(curve, facets)));
  if (!a.csv.empty()) write_file(a.csv, csv);
  if (a.out.empty() && a.csv.empty()) std::cout << csv;
  for (const FacetCandidate& f : facets) std::cout << "facet " << f.to_string() << '\n';
  return 0;
}

struct ProveArgs {
  std::string facet;
  std::string out;
  std::string proof;
};

int run_prove(const Globals& g, const ProveArgs& a) {
  require_output(a.out);
  require_output(a.proof);
  FacetCandidate facet;
  try {
    facet = FacetCandidate::parse(a.facet);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--facet: ") + e.what());
  }
  if (facet.all_zero()) throw UsageError("--facet: entries must not all be zero");
  const ReducedSystem sys = build_reduced_system(load_table(g));
  DualCertificate cert;
  try {
    cert = extract_certificate(facet, sys);
  } catch (const NotProvable& e) {
    return report_error("not_provable", std::string(e.what()) + " (facet " + facet.to_string() + ")", kExitFailure);
  }
  const VerificationReport report = verify_certificate(cert, *sys.table);
  if (!report.passed) return report_error("verification_failed", report.to_string(), kExitFailure);
  const ProofDocument doc = render_proof(cert, *sys.table);
  if (!a.out.empty()) write_file(a.out, dump(cert.to_json()));
  if (!a.proof.empty()) write_file(a.proof, doc.to_markdown());
  if (a.out.empty() && a.proof.empty()) std::cout << dump(cert.to_json());
  std::cout << "certificate rows: " << cert.rows.size() << "\n" << doc.footer << '\n';
  return 0;
}

int run_verify_cert(const Globals& g, const std::string& path) {
  require_input(path);
  DualCertificate cert;
  try {
    std::ifstream in(path);
    cert = DualCertificate::from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw UsageError("malformed certificate: " + std::string(e.what()));
  }
  const auto table = load_table(g);
  const VerificationReport report = verify_certificate(cert, *table);
  std::cout << report.to_string();
  if (!report.passed) {
    std::string first = "certificate does not verify";
    if (!report.mismatches.empty()) first += " at coordinate " + report.mismatches.front().label;
    return report_error("verification_failed", first, kExitFailure);
  }
  std::cout << render_bound(report.recombined, *table) << '\n';
  return 0;
}

struct CodeArgs {
  std::string kind;
  bool symmetrized = false;
  std::size_t samples = 1000;
  std::string out;
};

ConcreteCode code_from(const CodeArgs& a) {
  CodeKind kind;
  try {
    kind = parse_code_kind(a.kind);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--kind: ") + e.what());
  }
  ConcreteCode code = build_code(kind);
  return a.symmetrized ? symmetrize(code) : code;
}

int run_verify_code(const Globals& g, const CodeArgs& a) {
  require_output(a.out);
  const ConcreteCode code = code_from(a);
  VerifyOptions opts;
  opts.samples = a.samples;
  opts.seed = g.seed;
  opts.threads = g.threads;
  const CodeReport report = verify_code(code, opts);
  std::cout << report.to_string() << '\n';
  nlohmann::json doc = report.to_json();
  doc["B_bits"] = code.B_bits;
  doc["alpha_bits"] = code.alpha_bits;
  doc["beta_bits"] = code.beta_bits;
  doc["alpha_bar"] = to_string(code.alpha_bar());
  doc["beta_bar"] = to_string(code.beta_bar());
  if (!a.out.empty()) write_file(a.out, dump(doc));
  if (!report.passed) return report_error("code_failed", report.counterexample.value_or("verification failed"), kExitFailure);
  return 0;
}

int run_entropy_vector(const Globals& g, const CodeArgs& a) {
  require_output(a.out);
  const ConcreteCode code = code_from(a);
  const EntropyVector vec = entropy_vector(code, g.threads);
  if (!a.out.empty()) {
    write_file(a.out, vec.to_json().dump() + "\n");
  }
  std::cout << "H(all) = " << vec.bits(RVSubset::all()) << " bits, H(W1) = " << vec.bits(RVSubset{RandomVar::W(1)})
            << ", H(S12) = " << vec.bits(RVSubset{RandomVar::S(1, 2)}) << '\n';
  return 0;
}

int run_check_vector(const Globals& g, const std::string& path) {
  require_input(path);
  EntropyVector vec;
  try {
    std::ifstream in(path);
    vec = EntropyVector::from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw UsageError("malformed entropy vector: " + std::string(e.what()));
  }
  const ReducedSystem sys = build_reduced_system(load_table(g));
  const VectorCheck rows = check_vector(vec, sys);
  const PolymatroidCheck poly = check_polymatroid(vec);
  nlohmann::json doc{{"rows_checked", rows.rows_checked},
                     {"rows_violated", rows.violated_rows.size()},
                     {"monotone_violations", poly.monotone_violations},
                     {"submodular_violations", poly.submodular_violations},
                     {"total_information_violations", poly.total_information_violations},
                     {"symmetric", is_symmetric(vec)}};
  if (auto v = evaluate_form(reduce_linear_form(InfoMeasure::entropy(RVSubset::all()), *sys.table), vec, *sys.table)) {
    doc["B"] = to_string(*v);
  }
  std::cout << dump(doc);
  if (!rows.passed() || !poly.passed()) {
    std::string msg = "entropy vector violates the reduced system";
    if (!rows.violated_rows.empty()) msg += " at row " + std::to_string(rows.violated_rows.front());
    return report_error("vector_infeasible", msg, kExitFailure);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-repair (4,3,3) regenerating-code rate region tools"};
  app.require_subcommand(1, 1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--seed", g.seed, "Seed for sampled verification");
  app.add_option("--cache", g.cache, "Class table cache file (written if absent, validated if present)");

  ReduceArgs reduce;
  auto* reduce_cmd = app.add_subcommand("reduce", "Class table, reduced system and counts");
  reduce_cmd->add_option("--out", reduce.out, "JSON with class table, system and counts");
  reduce_cmd->add_option("--lp", reduce.lp, "CPLEX LP export");
  reduce_cmd->add_option("--alpha", reduce.alpha, "Fix B = 1 and alpha in the LP export (p/q)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Trace min beta over an alpha grid");
  sweep_cmd->add_option("--from", sweep.from, "First alpha (p/q)");
  sweep_cmd->add_option("--to", sweep.to, "Last alpha (p/q)");
  sweep_cmd->add_option("--step", sweep.step, "Grid step (p/q)");
  sweep_cmd->add_option("--out", sweep.out, "Curve JSON");
  sweep_cmd->add_option("--csv", sweep.csv, "Curve CSV");

  ProveArgs prove;
  auto* prove_cmd = app.add_subcommand("prove", "Extract and verify a dual certificate");
  prove_cmd->add_option("--facet", prove.facet, "gamma_alpha,gamma_beta,gamma_B")->required();
  prove_cmd->add_option("--out", prove.out, "Certificate JSON");
  prove_cmd->add_option("--proof", prove.proof, "Proof markdown");

  std::string cert_path;
  auto* vcert_cmd = app.add_subcommand("verify-cert", "Check a certificate file exactly");
  vcert_cmd->add_option("file", cert_path, "Certificate JSON")->required();

  CodeArgs vcode;
  auto* vcode_cmd = app.add_subcommand("verify-code", "Exhaustively verify a code");
  vcode_cmd->add_option("--kind", vcode.kind, "msr | mbr | interior")->required();
  vcode_cmd->add_flag("--symmetrize", vcode.symmetrized, "Use the 24-fold symmetrized product");
  vcode_cmd->add_option("--samples", vcode.samples, "Sampled messages when exhaustion is too large");
  vcode_cmd->add_option("--out", vcode.out, "Report JSON");

  CodeArgs evec;
  auto* evec_cmd = app.add_subcommand("entropy-vector", "Exact entropy vector of a code");
  evec_cmd->add_option("--kind", evec.kind, "msr | mbr | interior")->required();
  evec_cmd->add_flag("--symmetrize", evec.symmetrized, "Use the 24-fold symmetrized product");
  evec_cmd->add_option("--out", evec.out, "Entropy vector JSON");

  std::string vec_path;
  auto* cvec_cmd = app.add_subcommand("check-vector", "Check an entropy vector against the reduced system");
  cvec_cmd->add_option("file", vec_path, "Entropy vector JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report_error("usage", e.what(), kExitUsage);
  }

  try {
    if (*reduce_cmd) return run_reduce(g, reduce);
    if (*sweep_cmd) return run_sweep(g, sweep);
    if (*prove_cmd) return run_prove(g, prove);
    if (*vcert_cmd) return run_verify_cert(g, cert_path);
    if (*vcode_cmd) return run_verify_code(g, vcode);
    if (*evec_cmd) return run_entropy_vector(g, evec);
    if (*cvec_cmd) return run_check_vector(g, vec_path);
  } catch (const UsageError& e) {
    return report_error("usage", e.what(), kExitUsage);
  } catch (const std::domain_error& e) {
    return report_error("usage", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return report_error("failure", e.what(), kExitFailure);
  }
  return report_error("usage", "no subcommand", kExitUsage);
}
