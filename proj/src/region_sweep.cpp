#include "regen/region_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace regen {

LPInstance build_min_beta_lp(const Rational& alpha0, const ReducedSystem& sys) {
  const auto vars = static_cast<Eigen::Index>(sys.primal_variable_count());
  LPBuilder builder(vars);
  builder.cost[0] = 1;
  std::vector<std::pair<Eigen::Index, Rational>> coeffs;
  for (const ConstraintRow& row : sys.rows) {
    coeffs.clear();
    Rational constant = row.form.constant();
    for (const auto& [sym, value] : row.form.terms()) {
      if (sym == kSymbolB) {
        constant += value;
      } else if (sym == kSymbolAlpha) {
        constant += value * alpha0;
      } else {
        coeffs.emplace_back(sym - kSymbolBeta, value);
      }
    }
    if (coeffs.empty()) {
      // Fully determined row; keep it so infeasibility is still detected.
      coeffs.emplace_back(0, Rational(0));
    }
    builder.add_row(coeffs, row.sense == Sense::EqualZero ? RowSense::Equal : RowSense::GreaterEqual, -constant);
  }
  return builder.build();
}

MinBetaResult min_beta(const Rational& alpha0, const ReducedSystem& sys, const SimplexOptions& options) {
  if (alpha0 < 0) throw std::domain_error("min_beta: alpha0 must be nonnegative");
  const LPInstance lp = build_min_beta_lp(alpha0, sys);
  const LPSolution sol = solve(lp, SolveRoute::Auto, options);
  MinBetaResult out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status == LPStatus::Optimal) out.beta = sol.objective;
  return out;
}

std::vector<Rational> make_grid(const Rational& from, const Rational& to, const Rational& step) {
  if (step <= 0) throw std::domain_error("grid step must be positive");
  std::vector<Rational> grid;
  for (Rational a = from; a <= to; a += step) grid.push_back(a);
  return grid;
}

std::vector<RatePoint> sweep_curve(std::span<const Rational> grid, const ReducedSystem& sys, unsigned threads) {
  std::vector<RatePoint> curve(grid.size());
  if (grid.empty()) return curve;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        const MinBetaResult r = min_beta(grid[k], sys);
        curve[k] = RatePoint{grid[k], r.beta, r.status};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return curve;
}

FacetCandidate FacetCandidate::normalized() const {
  if (gamma_alpha < 0 || gamma_beta < 0 || gamma_B < 0) throw std::domain_error("facet coefficients must be nonnegative");
  if (all_zero()) return *this;
  BigInt lcm = 1;
  for (const Rational* v : {&gamma_alpha, &gamma_beta, &gamma_B}) lcm = boost::multiprecision::lcm(lcm, BigInt(denominator(*v)));
  BigInt g = 0;
  for (const Rational* v : {&gamma_alpha, &gamma_beta, &gamma_B}) g = boost::multiprecision::gcd(g, BigInt(numerator(*v * lcm)));
  const Rational scale = Rational(lcm) / Rational(g);
  return FacetCandidate{gamma_alpha * scale, gamma_beta * scale, gamma_B * scale};
}

std::string FacetCandidate::to_string() const {
  return regen::to_string(gamma_alpha) + "," + regen::to_string(gamma_beta) + "," + regen::to_string(gamma_B);
}

FacetCandidate FacetCandidate::parse(std::string_view text) {
  std::vector<Rational> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    const std::string_view piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    const Rational v = parse_rational(piece);
    if (!is_integer(v) || v < 0) throw std::invalid_argument("facet entries must be nonnegative integers");
    parts.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw std::invalid_argument("facet must have three entries a,b,c");
  return FacetCandidate{parts[0], parts[1], parts[2]};
}

namespace {

bool collinear(const RatePoint& p, const RatePoint& q, const RatePoint& r) {
  return (q.alpha_bar - p.alpha_bar) * (r.beta_bar - p.beta_bar) ==
         (q.beta_bar - p.beta_bar) * (r.alpha_bar - p.alpha_bar);
}

}  // namespace

std::vector<FacetCandidate> candidate_facets(std::span<const RatePoint> curve) {
  std::vector<RatePoint> pts;
  for (const RatePoint& p : curve) {
    if (p.status != LPStatus::Optimal) continue;
    if (!pts.empty() && pts.back().alpha_bar == p.alpha_bar && pts.back().beta_bar == p.beta_bar) continue;
    pts.push_back(p);
  }
  if (pts.size() < 2) throw std::domain_error("candidate_facets needs at least two distinct feasible points");

  std::vector<FacetCandidate> out;
  std::size_t start = 0;
  while (start + 1 < pts.size()) {
    std::size_t end = start + 1;
    while (end + 1 < pts.size() && collinear(pts[start], pts[start + 1], pts[end + 1])) ++end;
    const RatePoint& p = pts[start];
    const RatePoint& q = pts[end];
    // Line through p and q, oriented so the curve lies on the >= side.
    Rational ga = p.beta_bar - q.beta_bar;
    Rational gb = q.alpha_bar - p.alpha_bar;
    if (gb < 0 || (gb == 0 && ga < 0)) {
      ga = -ga;
      gb = -gb;
    }
    const Rational gB = ga * p.alpha_bar + gb * p.beta_bar;
    if (ga >= 0 && gb >= 0 && gB >= 0) {
      const FacetCandidate f = FacetCandidate{ga, gb, gB}.normalized();
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
    start = end;
  }
  return out;
}

std::vector<FacetCandidate> region_facets() {
  return {{3, 0, 1}, {2, 1, 1}, {4, 6, 3}, {0, 6, 1}};
}

std::vector<FacetCandidate> cut_set_facets() {
  return {{3, 0, 1}, {2, 1, 1}, {1, 3, 1}, {0, 6, 1}};
}

Rational region_min_beta(const Rational& a) {
  return std::max({Rational(1) - 2 * a, (Rational(3) - 4 * a) / 6, Rational(1, 6)});
}

Rational cut_set_value(const Rational& a, const Rational& b) {
  Rational sum(0);
  for (int i = 0; i <= 2; ++i) sum += std::min(a, (3 - i) * b);
  return sum;
}

namespace {

std::string decimal(const Rational& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", to_double(v));
  return buf;
}

}  // namespace

std::string curve_to_csv(std::span<const RatePoint> curve) {
  std::ostringstream os;
  os << "alpha,beta,alpha_decimal,beta_decimal,status\n";
  for (const RatePoint& p : curve) {
    const bool ok = p.status == LPStatus::Optimal;
    os << to_string(p.alpha_bar) << ',' << (ok ? to_string(p.beta_bar) : "") << ',' << decimal(p.alpha_bar) << ','
       << (ok ? decimal(p.beta_bar) : "") << ',' << status_name(p.status) << '\n';
  }
  return os.str();
}

nlohmann::json curve_to_json(std::span<const RatePoint> curve, std::span<const FacetCandidate> facets) {
  auto line_json = [](const FacetCandidate& f) {
    return nlohmann::json{{"gamma_alpha", to_string(f.gamma_alpha)},
                          {"gamma_beta", to_string(f.gamma_beta)},
                          {"gamma_B", to_string(f.gamma_B)}};
  };
  nlohmann::json doc;
  doc["curve"] = nlohmann::json::array();
  for (const RatePoint& p : curve) {
    nlohmann::json e{{"alpha", to_string(p.alpha_bar)}, {"status", status_name(p.status)}};
    if (p.status == LPStatus::Optimal) {
      e["beta"] = to_string(p.beta_bar);
      e["beta_decimal"] = to_double(p.beta_bar);
    } else {
      e["beta"] = nullptr;
    }
    e["alpha_decimal"] = to_double(p.alpha_bar);
    doc["curve"].push_back(std::move(e));
  }
  doc["facet_candidates"] = nlohmann::json::array();
  for (const auto& f : facets) doc["facet_candidates"].push_back(line_json(f));
  doc["cut_set_lines"] = nlohmann::json::array();
  for (const auto& f : cut_set_facets()) doc["cut_set_lines"].push_back(line_json(f));
  doc["region_lines"] = nlohmann::json::array();
  for (const auto& f : region_facets()) doc["region_lines"].push_back(line_json(f));
  return doc;
}

}  // namespace regen
