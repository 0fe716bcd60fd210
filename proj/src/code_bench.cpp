#include "regen/code_bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace regen {

Bits bits_from_uint(std::uint64_t value, int width) {
  Bits out(static_cast<std::size_t>(width));
  for (int b = 0; b < width; ++b) out[static_cast<std::size_t>(b)] = (value >> b) & 1u;
  return out;
}

std::uint64_t bits_to_uint(const Bits& bits) {
  if (bits.size() > 64) throw std::domain_error("bit string wider than 64 bits");
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < bits.size(); ++b) v |= static_cast<std::uint64_t>(bits[b]) << b;
  return v;
}

std::string bits_to_string(const Bits& bits) {
  std::string s;
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

CodeKind parse_code_kind(std::string_view text) {
  if (text == "msr" || text == "MSR") return CodeKind::MSR;
  if (text == "mbr" || text == "MBR") return CodeKind::MBR;
  if (text == "interior" || text == "INTERIOR") return CodeKind::Interior;
  throw std::invalid_argument("unknown code kind '" + std::string(text) + "'");
}

std::string_view code_kind_name(CodeKind kind) {
  switch (kind) {
    case CodeKind::MSR: return "msr";
    case CodeKind::MBR: return "mbr";
    case CodeKind::Interior: return "interior";
  }
  return "?";
}

namespace {

void check_node(int node) {
  if (node < 1 || node > kNodes) throw std::domain_error("node id must be in 1..4");
}

void check_pair(int helper, int target) {
  check_node(helper);
  check_node(target);
  if (helper == target) throw std::domain_error("a node cannot help itself");
}

// Helpers of `target` in ascending order.
NodeTriple helpers_of(int target) {
  NodeTriple h{};
  int k = 0;
  for (int n = 1; n <= kNodes; ++n) {
    if (n != target) h[static_cast<std::size_t>(k++)] = n;
  }
  return h;
}

int missing_node(const NodeTriple& nodes) {
  int sum = 0;
  for (int n : nodes) sum += n;
  return 10 - sum;
}

// Rebuilds the node outside the triple by repair, giving all four contents.
NodeContents complete_by_repair(const ConcreteCode& code, const NodeTriple& nodes, const TripleValues& contents) {
  const int f = missing_node(nodes);
  TripleValues msgs;
  for (std::size_t k = 0; k < 3; ++k) msgs[k] = code.repair_send(nodes[k], f, contents[k]);
  NodeContents all;
  for (std::size_t k = 0; k < 3; ++k) all[static_cast<std::size_t>(nodes[k] - 1)] = contents[k];
  all[static_cast<std::size_t>(f - 1)] = code.repair_decode(f, msgs);
  return all;
}

ConcreteCode msr_code() {
  ConcreteCode c;
  c.name = "msr";
  c.B_bits = 3;
  c.alpha_bits = 1;
  c.beta_bits = 1;
  c.encode = [](const Bits& m) {
    return NodeContents{Bits{m[0]}, Bits{m[1]}, Bits{m[2]}, Bits{static_cast<bool>(m[0] ^ m[1] ^ m[2])}};
  };
  c.repair_send = [](int helper, int target, const Bits& content) {
    check_pair(helper, target);
    return content;
  };
  c.repair_decode = [](int, const TripleValues& msgs) {
    return Bits{static_cast<bool>(msgs[0][0] ^ msgs[1][0] ^ msgs[2][0])};
  };
  auto self = std::make_shared<ConcreteCode>(c);
  c.decode = [self](const NodeTriple& nodes, const TripleValues& contents) {
    const NodeContents all = complete_by_repair(*self, nodes, contents);
    return Bits{all[0][0], all[1][0], all[2][0]};
  };
  return c;
}

// Pair bits in the order 12,13,14,23,24,34.
int pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int table[5][5] = {{}, {0, 0, 0, 1, 2}, {0, 0, 0, 3, 4}, {0, 0, 0, 0, 5}, {}};
  return table[i][j];
}

// Position of `partner` among the three partners of `node`, ascending.
int partner_slot(int node, int partner) { return partner < node ? partner - 1 : partner - 2; }

ConcreteCode mbr_code() {
  ConcreteCode c;
  c.name = "mbr";
  c.B_bits = 6;
  c.alpha_bits = 3;
  c.beta_bits = 1;
  c.encode = [](const Bits& m) {
    NodeContents out;
    for (int i = 1; i <= kNodes; ++i) {
      for (int j : helpers_of(i)) out[static_cast<std::size_t>(i - 1)].push_back(m[static_cast<std::size_t>(pair_index(i, j))]);
    }
    return out;
  };
  c.repair_send = [](int helper, int target, const Bits& content) {
    check_pair(helper, target);
    return Bits{content[static_cast<std::size_t>(partner_slot(helper, target))]};
  };
  c.repair_decode = [](int, const TripleValues& msgs) { return Bits{msgs[0][0], msgs[1][0], msgs[2][0]}; };
  c.decode = [](const NodeTriple& nodes, const TripleValues& contents) {
    Bits m(6);
    for (int i = 1; i <= kNodes; ++i) {
      for (int j = i + 1; j <= kNodes; ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
          const int n = nodes[k];
          if (n != i && n != j) continue;
          m[static_cast<std::size_t>(pair_index(i, j))] = contents[k][static_cast<std::size_t>(partner_slot(n, n == i ? j : i))];
          break;
        }
      }
    }
    return m;
  };
  return c;
}

// Message bit order x1 x2 y1 y2 z1 z2 t1 t2; letter L of node n is n-1.
ConcreteCode interior_code() {
  ConcreteCode c;
  c.name = "interior";
  c.B_bits = 8;
  c.alpha_bits = 3;
  c.beta_bits = 2;
  c.encode = [](const Bits& m) {
    auto bit = [&](int letter, int sub) { return m[static_cast<std::size_t>(2 * (letter % 4) + sub)]; };
    NodeContents out;
    for (int p = 0; p < kNodes; ++p) {
      const bool parity = bit(p + 1, 0) ^ bit(p + 2, 1) ^ bit(p + 3, 0) ^ bit(p + 3, 1);
      out[static_cast<std::size_t>(p)] = Bits{bit(p, 0), bit(p, 1), parity};
    }
    return out;
  };
  c.repair_send = [](int helper, int target, const Bits& cont) {
    check_pair(helper, target);
    const bool all = cont[0] ^ cont[1] ^ cont[2];
    switch ((helper - target + kNodes) % kNodes) {
      case 1: return Bits{cont[0], all};
      case 2: return Bits{cont[1], all};
      default: return Bits{static_cast<bool>(cont[0] ^ cont[1]), static_cast<bool>(cont[1] ^ cont[2])};
    }
  };
  c.repair_decode = [](int target, const TripleValues& msgs) {
    std::array<Bits, 4> by_offset;
    const NodeTriple helpers = helpers_of(target);
    for (std::size_t k = 0; k < 3; ++k) by_offset[static_cast<std::size_t>((helpers[k] - target + kNodes) % kNodes)] = msgs[k];
    const Bits& a = by_offset[1];
    const Bits& b = by_offset[2];
    const Bits& d = by_offset[3];
    return Bits{static_cast<bool>(a[1] ^ b[0] ^ b[1] ^ d[0]), static_cast<bool>(a[1] ^ b[0] ^ a[0] ^ d[1]),
                static_cast<bool>(a[0] ^ b[0] ^ d[0])};
  };
  auto self = std::make_shared<ConcreteCode>(c);
  c.decode = [self](const NodeTriple& nodes, const TripleValues& contents) {
    const NodeContents all = complete_by_repair(*self, nodes, contents);
    Bits m;
    for (const Bits& node : all) {
      m.push_back(node[0]);
      m.push_back(node[1]);
    }
    return m;
  };
  return c;
}

}  // namespace

ConcreteCode build_code(CodeKind kind) {
  switch (kind) {
    case CodeKind::MSR: return msr_code();
    case CodeKind::MBR: return mbr_code();
    case CodeKind::Interior: return interior_code();
  }
  throw std::domain_error("unknown code kind");
}

ConcreteCode replication_code() {
  ConcreteCode c;
  c.name = "replication";
  c.B_bits = 1;
  c.alpha_bits = 1;
  c.beta_bits = 1;
  c.encode = [](const Bits& m) { return NodeContents{m, m, m, m}; };
  c.repair_send = [](int helper, int target, const Bits& content) {
    check_pair(helper, target);
    return content;
  };
  c.repair_decode = [](int, const TripleValues& msgs) { return msgs[0]; };
  c.decode = [](const NodeTriple&, const TripleValues& contents) { return contents[0]; };
  return c;
}

Bits reconstruct(const ConcreteCode& code, NodeTriple nodes, const TripleValues& contents) {
  std::array<std::size_t, 3> order{0, 1, 2};
  for (int n : nodes) check_node(n);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
  NodeTriple sorted_nodes;
  TripleValues sorted_contents;
  for (std::size_t k = 0; k < 3; ++k) {
    sorted_nodes[k] = nodes[order[k]];
    sorted_contents[k] = contents[order[k]];
  }
  if (sorted_nodes[0] == sorted_nodes[1] || sorted_nodes[1] == sorted_nodes[2]) {
    throw std::domain_error("reconstruction needs three distinct nodes");
  }
  for (const Bits& c : sorted_contents) {
    if (static_cast<int>(c.size()) != code.alpha_bits) throw std::domain_error("node content has the wrong length");
  }
  Bits m = code.decode(sorted_nodes, sorted_contents);
  if (static_cast<int>(m.size()) != code.B_bits) throw DecodeError("decoder returned a message of the wrong length");
  const NodeContents check = code.encode(m);
  for (std::size_t k = 0; k < 3; ++k) {
    if (check[static_cast<std::size_t>(sorted_nodes[k] - 1)] != sorted_contents[k]) {
      throw DecodeError("contents are not a codeword restriction");
    }
  }
  return m;
}

Bits repair(const ConcreteCode& code, int failed, const TripleValues& messages) {
  check_node(failed);
  for (const Bits& m : messages) {
    if (static_cast<int>(m.size()) != code.beta_bits) throw std::domain_error("repair message has the wrong length");
  }
  return code.repair_decode(failed, messages);
}

ConcreteCode symmetrize(const ConcreteCode& base_code) {
  auto base = std::make_shared<const ConcreteCode>(base_code);
  std::vector<NodePermutation> sigma;
  for (const NodePermutation& p : NodePermutation::all()) sigma.push_back(p.inverse());
  const auto blocks = sigma.size();
  const auto B = static_cast<std::size_t>(base->B_bits);
  const auto A = static_cast<std::size_t>(base->alpha_bits);
  const auto S = static_cast<std::size_t>(base->beta_bits);
  auto chunk = [](const Bits& v, std::size_t k, std::size_t width) {
    return Bits(v.begin() + static_cast<std::ptrdiff_t>(k * width), v.begin() + static_cast<std::ptrdiff_t>((k + 1) * width));
  };
  auto append = [](Bits& out, const Bits& part) { out.insert(out.end(), part.begin(), part.end()); };

  ConcreteCode c;
  c.name = "sym(" + base->name + ")";
  c.B_bits = base->B_bits * static_cast<int>(blocks);
  c.alpha_bits = base->alpha_bits * static_cast<int>(blocks);
  c.beta_bits = base->beta_bits * static_cast<int>(blocks);
  for (const NodePermutation& s : sigma) c.blocks.push_back({base, s});

  c.encode = [=](const Bits& m) {
    NodeContents out;
    for (std::size_t k = 0; k < blocks; ++k) {
      const NodeContents part = base->encode(chunk(m, k, B));
      for (int i = 1; i <= kNodes; ++i) append(out[static_cast<std::size_t>(i - 1)], part[static_cast<std::size_t>(sigma[k](i) - 1)]);
    }
    return out;
  };
  c.repair_send = [=](int helper, int target, const Bits& content) {
    check_pair(helper, target);
    Bits out;
    for (std::size_t k = 0; k < blocks; ++k) append(out, base->repair_send(sigma[k](helper), sigma[k](target), chunk(content, k, A)));
    return out;
  };
  // Reorders per-node values of a product triple into the base code's ascending order.
  auto to_base = [](const NodePermutation& s, const NodeTriple& nodes, const TripleValues& parts) {
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s(nodes[a]) < s(nodes[b]); });
    std::pair<NodeTriple, TripleValues> out;
    for (std::size_t j = 0; j < 3; ++j) {
      out.first[j] = s(nodes[order[j]]);
      out.second[j] = parts[order[j]];
    }
    return out;
  };
  c.repair_decode = [=](int target, const TripleValues& msgs) {
    const NodeTriple helpers = helpers_of(target);
    Bits out;
    for (std::size_t k = 0; k < blocks; ++k) {
      TripleValues parts;
      for (std::size_t j = 0; j < 3; ++j) parts[j] = chunk(msgs[j], k, S);
      append(out, base->repair_decode(sigma[k](target), to_base(sigma[k], helpers, parts).second));
    }
    return out;
  };
  c.decode = [=](const NodeTriple& nodes, const TripleValues& contents) {
    Bits out;
    for (std::size_t k = 0; k < blocks; ++k) {
      TripleValues parts;
      for (std::size_t j = 0; j < 3; ++j) parts[j] = chunk(contents[j], k, A);
      const auto [base_nodes, base_parts] = to_base(sigma[k], nodes, parts);
      append(out, base->decode(base_nodes, base_parts));
    }
    return out;
  };
  return c;
}

// ---------------------------------------------------------------------------
// Verification

std::string CodeReport::to_string() const {
  std::ostringstream os;
  os << code << ": " << (passed ? "PASS" : "FAIL") << " over " << messages << (exhaustive ? " messages (exhaustive)" : " sampled messages")
     << ", " << reconstructions << " reconstructions, " << repairs << " repairs";
  if (counterexample) os << "\n  counterexample: " << *counterexample;
  return os.str();
}

nlohmann::json CodeReport::to_json() const {
  nlohmann::json j{{"code", code},          {"passed", passed},   {"exhaustive", exhaustive},
                   {"messages", messages},  {"reconstructions", reconstructions}, {"repairs", repairs}};
  j["counterexample"] = counterexample ? nlohmann::json(*counterexample) : nlohmann::json(nullptr);
  return j;
}

namespace {

std::optional<std::string> check_message(const ConcreteCode& code, const Bits& m) {
  const std::string tag = "message " + bits_to_string(m) + ": ";
  NodeContents contents;
  try {
    contents = code.encode(m);
  } catch (const std::exception& e) {
    return tag + "encode failed (" + e.what() + ")";
  }
  for (int n = 1; n <= kNodes; ++n) {
    if (static_cast<int>(contents[static_cast<std::size_t>(n - 1)].size()) != code.alpha_bits) {
      return tag + "node " + std::to_string(n) + " content has the wrong length";
    }
  }
  for (int f = 1; f <= kNodes; ++f) {
    const NodeTriple nodes = helpers_of(f);
    TripleValues sub;
    for (std::size_t k = 0; k < 3; ++k) sub[k] = contents[static_cast<std::size_t>(nodes[k] - 1)];
    const std::string where = "{" + std::to_string(nodes[0]) + "," + std::to_string(nodes[1]) + "," + std::to_string(nodes[2]) + "}";
    try {
      const Bits got = reconstruct(code, nodes, sub);
      if (got != m) return tag + "reconstruction from " + where + " returned " + bits_to_string(got);
    } catch (const std::exception& e) {
      return tag + "reconstruction from " + where + " failed (" + e.what() + ")";
    }
  }
  for (int f = 1; f <= kNodes; ++f) {
    const NodeTriple helpers = helpers_of(f);
    try {
      TripleValues msgs;
      for (std::size_t k = 0; k < 3; ++k) msgs[k] = code.repair_send(helpers[k], f, contents[static_cast<std::size_t>(helpers[k] - 1)]);
      const Bits got = repair(code, f, msgs);
      if (got != contents[static_cast<std::size_t>(f - 1)]) {
        return tag + "repair of node " + std::to_string(f) + " gave " + bits_to_string(got) + ", expected " +
               bits_to_string(contents[static_cast<std::size_t>(f - 1)]);
      }
    } catch (const std::exception& e) {
      return tag + "repair of node " + std::to_string(f) + " failed (" + e.what() + ")";
    }
  }
  return std::nullopt;
}

unsigned resolve_threads(unsigned threads) {
  return threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
}

// Runs body(i) for i in [0, count) on a pool; body returns false to report a
// failure at i. Returns the smallest failing index, if any.
template <typename Body>
std::optional<std::uint64_t> parallel_first_failure(std::uint64_t count, unsigned threads, Body body) {
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> first_failure{count};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= count || begin >= first_failure.load()) return;
      const std::uint64_t end = std::min(count, begin + kChunk);
      for (std::uint64_t i = begin; i < end; ++i) {
        if (!body(i)) {
          std::uint64_t cur = first_failure.load();
          while (i < cur && !first_failure.compare_exchange_weak(cur, i)) {
          }
          break;
        }
      }
    }
  };
  threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(1, count / kChunk)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_failure.load() < count) return first_failure.load();
  return std::nullopt;
}

Bits random_message(std::mt19937_64& rng, int width) {
  Bits m(static_cast<std::size_t>(width));
  for (int b = 0; b < width; ++b) m[static_cast<std::size_t>(b)] = (rng() >> 17) & 1u;
  return m;
}

}  // namespace

CodeReport verify_code(const ConcreteCode& code, const VerifyOptions& options) {
  CodeReport report;
  report.code = code.name;
  report.exhaustive = code.B_bits <= options.exhaustive_max_bits && code.B_bits <= 24;
  std::vector<Bits> samples;
  if (report.exhaustive) {
    report.messages = std::uint64_t{1} << code.B_bits;
  } else {
    std::mt19937_64 rng(options.seed);
    for (std::size_t k = 0; k < options.samples; ++k) samples.push_back(random_message(rng, code.B_bits));
    report.messages = samples.size();
  }
  auto message_at = [&](std::uint64_t i) { return report.exhaustive ? bits_from_uint(i, code.B_bits) : samples[i]; };
  const auto failure = parallel_first_failure(report.messages, options.threads,
                                              [&](std::uint64_t i) { return !check_message(code, message_at(i)); });
  report.reconstructions = report.messages * kNodes;
  report.repairs = report.messages * kNodes;
  report.passed = !failure;
  if (failure) report.counterexample = check_message(code, message_at(*failure));
  return report;
}

// ---------------------------------------------------------------------------
// Entropy vectors

std::optional<Rational> EntropyVector::exact_bits(RVSubset s) const {
  const BigInt& v = support_of(s);
  if (v <= 0 || (v & (v - 1)) != 0) return std::nullopt;
  return Rational(static_cast<long>(boost::multiprecision::msb(v)));
}

double EntropyVector::bits(RVSubset s) const {
  if (auto e = exact_bits(s)) return to_double(*e);
  return std::log2(support_of(s).convert_to<double>());
}

nlohmann::json EntropyVector::to_json() const {
  nlohmann::json doc{{"code", code}, {"B_bits", B_bits}};
  nlohmann::json entries = nlohmann::json::object();
  for (std::uint32_t e = 1; e < kSubsetCount; ++e) entries[std::to_string(e)] = nlohmann::json::array({support[e].str(), B_bits});
  doc["support"] = std::move(entries);
  return doc;
}

EntropyVector EntropyVector::from_json(const nlohmann::json& doc) {
  EntropyVector v;
  v.code = doc.value("code", std::string());
  v.B_bits = doc.at("B_bits").get<int>();
  v.support.assign(kSubsetCount, BigInt(0));
  v.support[0] = 1;
  const auto& entries = doc.at("support");
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    const unsigned long e = std::stoul(it.key());
    if (e == 0 || e >= kSubsetCount) throw std::invalid_argument("subset encoding out of range: " + it.key());
    const auto& val = it.value();
    const auto& s = val.is_array() ? val.at(0) : val;
    v.support[e] = s.is_string() ? BigInt(s.get<std::string>()) : BigInt(s.get<std::uint64_t>());
  }
  for (std::uint32_t e = 1; e < kSubsetCount; ++e) {
    if (v.support[e] <= 0) throw std::invalid_argument("entropy vector is missing subset " + std::to_string(e));
  }
  return v;
}

namespace {

EntropyVector atomic_entropy_vector(const ConcreteCode& code, unsigned threads) {
  if (code.B_bits > 24) throw std::domain_error("entropy_vector enumerates at most 2^24 messages");
  const int widths_total = kNodes * code.alpha_bits + kNodes * (kNodes - 1) * code.beta_bits;
  if (widths_total > 64) throw std::domain_error("entropy_vector needs all 16 variables to fit 64 bits");
  const std::uint64_t count = std::uint64_t{1} << code.B_bits;

  // values[m * 16 + position]
  std::vector<std::uint64_t> values(count * kVariables);
  for (std::uint64_t m = 0; m < count; ++m) {
    const NodeContents w = code.encode(bits_from_uint(m, code.B_bits));
    for (int p = 0; p < kVariables; ++p) {
      const RandomVar v = RandomVar::at(p);
      const std::uint64_t val =
          v.kind() == RandomVar::Kind::Node
              ? bits_to_uint(w[static_cast<std::size_t>(v.from() - 1)])
              : bits_to_uint(code.repair_send(v.from(), v.to(), w[static_cast<std::size_t>(v.from() - 1)]));
      values[m * kVariables + static_cast<std::uint64_t>(p)] = val;
    }
  }
  std::array<int, kVariables> width{};
  for (int p = 0; p < kVariables; ++p) width[static_cast<std::size_t>(p)] = p < kNodes ? code.alpha_bits : code.beta_bits;

  EntropyVector vec;
  vec.code = code.name;
  vec.B_bits = code.B_bits;
  vec.support.assign(kSubsetCount, BigInt(1));
  std::vector<std::uint64_t> sizes(kSubsetCount, 1);
  std::atomic<std::uint32_t> next{1};
  std::atomic<bool> non_uniform{false};
  auto worker = [&] {
    std::vector<std::uint64_t> keys(count);
    for (std::uint32_t e = next++; e < kSubsetCount; e = next++) {
      for (std::uint64_t m = 0; m < count; ++m) {
        std::uint64_t key = 0;
        int shift = 0;
        for (int p = 0; p < kVariables; ++p) {
          if (!((e >> p) & 1u)) continue;
          key |= values[m * kVariables + static_cast<std::uint64_t>(p)] << shift;
          shift += width[static_cast<std::size_t>(p)];
        }
        keys[m] = key;
      }
      std::sort(keys.begin(), keys.end());
      std::uint64_t distinct = 0;
      std::uint64_t run_length = 0;
      for (std::uint64_t i = 0; i < count;) {
        std::uint64_t j = i;
        while (j < count && keys[j] == keys[i]) ++j;
        if (run_length == 0) run_length = j - i;
        if (j - i != run_length) non_uniform = true;
        ++distinct;
        i = j;
      }
      sizes[e] = distinct;
    }
  };
  threads = resolve_threads(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (non_uniform) throw std::domain_error("induced distribution is not uniform on its support");
  for (std::uint32_t e = 1; e < kSubsetCount; ++e) vec.support[e] = sizes[e];
  return vec;
}

}  // namespace

EntropyVector entropy_vector(const ConcreteCode& code, unsigned threads) {
  if (code.blocks.empty()) return atomic_entropy_vector(code, threads);
  std::vector<std::pair<const ConcreteCode*, EntropyVector>> cache;
  EntropyVector vec;
  vec.code = code.name;
  vec.B_bits = code.B_bits;
  vec.support.assign(kSubsetCount, BigInt(1));
  for (const CodeBlock& block : code.blocks) {
    auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& c) { return c.first == block.base.get(); });
    if (it == cache.end()) {
      cache.emplace_back(block.base.get(), entropy_vector(*block.base, threads));
      it = cache.end() - 1;
    }
    const EntropyVector& base = it->second;
    for (std::uint32_t e = 1; e < kSubsetCount; ++e) {
      vec.support[e] *= base.support_of(apply_permutation(RVSubset(static_cast<std::uint16_t>(e)), block.to_base));
    }
  }
  return vec;
}

namespace {

// prod over the 24 permutations of support(pi(rep)).
BigInt orbit_product(const EntropyVector& vec, RVSubset rep) {
  BigInt prod = 1;
  for (const NodePermutation& p : NodePermutation::all()) prod *= vec.support_of(apply_permutation(rep, p));
  return prod;
}

}  // namespace

VectorCheck check_vector(const EntropyVector& vec, const ReducedSystem& sys) {
  const ClassTable& table = *sys.table;
  std::vector<BigInt> orbit(table.symbol_count());
  for (std::size_t s = 0; s < orbit.size(); ++s) {
    orbit[s] = orbit_product(vec, table.info(table.class_of_symbol(static_cast<SymbolId>(s))).representative);
  }
  VectorCheck out;
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    const ConstraintRow& row = sys.rows[r];
    BigInt lcm = 1;
    for (const auto& [sym, c] : row.form.terms()) lcm = boost::multiprecision::lcm(lcm, BigInt(denominator(c)));
    BigInt lhs = 1;
    BigInt rhs = 1;
    for (const auto& [sym, c] : row.form.terms()) {
      const BigInt k = BigInt(numerator(c * Rational(lcm)));
      const auto e = static_cast<unsigned>(boost::multiprecision::abs(k).convert_to<unsigned long>());
      (k > 0 ? lhs : rhs) *= boost::multiprecision::pow(orbit[static_cast<std::size_t>(sym)], e);
    }
    if (row.form.constant() != 0) {
      // A constant c contributes 2^(24 c) to the averaged product.
      const Rational scaled = row.form.constant() * Rational(lcm) * 24;
      if (!is_integer(scaled)) throw std::domain_error("check_vector: non-integral constant term");
      const BigInt k = numerator(scaled);
      const auto e = static_cast<unsigned>(boost::multiprecision::abs(k).convert_to<unsigned long>());
      (k > 0 ? lhs : rhs) *= boost::multiprecision::pow(BigInt(2), e);
    }
    const bool ok = row.sense == Sense::EqualZero ? lhs == rhs : lhs >= rhs;
    if (!ok) out.violated_rows.push_back(r);
    ++out.rows_checked;
  }
  return out;
}

std::optional<Rational> evaluate_form(const LinearForm& form, const EntropyVector& vec, const ClassTable& table) {
  Rational total = form.constant();
  for (const auto& [sym, c] : form.terms()) {
    const RVSubset rep = table.info(table.class_of_symbol(sym)).representative;
    Rational mean(0);
    for (const NodePermutation& p : NodePermutation::all()) {
      const auto b = vec.exact_bits(apply_permutation(rep, p));
      if (!b) return std::nullopt;
      mean += *b;
    }
    total += c * mean / 24;
  }
  return total;
}

PolymatroidCheck check_polymatroid(const EntropyVector& vec) {
  PolymatroidCheck out;
  const auto& s = vec.support;
  for (std::uint32_t e = 0; e < kSubsetCount; ++e) {
    for (int p = 0; p < kVariables; ++p) {
      if ((e >> p) & 1u) continue;
      if (s[e] > s[e | (1u << p)]) ++out.monotone_violations;
    }
  }
  const BigInt& top = s[kSubsetCount - 1];
  for (std::uint32_t e = 1; e < kSubsetCount; ++e) {
    if (closure(RVSubset(static_cast<std::uint16_t>(e))).node_count() >= 3 && s[e] != top) ++out.total_information_violations;
  }
  // Elemental submodularity: s(iK) s(jK) >= s(ijK) s(K).
  const bool small = top < BigInt(std::numeric_limits<std::uint64_t>::max());
  std::vector<std::uint64_t> fast;
  if (small) {
    fast.resize(kSubsetCount);
    for (std::uint32_t e = 0; e < kSubsetCount; ++e) fast[e] = s[e].convert_to<std::uint64_t>();
  }
  for (int i = 0; i < kVariables; ++i) {
    for (int j = i + 1; j < kVariables; ++j) {
      const std::uint32_t rest = 0xFFFFu & ~((1u << i) | (1u << j));
      // Enumerate every K within `rest`.
      for (std::uint32_t k = rest;; k = (k - 1) & rest) {
        const std::uint32_t ik = k | (1u << i);
        const std::uint32_t jk = k | (1u << j);
        const std::uint32_t ijk = ik | jk;
        bool ok;
        if (small) {
          ok = static_cast<unsigned __int128>(fast[ik]) * fast[jk] >= static_cast<unsigned __int128>(fast[ijk]) * fast[k];
        } else {
          ok = s[ik] * s[jk] >= s[ijk] * s[k];
        }
        if (!ok) ++out.submodular_violations;
        if (k == 0) break;
      }
    }
  }
  return out;
}

bool is_symmetric(const EntropyVector& vec) {
  for (std::uint32_t e = 1; e < kSubsetCount; ++e) {
    const RVSubset a(static_cast<std::uint16_t>(e));
    for (const NodePermutation& p : NodePermutation::all()) {
      if (vec.support_of(apply_permutation(a, p)) != vec.support_of(a)) return false;
    }
  }
  return true;
}

}  // namespace regen
