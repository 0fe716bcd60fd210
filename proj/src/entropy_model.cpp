#include "regen/entropy_model.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace regen {

namespace {

void check_node(int node) {
  if (node < 1 || node > kNodes) {
    throw std::domain_error("node id out of range: " + std::to_string(node));
  }
}

int repair_position(int from, int to) {
  return 4 + (from - 1) * 3 + (to < from ? to - 1 : to - 2);
}

// Out-set {S_{i,.}} and in-set {S_{.,i}} masks per node.
struct Masks {
  std::array<std::uint16_t, kNodes> out{};
  std::array<std::uint16_t, kNodes> in{};
  Masks() {
    for (int i = 1; i <= kNodes; ++i) {
      for (int j = 1; j <= kNodes; ++j) {
        if (i == j) continue;
        out[i - 1] |= static_cast<std::uint16_t>(1u << repair_position(i, j));
        in[j - 1] |= static_cast<std::uint16_t>(1u << repair_position(i, j));
      }
    }
  }
};

const Masks& masks() {
  static const Masks m;
  return m;
}

// Byte-wise lookup tables so a permutation acts on an encoding in two loads.
struct PermutationTables {
  std::array<std::array<std::uint16_t, 256>, 24> low{};
  std::array<std::array<std::uint16_t, 256>, 24> high{};

  PermutationTables() {
    const auto& perms = NodePermutation::all();
    for (std::size_t k = 0; k < perms.size(); ++k) {
      std::array<int, kVariables> target{};
      for (int p = 0; p < kVariables; ++p) {
        const RandomVar v = RandomVar::at(p);
        target[p] = v.kind() == RandomVar::Kind::Node
                        ? RandomVar::W(perms[k](v.from())).position()
                        : RandomVar::S(perms[k](v.from()), perms[k](v.to())).position();
      }
      for (unsigned byte = 0; byte < 256; ++byte) {
        std::uint16_t lo = 0;
        std::uint16_t hi = 0;
        for (int b = 0; b < 8; ++b) {
          if ((byte >> b) & 1u) {
            lo |= static_cast<std::uint16_t>(1u << target[b]);
            hi |= static_cast<std::uint16_t>(1u << target[b + 8]);
          }
        }
        low[k][byte] = lo;
        high[k][byte] = hi;
      }
    }
  }

  std::uint16_t apply(std::size_t k, std::uint16_t bits) const {
    return low[k][bits & 0xFFu] | high[k][bits >> 8];
  }
};

const PermutationTables& permutation_tables() {
  static const PermutationTables t;
  return t;
}

std::size_t permutation_index(const NodePermutation& p) {
  const auto& perms = NodePermutation::all();
  return static_cast<std::size_t>(std::find(perms.begin(), perms.end(), p) - perms.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// RandomVar

RandomVar RandomVar::W(int node) {
  check_node(node);
  return RandomVar(Kind::Node, node, 0);
}

RandomVar RandomVar::S(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) {
    throw std::domain_error("S_{i,i} is not a random variable of the problem");
  }
  return RandomVar(Kind::Repair, from, to);
}

RandomVar RandomVar::at(int position) {
  if (position < 0 || position >= kVariables) {
    throw std::domain_error("variable position out of range: " + std::to_string(position));
  }
  if (position < 4) return W(position + 1);
  const int from = (position - 4) / 3 + 1;
  int to = (position - 4) % 3 + 1;
  if (to >= from) ++to;
  return S(from, to);
}

int RandomVar::position() const {
  return kind_ == Kind::Node ? from_ - 1 : repair_position(from_, to_);
}

std::string RandomVar::name() const {
  if (kind_ == Kind::Node) return "W" + std::to_string(from_);
  return "S" + std::to_string(from_) + std::to_string(to_);
}

// ---------------------------------------------------------------------------
// RVSubset

RVSubset::RVSubset(std::initializer_list<RandomVar> vars) {
  for (const auto& v : vars) bits_ |= static_cast<std::uint16_t>(1u << v.position());
}

int RVSubset::size() const { return std::popcount(bits_); }

int RVSubset::node_count() const { return std::popcount(static_cast<unsigned>(bits_ & 0xFu)); }

std::vector<RandomVar> RVSubset::members() const {
  std::vector<RandomVar> out;
  for (int p = 0; p < kVariables; ++p) {
    if ((bits_ >> p) & 1u) out.push_back(RandomVar::at(p));
  }
  return out;
}

std::string RVSubset::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& v : members()) {
    if (!first) out += ",";
    out += v.name();
    first = false;
  }
  return out + "}";
}

RVSubset RVSubset::parse(std::string_view text) {
  std::uint16_t bits = 0;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    RandomVar v = RandomVar::W(1);
    if (token.size() == 2 && (token[0] == 'W' || token[0] == 'w') && std::isdigit(token[1])) {
      v = RandomVar::W(token[1] - '0');
    } else if (token.size() == 3 && (token[0] == 'S' || token[0] == 's') &&
               std::isdigit(token[1]) && std::isdigit(token[2])) {
      v = RandomVar::S(token[1] - '0', token[2] - '0');
    } else {
      throw std::invalid_argument("unknown random variable '" + token + "'");
    }
    bits |= static_cast<std::uint16_t>(1u << v.position());
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '{' || c == '}' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c != '_') {
      token.push_back(c);
    }
  }
  flush();
  return RVSubset(bits);
}

// ---------------------------------------------------------------------------
// NodePermutation

NodePermutation::NodePermutation() : image_{1, 2, 3, 4} {}

NodePermutation::NodePermutation(std::array<int, kNodes> images) : image_(images) {
  std::array<bool, kNodes> seen{};
  for (int v : images) {
    check_node(v);
    if (seen[v - 1]) throw std::domain_error("node permutation is not a bijection");
    seen[v - 1] = true;
  }
}

NodePermutation NodePermutation::inverse() const {
  std::array<int, kNodes> inv{};
  for (int i = 1; i <= kNodes; ++i) inv[image_[i - 1] - 1] = i;
  return NodePermutation(inv);
}

NodePermutation NodePermutation::then(const NodePermutation& next) const {
  std::array<int, kNodes> out{};
  for (int i = 1; i <= kNodes; ++i) out[i - 1] = next((*this)(i));
  return NodePermutation(out);
}

std::string NodePermutation::to_string() const {
  std::string out = "(";
  for (int i = 1; i <= kNodes; ++i) {
    if (i > 1) out += ",";
    out += std::to_string(i) + "->" + std::to_string(image_[i - 1]);
  }
  return out + ")";
}

const std::array<NodePermutation, 24>& NodePermutation::all() {
  static const std::array<NodePermutation, 24> perms = [] {
    std::array<NodePermutation, 24> out;
    std::array<int, kNodes> p{1, 2, 3, 4};
    std::size_t k = 0;
    do {
      out[k++] = NodePermutation(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return perms;
}

// ---------------------------------------------------------------------------
// Group action and closure

RVSubset apply_permutation(RVSubset s, const NodePermutation& p) {
  return RVSubset(permutation_tables().apply(permutation_index(p), s.encoding()));
}

RVSubset closure(RVSubset s) {
  const Masks& m = masks();
  std::uint16_t bits = s.encoding();
  for (;;) {
    std::uint16_t grown = bits;
    for (int i = 0; i < kNodes; ++i) {
      if ((grown >> i) & 1u) grown |= m.out[i];
      if ((grown & m.in[i]) == m.in[i]) grown |= static_cast<std::uint16_t>(1u << i);
    }
    if (grown == bits) return RVSubset(bits);
    bits = grown;
  }
}

RVSubset canonical_key(RVSubset s) {
  const auto& t = permutation_tables();
  const std::uint16_t closed = closure(s).encoding();
  std::uint16_t best = closed;
  for (std::size_t k = 0; k < 24; ++k) best = std::min(best, t.apply(k, closed));
  return RVSubset(best);
}

std::string_view pin_name(Pin pin) {
  switch (pin) {
    case Pin::Free: return "FREE";
    case Pin::Zero: return "ZERO";
    case Pin::B: return "B";
    case Pin::Alpha: return "ALPHA";
    case Pin::Beta: return "BETA";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ClassTable

ClassId ClassTable::class_of(RVSubset s) const {
  if (s.empty()) throw std::domain_error("the empty set has no entropy class (H = 0)");
  return class_of_[s.encoding()];
}

ClassId ClassTable::class_of_symbol(SymbolId sym) const {
  if (sym < 0 || static_cast<std::size_t>(sym) >= symbol_count()) {
    throw std::out_of_range("symbol id out of range");
  }
  if (sym < 3) return pinned_ids_[static_cast<std::size_t>(sym)];
  return free_ids_[static_cast<std::size_t>(sym - 3)];
}

std::string ClassTable::symbol_name(SymbolId sym) const {
  switch (sym) {
    case kSymbolB: return "B";
    case kSymbolAlpha: return "alpha";
    case kSymbolBeta: return "beta";
    default: return "h" + std::to_string(info(class_of_symbol(sym)).representative.encoding());
  }
}

std::string ClassTable::symbol_label(SymbolId sym) const {
  if (sym < 3) return symbol_name(sym);
  std::string set = info(class_of_symbol(sym)).representative.to_string();
  return "H(" + set.substr(1, set.size() - 2) + ")";
}

void ClassTable::finalize() {
  symbol_of_class_.assign(classes_.size(), -1);
  free_ids_.clear();
  for (ClassId id = 0; id < classes_.size(); ++id) {
    switch (classes_[id].pin) {
      case Pin::B: pinned_ids_[kSymbolB] = id; symbol_of_class_[id] = kSymbolB; break;
      case Pin::Alpha: pinned_ids_[kSymbolAlpha] = id; symbol_of_class_[id] = kSymbolAlpha; break;
      case Pin::Beta: pinned_ids_[kSymbolBeta] = id; symbol_of_class_[id] = kSymbolBeta; break;
      default:
        symbol_of_class_[id] = static_cast<SymbolId>(3 + free_ids_.size());
        free_ids_.push_back(id);
        break;
    }
  }
}

ClassTable build_class_table() {
  ClassTable table;
  std::vector<std::uint16_t> key(kSubsetCount, 0);
  std::vector<std::uint16_t> reps;
  std::vector<bool> seen(kSubsetCount, false);
  for (std::uint32_t s = 1; s < kSubsetCount; ++s) {
    key[s] = canonical_key(RVSubset(static_cast<std::uint16_t>(s))).encoding();
    if (!seen[key[s]]) {
      seen[key[s]] = true;
      reps.push_back(key[s]);
    }
  }
  std::sort(reps.begin(), reps.end());

  std::vector<ClassId> id_of_key(kSubsetCount, 0);
  table.classes_.resize(reps.size());
  for (ClassId id = 0; id < reps.size(); ++id) {
    id_of_key[reps[id]] = id;
    EntropyClass& c = table.classes_[id];
    c.representative = RVSubset(reps[id]);
    std::vector<std::uint16_t> orbit;
    for (const auto& p : NodePermutation::all()) {
      orbit.push_back(apply_permutation(c.representative, p).encoding());
    }
    std::sort(orbit.begin(), orbit.end());
    c.orbit_size = static_cast<int>(std::unique(orbit.begin(), orbit.end()) - orbit.begin());
  }

  table.class_of_.assign(kSubsetCount, 0);
  for (std::uint32_t s = 1; s < kSubsetCount; ++s) {
    const ClassId id = id_of_key[key[s]];
    table.class_of_[s] = id;
    ++table.classes_[id].member_count;
  }

  const ClassId alpha = table.class_of_[RVSubset{RandomVar::W(1)}.encoding()];
  const ClassId beta = table.class_of_[RVSubset{RandomVar::S(1, 2)}.encoding()];
  for (ClassId id = 0; id < table.classes_.size(); ++id) {
    EntropyClass& c = table.classes_[id];
    if (closure(c.representative).node_count() >= 3) {
      c.pin = Pin::B;
    } else if (id == alpha) {
      c.pin = Pin::Alpha;
    } else if (id == beta) {
      c.pin = Pin::Beta;
    }
  }
  table.finalize();
  return table;
}

ClassId canonical_class(RVSubset s, const ClassTable& table) { return table.class_of(s); }

nlohmann::json ClassTable::to_json() const {
  nlohmann::json ordering = nlohmann::json::array();
  for (int p = 0; p < kVariables; ++p) ordering.push_back(RandomVar::at(p).name());
  nlohmann::json list = nlohmann::json::array();
  for (ClassId id = 0; id < classes_.size(); ++id) {
    const EntropyClass& c = classes_[id];
    list.push_back({{"id", id},
                    {"representative", c.representative.encoding()},
                    {"set", c.representative.to_string()},
                    {"pin", pin_name(c.pin)},
                    {"orbit_size", c.orbit_size},
                    {"members", c.member_count}});
  }
  return {{"ordering", ordering},
          {"class_count", classes_.size()},
          {"free_count", free_count()},
          {"classes", list}};
}

ClassTable ClassTable::from_json(const nlohmann::json& doc) {
  ClassTable fresh = build_class_table();
  const auto& list = doc.at("classes");
  if (list.size() != fresh.classes_.size()) {
    throw std::runtime_error("class table cache has " + std::to_string(list.size()) +
                             " classes, expected " + std::to_string(fresh.classes_.size()));
  }
  for (std::size_t id = 0; id < list.size(); ++id) {
    const auto& entry = list[id];
    const EntropyClass& c = fresh.classes_[id];
    if (entry.at("representative").get<int>() != c.representative.encoding() ||
        entry.at("pin").get<std::string>() != pin_name(c.pin) ||
        entry.at("orbit_size").get<int>() != c.orbit_size) {
      throw std::runtime_error("class table cache is stale at class " + std::to_string(id));
    }
  }
  return fresh;
}

}  // namespace regen
