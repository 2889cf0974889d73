#pragma once

// Neuron permutations of the hidden layers and the permutations they induce on
// the flat parameter vector. States related by an induced permutation compute
// the same function for every activation.

#include "hspace/arch.hpp"
#include "hspace/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hspace {

/// A bijection on {0..n-1}; image[k] is where k is sent.
struct Permutation {
  std::vector<std::size_t> image;

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.image.resize(n);
    std::iota(p.image.begin(), p.image.end(), std::size_t{0});
    return p;
  }

  /// Builds from explicit images, rejecting anything that is not a bijection.
  static Permutation from_images(std::vector<std::size_t> image) {
    Permutation p{std::move(image)};
    if (!p.is_bijection()) throw std::invalid_argument("not a permutation");
    return p;
  }

  std::size_t size() const noexcept { return image.size(); }
  std::size_t operator()(std::size_t k) const { return image[k]; }

  bool is_bijection() const {
    std::vector<bool> seen(image.size(), false);
    for (auto v : image) {
      if (v >= image.size() || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  bool is_identity() const {
    for (std::size_t k = 0; k < image.size(); ++k)
      if (image[k] != k) return false;
    return true;
  }

  Permutation inverse() const {
    Permutation inv;
    inv.image.resize(image.size());
    for (std::size_t k = 0; k < image.size(); ++k) inv.image[image[k]] = k;
    return inv;
  }

  /// Disjoint cycles, each starting at its smallest element, fixed points included.
  std::vector<std::vector<std::size_t>> cycles() const {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(image.size(), false);
    for (std::size_t start = 0; start < image.size(); ++start) {
      if (seen[start]) continue;
      auto& cycle = out.emplace_back();
      for (std::size_t k = start; !seen[k]; k = image[k]) {
        seen[k] = true;
        cycle.push_back(k);
      }
    }
    return out;
  }

  bool operator==(const Permutation&) const = default;
};

/// (after ∘ before)(k) = after(before(k)).
inline Permutation compose(const Permutation& after, const Permutation& before) {
  if (after.size() != before.size()) throw std::invalid_argument("composing permutations of different sizes");
  Permutation r;
  r.image.resize(before.size());
  for (std::size_t k = 0; k < before.size(); ++k) r.image[k] = after.image[before.image[k]];
  return r;
}

/// Number of disjoint cycles in the complete factorisation, fixed points included.
inline std::size_t cycle_count(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  std::size_t cycles = 0;
  for (std::size_t start = 0; start < p.size(); ++start) {
    if (seen[start]) continue;
    ++cycles;
    for (std::size_t k = start; !seen[k]; k = p.image[k]) seen[k] = true;
  }
  return cycles;
}

inline std::string to_cycle_notation(const Permutation& p) {
  std::string s;
  for (const auto& c : p.cycles()) {
    s += '(';
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i] + 1);
    s += ')';
  }
  return s;
}

using ParamPermutation = Permutation;

/// One element of S_{U1} x ... x S_{UL}: per_layer[l] permutes the neurons of hidden layer l.
struct HiddenPermutation {
  std::vector<Permutation> per_layer;

  static HiddenPermutation identity(const Architecture& arch) {
    HiddenPermutation g;
    for (auto u : arch.hidden_sizes()) g.per_layer.push_back(Permutation::identity(u));
    return g;
  }

  bool is_identity() const {
    return std::all_of(per_layer.begin(), per_layer.end(), [](const Permutation& p) { return p.is_identity(); });
  }

  bool operator==(const HiddenPermutation&) const = default;
};

inline HiddenPermutation compose(const HiddenPermutation& after, const HiddenPermutation& before) {
  if (after.per_layer.size() != before.per_layer.size())
    throw std::invalid_argument("composing hidden permutations of different depth");
  HiddenPermutation r;
  for (std::size_t l = 0; l < after.per_layer.size(); ++l)
    r.per_layer.push_back(compose(after.per_layer[l], before.per_layer[l]));
  return r;
}

inline void check_conforms(const Architecture& arch, const HiddenPermutation& g) {
  if (g.per_layer.size() != arch.depth()) throw std::invalid_argument("hidden permutation depth does not match architecture");
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    if (g.per_layer[l].size() != arch.hidden_sizes()[l])
      throw std::invalid_argument("hidden permutation layer " + std::to_string(l + 1) + " has the wrong size");
    if (!g.per_layer[l].is_bijection()) throw std::invalid_argument("hidden permutation entry is not a bijection");
  }
}

/// Moving neuron i of layer l to position π_l(i) carries its incoming row
/// (columns reindexed by π_{l-1}, inputs never move), its bias and, for the
/// top layer, its output weight. The output bias is fixed.
inline ParamPermutation induced_param_permutation(const Architecture& arch, const HiddenPermutation& g) {
  check_conforms(arch, g);
  const ParamLayout layout(arch);
  ParamPermutation p = Permutation::identity(layout.size());
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    const auto& rows = g.per_layer[l];
    const auto* cols = l == 0 ? nullptr : &g.per_layer[l - 1];
    for (std::size_t i = 0; i < arch.width(l + 1); ++i) {
      for (std::size_t j = 0; j < arch.width(l); ++j)
        p.image[layout.hidden_weight(l, i, j)] = layout.hidden_weight(l, rows(i), cols ? (*cols)(j) : j);
      p.image[layout.hidden_bias(l, i)] = layout.hidden_bias(l, rows(i));
    }
  }
  const auto& top = g.per_layer.back();
  for (std::size_t j = 0; j < arch.width(arch.depth()); ++j) p.image[layout.output_weight(j)] = layout.output_weight(top(j));
  return p;
}

/// result[p(k)] = s[k].
inline State apply(const State& s, const ParamPermutation& p) {
  if (s.size() != p.size()) throw std::invalid_argument("state and permutation lengths differ");
  State r{std::vector<Digit>(s.size())};
  for (std::size_t k = 0; k < s.size(); ++k) r.digits[p.image[k]] = s.digits[k];
  return r;
}

/// All permutations of {0..n-1} in lexicographic order of their image vectors.
inline std::vector<Permutation> all_permutations(std::size_t n) {
  std::vector<Permutation> out;
  Permutation p = Permutation::identity(n);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.image.begin(), p.image.end()));
  return out;
}

/// Every element of S_{U1} x ... x S_{UL}, layer 1 varying slowest.
inline std::vector<HiddenPermutation> all_hidden_permutations(const Architecture& arch) {
  std::vector<std::vector<Permutation>> per_layer;
  for (auto u : arch.hidden_sizes()) per_layer.push_back(all_permutations(u));
  std::vector<HiddenPermutation> out;
  std::vector<std::size_t> idx(per_layer.size(), 0);
  while (true) {
    HiddenPermutation g;
    for (std::size_t l = 0; l < per_layer.size(); ++l) g.per_layer.push_back(per_layer[l][idx[l]]);
    out.push_back(std::move(g));
    std::size_t l = per_layer.size();
    while (l-- > 0) {
      if (++idx[l] < per_layer[l].size()) break;
      idx[l] = 0;
    }
    if (l == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

inline BigInt group_order(const Architecture& arch) {
  BigInt order = 1;
  for (auto u : arch.hidden_sizes()) order *= factorial(u);
  return order;
}

using InducedMap = std::function<ParamPermutation(const Architecture&, const HiddenPermutation&)>;

/// The full induced permutation group of an architecture, materialized.
class SymmetryGroup {
 public:
  static constexpr std::uint64_t max_order = 1'000'000;

  explicit SymmetryGroup(const Architecture& arch, const InducedMap& induce = induced_param_permutation) : arch_(arch) {
    if (group_order(arch) > max_order) throw GuardExceeded("symmetry group of " + arch.to_string() + " is too large to materialize");
    elements_ = all_hidden_permutations(arch);
    for (const auto& g : elements_) induced_.push_back(induce(arch, g));
  }

  const Architecture& architecture() const noexcept { return arch_; }
  std::size_t order() const noexcept { return elements_.size(); }
  const std::vector<HiddenPermutation>& elements() const noexcept { return elements_; }
  const std::vector<ParamPermutation>& induced() const noexcept { return induced_; }

  /// Lexicographically smallest image of s over the whole group.
  State canonical(const State& s) const {
    State best = s;
    std::vector<Digit> buf(s.size());
    for (const auto& p : induced_) {
      for (std::size_t k = 0; k < s.size(); ++k) buf[p.image[k]] = s.digits[k];
      if (buf < best.digits) best.digits = buf;
    }
    return best;
  }

  /// True iff no group image of s is lexicographically smaller.
  bool is_canonical(const State& s) const {
    std::vector<Digit> buf(s.size());
    for (const auto& p : induced_) {
      for (std::size_t k = 0; k < s.size(); ++k) buf[p.image[k]] = s.digits[k];
      if (buf < s.digits) return false;
    }
    return true;
  }

  /// Number of group elements fixing s.
  std::size_t stabilizer_order(const State& s) const {
    std::size_t fixed = 0;
    for (const auto& p : induced_) {
      bool same = true;
      for (std::size_t k = 0; k < s.size() && same; ++k) same = s.digits[p.image[k]] == s.digits[k];
      fixed += same ? 1 : 0;
    }
    return fixed;
  }

 private:
  Architecture arch_;
  std::vector<HiddenPermutation> elements_;
  std::vector<ParamPermutation> induced_;
};

inline State canonical_representative(const Architecture& arch, const State& s) {
  return SymmetryGroup(arch).canonical(s);
}

struct OrbitRecord {
  std::uint64_t representative_rank;
  std::uint64_t size;
};

struct OrbitEnumeration {
  std::uint64_t orbit_count = 0;
  std::vector<OrbitRecord> orbits;  ///< sorted by representative rank; empty unless requested
};

struct OrbitOptions {
  EnumerationGuard guard{};
  std::size_t shards = 1;
  bool keep_representatives = true;
};

/// Brute-force orbit partition: a state is an orbit's representative iff it
/// is the lexicographic minimum of its images under every group element.
inline OrbitEnumeration orbit_enumerate(const SymmetryGroup& group, std::size_t value_count, const OrbitOptions& opt = {}) {
  const auto& arch = group.architecture();
  opt.guard.check(state_count(arch, value_count), "orbit enumeration of " + arch.to_string());
  const StateRange all(arch, value_count);
  std::vector<OrbitEnumeration> parts(std::max<std::size_t>(opt.shards, 1));
  run_sharded(all.size(), opt.shards, [&](std::size_t shard, std::uint64_t first, std::uint64_t last) {
    auto& part = parts[shard];
    for (auto it = StateRange(arch, value_count, first, last).begin(); it.rank() < last; ++it) {
      if (!group.is_canonical(*it)) continue;
      ++part.orbit_count;
      if (opt.keep_representatives) part.orbits.push_back({it.rank(), group.order() / group.stabilizer_order(*it)});
    }
  });
  OrbitEnumeration out;
  for (auto& part : parts) {
    out.orbit_count += part.orbit_count;
    out.orbits.insert(out.orbits.end(), part.orbits.begin(), part.orbits.end());
  }
  return out;
}

inline OrbitEnumeration orbit_enumerate(const Architecture& arch, const ValueSet& vs, const OrbitOptions& opt = {}) {
  return orbit_enumerate(SymmetryGroup(arch), vs.size(), opt);
}

}  // namespace hspace
