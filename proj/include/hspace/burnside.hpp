#pragma once

// Orbit counting by Burnside's lemma over conjugacy classes of
// S_{U1} x ... x S_{UL}. Cost is the product of the partition counts p(U_l).

#include "hspace/arch.hpp"
#include "hspace/numbers.hpp"
#include "hspace/symmetry.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hspace {

/// Parts in non-increasing order.
using Partition = std::vector<std::size_t>;

/// All partitions of n, in reverse lexicographic order ((n) first, (1,...,1) last).
inline std::vector<Partition> integer_partitions(std::size_t n) {
  std::vector<Partition> out;
  Partition current;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t remaining, std::size_t max_part) {
    if (remaining == 0) {
      out.push_back(current);
      return;
    }
    for (std::size_t part = std::min(remaining, max_part); part >= 1; --part) {
      current.push_back(part);
      rec(remaining - part, part);
      current.pop_back();
    }
  };
  rec(n, n);
  return out;
}

inline bool is_partition_of(const Partition& lambda, std::size_t n) {
  if (std::any_of(lambda.begin(), lambda.end(), [](std::size_t a) { return a == 0; })) return false;
  if (!std::is_sorted(lambda.rbegin(), lambda.rend())) return false;
  return std::accumulate(lambda.begin(), lambda.end(), std::size_t{0}) == n;
}

/// Size of the conjugacy class of S_U with cycle type lambda:
/// U! / prod_k (k^{m_k} m_k!).
inline BigInt class_size(const Partition& lambda) {
  const std::size_t n = std::accumulate(lambda.begin(), lambda.end(), std::size_t{0});
  BigInt denom = 1;
  for (std::size_t i = 0; i < lambda.size();) {
    std::size_t j = i;
    while (j < lambda.size() && lambda[j] == lambda[i]) ++j;
    const std::size_t mult = j - i;
    denom *= big_pow(lambda[i], mult) * factorial(mult);
    i = j;
  }
  return factorial(n) / denom;
}

/// Cycle type of a permutation as a partition.
inline Partition cycle_type(const Permutation& p) {
  Partition lambda;
  for (const auto& c : p.cycles()) lambda.push_back(c.size());
  std::sort(lambda.rbegin(), lambda.rend());
  return lambda;
}

/// One conjugacy class of the hidden-layer symmetry group.
struct CycleTypeTuple {
  std::vector<Partition> per_layer;
  BigInt class_size = 1;
};

inline CycleTypeTuple cycle_type(const HiddenPermutation& g) {
  CycleTypeTuple ct;
  for (const auto& p : g.per_layer) {
    ct.per_layer.push_back(cycle_type(p));
    ct.class_size *= class_size(ct.per_layer.back());
  }
  return ct;
}

/// Every conjugacy class, layer 1 varying slowest.
inline std::vector<CycleTypeTuple> cycle_type_tuples(const Architecture& arch) {
  std::vector<std::vector<Partition>> per_layer;
  for (auto u : arch.hidden_sizes()) per_layer.push_back(integer_partitions(u));
  std::vector<CycleTypeTuple> out;
  std::vector<std::size_t> idx(per_layer.size(), 0);
  while (true) {
    CycleTypeTuple ct;
    for (std::size_t l = 0; l < per_layer.size(); ++l) {
      ct.per_layer.push_back(per_layer[l][idx[l]]);
      ct.class_size *= class_size(ct.per_layer.back());
    }
    out.push_back(std::move(ct));
    std::size_t l = per_layer.size();
    while (l-- > 0) {
      if (++idx[l] < per_layer[l].size()) break;
      idx[l] = 0;
    }
    if (l == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

/// Cycles of the incoming-weight block when rows move by cycle type `rows`
/// and columns by `cols`: an a-cycle of rows against a b-cycle of columns
/// splits its a*b cells into gcd(a, b) cycles.
inline std::size_t block_cycles(const Partition& rows, const Partition& cols) {
  std::size_t t = 0;
  for (auto a : rows)
    for (auto b : cols) t += std::gcd(a, b);
  return t;
}

/// t(τ) for any τ in the class, i.e. the number of cycles of the induced
/// parameter permutation.
inline std::size_t cycles_from_types(const Architecture& arch, const CycleTypeTuple& ct) {
  if (ct.per_layer.size() != arch.depth()) throw std::invalid_argument("cycle type tuple depth does not match architecture");
  for (std::size_t l = 0; l < arch.depth(); ++l)
    if (!is_partition_of(ct.per_layer[l], arch.hidden_sizes()[l]))
      throw std::invalid_argument("malformed partition for hidden layer " + std::to_string(l + 1));
  const Partition inputs(arch.input_count(), 1);
  std::size_t t = 0;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    const Partition& cols = l == 0 ? inputs : ct.per_layer[l - 1];
    t += block_cycles(ct.per_layer[l], cols) + ct.per_layer[l].size();
  }
  t += ct.per_layer.back().size();
  return t + (arch.include_output_bias() ? 1 : 0);
}

/// Exact number of orbits of the V^P states under the hidden-layer group.
inline BigInt burnside_exact(const Architecture& arch, std::size_t value_count) {
  if (value_count == 0) throw std::invalid_argument("value count must be positive");
  BigInt total = 0;
  for (const auto& ct : cycle_type_tuples(arch)) total += ct.class_size * big_pow(value_count, cycles_from_types(arch, ct));
  const BigInt order = group_order(arch);
  if (total % order != 0)
    throw std::logic_error("Burnside sum " + total.str() + " is not divisible by |G| = " + order.str());
  return total / order;
}

/// V^P / prod_l U_l!, the identity term of the Burnside average.
inline Rational theorem1_bound(const Architecture& arch, std::size_t value_count) {
  if (value_count == 0) throw std::invalid_argument("value count must be positive");
  return Rational(state_count(arch, value_count), group_order(arch));
}

}  // namespace hspace
