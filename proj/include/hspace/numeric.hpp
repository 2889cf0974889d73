#pragma once

// Grid evaluation of single-input networks under concrete activations and
// tolerance-based deduplication of the resulting output vectors.

#include "hspace/arch.hpp"
#include "hspace/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hspace {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { relu, tanh, sigmoid, identity };

inline double activate(Activation act, double a) {
  switch (act) {
    case Activation::relu: return a > 0.0 ? a : 0.0;
    case Activation::tanh: return std::tanh(a);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-a));
    case Activation::identity: return a;
  }
  return a;
}

inline std::string to_string(Activation act) {
  switch (act) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  return "?";
}

inline Activation parse_activation(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  if (text == "sigmoid") return Activation::sigmoid;
  if (text == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + std::string(text) + "'");
}

/// Callable wrapper so an Activation can be handed to evaluate().
struct ActivationFn {
  Activation act;
  double operator()(double a) const { return activate(act, a); }
};

/// Equally spaced points x_i = -1 + 2i/(N-1) covering [-1, 1].
class EvalGrid {
 public:
  explicit EvalGrid(std::size_t size = 1001) {
    if (size < 2) throw std::invalid_argument("grid needs at least two points");
    const double steps = static_cast<double>(size - 1);
    points_.reserve(size);
    for (std::size_t i = 0; i < size; ++i) points_.push_back(-1.0 + 2.0 * static_cast<double>(i) / steps);
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const double> points() const noexcept { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

/// Evaluates successive states over a grid, recomputing only the layers
/// whose parameters changed since the previous call. Every point is summed
/// in the same order as evaluate(), so results are bit-identical to it.
class GridEvaluator {
 public:
  GridEvaluator(const Architecture& arch, const ValueSet& vs, Activation act, const EvalGrid& grid)
      : arch_(arch), layout_(arch), values_(vs.as_double()), act_(act), n_(grid.size()) {
    if (arch.input_count() != 1) throw std::invalid_argument("grid evaluation needs a single-input architecture");
    layers_.resize(arch.depth() + 1);
    layers_[0].assign(grid.points().begin(), grid.points().end());
    for (std::size_t l = 1; l <= arch.depth(); ++l) layers_[l].assign(arch.width(l) * n_, 0.0);
    acc_.assign(n_, 0.0);
    out_.assign(n_, 0.0);
  }

  std::size_t size() const noexcept { return n_; }

  /// `first_changed` is the most significant digit that differs from the
  /// previously evaluated state; pass 0 to force a full evaluation.
  std::span<const double> evaluate(const State& s, std::size_t first_changed = 0) {
    if (s.size() != layout_.size()) throw std::invalid_argument("state length does not match architecture");
    std::size_t from = 1;
    if (primed_) {
      from = arch_.depth() + 1;
      for (std::size_t l = 0; l < arch_.depth(); ++l)
        if (first_changed < layout_.layer_offset(l) + (arch_.width(l) + 1) * arch_.width(l + 1)) {
          from = l + 1;
          break;
        }
    }
    for (std::size_t l = from; l <= arch_.depth(); ++l) compute_layer(s, l);
    primed_ = true;

    const auto& top = layers_[arch_.depth()];
    std::fill(out_.begin(), out_.end(), 0.0);
    for (std::size_t j = 0; j < arch_.width(arch_.depth()); ++j) {
      const double w = values_[s[layout_.output_weight(j)]];
      const double* y = &top[j * n_];
      for (std::size_t p = 0; p < n_; ++p) out_[p] += w * y[p];
    }
    if (arch_.include_output_bias()) {
      const double b = values_[s[layout_.output_bias()]];
      for (std::size_t p = 0; p < n_; ++p) out_[p] += b;
    }
    for (double v : out_)
      if (!std::isfinite(v)) throw NumericError("non-finite network output");
    return out_;
  }

 private:
  void compute_layer(const State& s, std::size_t l) {
    const auto& prev = layers_[l - 1];
    auto& cur = layers_[l];
    const std::size_t fan_in = arch_.width(l - 1);
    for (std::size_t i = 0; i < arch_.width(l); ++i) {
      std::fill(acc_.begin(), acc_.end(), 0.0);
      for (std::size_t j = 0; j < fan_in; ++j) {
        const double w = values_[s[layout_.hidden_weight(l - 1, i, j)]];
        const double* y = &prev[j * n_];
        for (std::size_t p = 0; p < n_; ++p) acc_[p] += w * y[p];
      }
      const double b = values_[s[layout_.hidden_bias(l - 1, i)]];
      double* out = &cur[i * n_];
      switch (act_) {
        case Activation::relu:
          for (std::size_t p = 0; p < n_; ++p) {
            const double a = acc_[p] + b;
            out[p] = a > 0.0 ? a : 0.0;
          }
          break;
        default:
          for (std::size_t p = 0; p < n_; ++p) out[p] = activate(act_, acc_[p] + b);
          break;
      }
    }
  }

  Architecture arch_;
  ParamLayout layout_;
  std::vector<double> values_;
  Activation act_;
  std::size_t n_;
  std::vector<std::vector<double>> layers_;  ///< layer l: width(l) rows of n_ points
  std::vector<double> acc_;
  std::vector<double> out_;
  bool primed_ = false;
};

/// y_i = h(x_i) over the grid for one state.
inline std::vector<double> evaluate_grid(const Architecture& arch, const State& s, const ValueSet& vs, Activation act,
                                         const EvalGrid& grid) {
  GridEvaluator ev(arch, vs, act, grid);
  const auto y = ev.evaluate(s);
  return {y.begin(), y.end()};
}

namespace detail {

inline std::uint64_t hash_vector_bits(std::span<const double> y) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : y) {
    const std::uint64_t bits = v == 0.0 ? 0 : std::bit_cast<std::uint64_t>(v);
    h = (h ^ bits) * 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

}  // namespace detail

/// Greedy leader clustering: a vector opens a new cluster iff its Euclidean
/// distance to every existing leader exceeds `tol`. Leaders are indexed on a
/// grid over a few unit-norm projections with cells at least `tol` wide, so
/// every leader within `tol` of a query lies in one of the 3^k neighbouring
/// cells. tol = 0 reduces to exact deduplication (-0.0 equals 0.0).
class LeaderClusterer {
 public:
  static constexpr std::size_t projections = 3;

  LeaderClusterer(std::size_t dimension, double tol) : dim_(dimension), tol_(tol) {
    if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
    // 1% slack absorbs rounding in the projections
    cell_ = tol * 1.01 + 1e-9;
    tol_sq_ = tol * tol;
    std::mt19937_64 rng(0x6873706163650001ULL);
    for (auto& dir : dirs_) {
      dir.resize(dim_);
      double norm = 0.0;
      for (auto& d : dir) {
        d = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
        norm += d * d;
      }
      norm = std::sqrt(norm);
      for (auto& d : dir) d /= norm;
    }
  }

  double tolerance() const noexcept { return tol_; }
  std::size_t size() const noexcept { return ranks_.size(); }
  std::span<const double> leader(std::size_t i) const { return {&leaders_[i * dim_], dim_}; }
  std::uint64_t leader_rank(std::size_t i) const { return ranks_[i]; }

  /// Returns true when y opens a new cluster.
  bool offer(std::span<const double> y, std::uint64_t rank = 0) {
    if (y.size() != dim_) throw std::invalid_argument("vector dimension does not match clusterer");
    for (double v : y)
      if (!std::isfinite(v)) throw NumericError("non-finite output vector");
    if (tol_ == 0.0) return offer_exact(y, rank);

    std::array<std::int64_t, projections> cell{};
    for (std::size_t k = 0; k < projections; ++k) {
      double p = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) p += dirs_[k][i] * y[i];
      cell[k] = static_cast<std::int64_t>(std::floor(p / cell_));
    }
    std::array<std::int64_t, projections> probe{};
    for (std::size_t code = 0; code < 27; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k < projections; ++k, c /= 3) probe[k] = cell[k] + static_cast<std::int64_t>(c % 3) - 1;
      const auto found = index_.find(cell_key(probe));
      if (found == index_.end()) continue;
      for (auto li : found->second)
        if (within(y, li)) return false;
    }
    index_[cell_key(cell)].push_back(static_cast<std::uint32_t>(ranks_.size()));
    push_leader(y, rank);
    return true;
  }

 private:
  static std::uint64_t cell_key(const std::array<std::int64_t, projections>& c) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return h;
  }

  bool within(std::span<const double> y, std::size_t li) const {
    const double* l = &leaders_[li * dim_];
    double d = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double e = y[i] - l[i];
      d += e * e;
      if (d > tol_sq_) return false;
    }
    return true;
  }

  bool offer_exact(std::span<const double> y, std::uint64_t rank) {
    auto& bucket = index_[detail::hash_vector_bits(y)];
    for (auto li : bucket)
      if (std::equal(y.begin(), y.end(), leaders_.begin() + static_cast<std::ptrdiff_t>(li * dim_))) return false;
    bucket.push_back(static_cast<std::uint32_t>(ranks_.size()));
    push_leader(y, rank);
    return true;
  }

  void push_leader(std::span<const double> y, std::uint64_t rank) {
    leaders_.insert(leaders_.end(), y.begin(), y.end());
    ranks_.push_back(rank);
  }

  std::size_t dim_;
  double tol_;
  double tol_sq_ = 0.0;
  double cell_ = 1.0;
  std::array<std::vector<double>, projections> dirs_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index_;
  std::vector<double> leaders_;
  std::vector<std::uint64_t> ranks_;
};

/// Exact count of distinct vectors that keeps only hashes and state ranks;
/// hash matches are confirmed by regenerating the stored state's vector.
class ExactVectorCounter {
 public:
  using Regenerate = std::function<std::vector<double>(std::uint64_t rank)>;

  explicit ExactVectorCounter(Regenerate regenerate) : regenerate_(std::move(regenerate)) {}

  bool offer(std::span<const double> y, std::uint64_t rank) {
    auto& bucket = seen_[detail::hash_vector_bits(y)];
    for (auto r : bucket) {
      const auto other = regenerate_(r);
      if (std::equal(y.begin(), y.end(), other.begin(), other.end())) return false;
    }
    bucket.push_back(rank);
    ++count_;
    return true;
  }

  std::uint64_t count() const noexcept { return count_; }

 private:
  Regenerate regenerate_;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> seen_;
  std::uint64_t count_ = 0;
};

struct NumericOptions {
  EnumerationGuard guard{};
  std::size_t shards = 1;
  /// States evaluated per shard between serial clustering passes.
  std::size_t block_states = 2048;
  /// Also count bitwise-distinct vectors in the same pass.
  bool also_exact = false;
  bool keep_leaders = false;
};

struct NumericCount {
  std::uint64_t count = 0;
  std::uint64_t exact_count = 0;  ///< valid when also_exact was requested
  std::vector<std::uint64_t> leader_ranks;
  std::vector<std::vector<double>> leaders;
};

/// Number of leader clusters over all V^P states, taken in lexicographic
/// state order. Evaluation is sharded; clustering is a serial scan.
inline NumericCount count_unique_numeric(const Architecture& arch, const ValueSet& vs, Activation act,
                                         const EvalGrid& grid = EvalGrid{}, double tol = 1e-4,
                                         const NumericOptions& opt = {}) {
  if (arch.input_count() != 1) throw std::invalid_argument("numeric counting needs a single-input architecture");
  opt.guard.check(state_count(arch, vs.size()), "numeric count of " + arch.to_string());
  const std::size_t params = param_count(arch);
  const std::uint64_t total = state_count_u64(params, vs.size());
  const std::size_t shards = std::max<std::size_t>(opt.shards, 1);
  const std::size_t n = grid.size();

  LeaderClusterer clusters(n, tol);
  GridEvaluator regen(arch, vs, act, grid);
  ExactVectorCounter exact([&](std::uint64_t rank) {
    const auto y = regen.evaluate(state_from_rank(rank, params, vs.size()));
    return std::vector<double>(y.begin(), y.end());
  });

  std::vector<GridEvaluator> evaluators;
  for (std::size_t k = 0; k < shards; ++k) evaluators.emplace_back(arch, vs, act, grid);
  const std::uint64_t block = static_cast<std::uint64_t>(std::max<std::size_t>(opt.block_states, 1)) * shards;
  std::vector<double> buffer(static_cast<std::size_t>(std::min<std::uint64_t>(block, total)) * n);

  for (std::uint64_t start = 0; start < total; start += block) {
    const std::uint64_t len = std::min(block, total - start);
    run_sharded(len, shards, [&](std::size_t shard, std::uint64_t first, std::uint64_t last) {
      auto& ev = evaluators[shard];
      bool fresh = true;
      for (auto it = StateRange(arch, vs.size(), start + first, start + last).begin(); it.rank() < start + last; ++it) {
        const auto y = ev.evaluate(*it, fresh ? 0 : it.first_changed());
        fresh = false;
        std::copy(y.begin(), y.end(), buffer.begin() + static_cast<std::ptrdiff_t>((it.rank() - start) * n));
      }
    });
    for (std::uint64_t r = 0; r < len; ++r) {
      const std::span<const double> y(&buffer[r * n], n);
      clusters.offer(y, start + r);
      if (opt.also_exact) exact.offer(y, start + r);
    }
  }

  NumericCount out;
  out.count = clusters.size();
  out.exact_count = exact.count();
  if (opt.keep_leaders) {
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      out.leader_ranks.push_back(clusters.leader_rank(i));
      const auto l = clusters.leader(i);
      out.leaders.emplace_back(l.begin(), l.end());
    }
  }
  return out;
}

}  // namespace hspace
