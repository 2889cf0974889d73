#pragma once

// Fully connected single-output feed-forward architectures, the flat
// parameter layout, exhaustive state enumeration and forward evaluation.

#include "hspace/numbers.hpp"

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hspace {

class Architecture {
 public:
  Architecture(std::size_t input_count, std::vector<std::size_t> hidden_sizes, bool include_output_bias = false)
      : inputs_(input_count), hidden_(std::move(hidden_sizes)), output_bias_(include_output_bias) {
    if (inputs_ == 0) throw std::invalid_argument("architecture needs at least one input");
    if (hidden_.empty()) throw std::invalid_argument("architecture needs at least one hidden layer");
    for (auto u : hidden_)
      if (u == 0) throw std::invalid_argument("hidden layers must have at least one neuron");
  }

  std::size_t input_count() const noexcept { return inputs_; }
  std::size_t depth() const noexcept { return hidden_.size(); }
  const std::vector<std::size_t>& hidden_sizes() const noexcept { return hidden_; }
  bool include_output_bias() const noexcept { return output_bias_; }

  /// Width of layer l where layer 0 is the input layer and 1..L are hidden.
  std::size_t width(std::size_t l) const { return l == 0 ? inputs_ : hidden_.at(l - 1); }

  /// "n-U1-...-UL"
  std::string to_string() const {
    std::string s = std::to_string(inputs_);
    for (auto u : hidden_) s += "-" + std::to_string(u);
    return s;
  }

  bool operator==(const Architecture&) const = default;

 private:
  std::size_t inputs_;
  std::vector<std::size_t> hidden_;
  bool output_bias_;
};

inline Architecture parse_architecture(std::string_view text, bool include_output_bias = false) {
  std::vector<std::size_t> widths;
  std::size_t pos = 0;
  while (true) {
    const auto dash = text.find('-', pos);
    const auto piece = text.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos);
    std::size_t w = 0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), w);
    if (piece.empty() || ec != std::errc{} || ptr != piece.data() + piece.size())
      throw std::invalid_argument("malformed architecture '" + std::string(text) + "'");
    widths.push_back(w);
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  if (widths.size() < 2) throw std::invalid_argument("architecture '" + std::string(text) + "' has no hidden layer");
  return Architecture(widths.front(), std::vector<std::size_t>(widths.begin() + 1, widths.end()), include_output_bias);
}

inline std::size_t param_count(const Architecture& arch) {
  std::size_t p = 0;
  for (std::size_t l = 1; l <= arch.depth(); ++l) p += (arch.width(l - 1) + 1) * arch.width(l);
  p += arch.width(arch.depth());
  return p + (arch.include_output_bias() ? 1 : 0);
}

/// What a flat parameter index stands for. Layer, neuron and source indices
/// are zero-based; `layer` counts hidden layers from 0.
struct ParamRole {
  enum class Kind { hidden_weight, hidden_bias, output_weight, output_bias };
  Kind kind;
  std::size_t layer = 0;
  std::size_t neuron = 0;
  std::size_t source = 0;

  bool operator==(const ParamRole&) const = default;
};

/// Canonical layout: hidden layers in order, neurons in order, each neuron's
/// incoming weights by source followed by its bias; then output weights and
/// finally the output bias when enabled.
class ParamLayout {
 public:
  explicit ParamLayout(const Architecture& arch) : arch_(arch) {
    std::size_t offset = 0;
    for (std::size_t l = 1; l <= arch.depth(); ++l) {
      layer_offset_.push_back(offset);
      offset += (arch.width(l - 1) + 1) * arch.width(l);
    }
    output_offset_ = offset;
    size_ = param_count(arch);
  }

  std::size_t size() const noexcept { return size_; }
  const Architecture& architecture() const noexcept { return arch_; }

  std::size_t layer_offset(std::size_t layer) const { return layer_offset_.at(layer); }
  std::size_t output_offset() const noexcept { return output_offset_; }

  std::size_t hidden_weight(std::size_t layer, std::size_t neuron, std::size_t source) const {
    return layer_offset_[layer] + neuron * (arch_.width(layer) + 1) + source;
  }
  std::size_t hidden_bias(std::size_t layer, std::size_t neuron) const {
    return layer_offset_[layer] + neuron * (arch_.width(layer) + 1) + arch_.width(layer);
  }
  std::size_t output_weight(std::size_t source) const { return output_offset_ + source; }
  std::size_t output_bias() const {
    if (!arch_.include_output_bias()) throw std::logic_error("architecture has no output bias");
    return size_ - 1;
  }

  std::size_t flat(const ParamRole& r) const {
    switch (r.kind) {
      case ParamRole::Kind::hidden_weight: return hidden_weight(r.layer, r.neuron, r.source);
      case ParamRole::Kind::hidden_bias: return hidden_bias(r.layer, r.neuron);
      case ParamRole::Kind::output_weight: return output_weight(r.source);
      case ParamRole::Kind::output_bias: return output_bias();
    }
    throw std::logic_error("unknown parameter kind");
  }

  ParamRole role(std::size_t flat_index) const {
    if (flat_index >= size_) throw std::out_of_range("parameter index out of range");
    if (flat_index >= output_offset_) {
      const auto k = flat_index - output_offset_;
      if (k == arch_.width(arch_.depth())) return {ParamRole::Kind::output_bias};
      return {ParamRole::Kind::output_weight, 0, 0, k};
    }
    std::size_t layer = arch_.depth() - 1;
    while (layer_offset_[layer] > flat_index) --layer;
    const auto stride = arch_.width(layer) + 1;
    const auto local = flat_index - layer_offset_[layer];
    const auto neuron = local / stride;
    const auto source = local % stride;
    if (source == arch_.width(layer)) return {ParamRole::Kind::hidden_bias, layer, neuron, 0};
    return {ParamRole::Kind::hidden_weight, layer, neuron, source};
  }

 private:
  Architecture arch_;
  std::vector<std::size_t> layer_offset_;
  std::size_t output_offset_ = 0;
  std::size_t size_ = 0;
};

/// The finite parameter alphabet, kept sorted ascending so that digit order
/// matches value order.
class ValueSet {
 public:
  explicit ValueSet(std::vector<Rational> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("value set is empty");
    std::sort(values_.begin(), values_.end());
    if (std::adjacent_find(values_.begin(), values_.end()) != values_.end())
      throw std::invalid_argument("value set contains duplicates");
  }

  std::size_t size() const noexcept { return values_.size(); }
  const Rational& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Rational>& values() const noexcept { return values_; }

  std::vector<double> as_double() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) out.push_back(static_cast<double>(v));
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < values_.size(); ++i) s += (i ? "," : "") + hspace::to_string(values_[i]);
    return s;
  }

 private:
  std::vector<Rational> values_;
};

/// Comma-separated exact rationals, e.g. "-1,0,1" or "-1/2,1/2".
inline ValueSet parse_value_set(std::string_view text) {
  std::vector<Rational> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    values.push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return ValueSet(std::move(values));
}

/// Symmetric integer alphabet of size V used when only a cardinality is
/// given: {-1,1} for 2, {-1,0,1} for 3, {-2,-1,1,2} for 4, ...
inline ValueSet default_value_set(std::size_t v) {
  if (v == 0) throw std::invalid_argument("value set is empty");
  std::vector<Rational> values;
  const auto half = static_cast<long>(v / 2);
  for (long k = -half; k <= half; ++k) {
    if (k == 0 && v % 2 == 0) continue;
    values.emplace_back(k);
  }
  if (v == 1) values = {Rational(0)};
  return ValueSet(std::move(values));
}

using Digit = std::uint32_t;

/// One value index per parameter; parameter p takes values[digits[p]].
struct State {
  std::vector<Digit> digits;

  std::size_t size() const noexcept { return digits.size(); }
  Digit operator[](std::size_t i) const { return digits[i]; }
  Digit& operator[](std::size_t i) { return digits[i]; }

  auto operator<=>(const State&) const = default;
  bool operator==(const State&) const = default;
};

/// V^P as a big integer.
inline BigInt state_count(const Architecture& arch, std::size_t value_count) {
  return big_pow(value_count, param_count(arch));
}

/// V^P when it fits 64 bits, otherwise throws std::overflow_error.
inline std::uint64_t state_count_u64(std::size_t param_total, std::size_t value_count) {
  std::uint64_t n = 1;
  for (std::size_t p = 0; p < param_total; ++p) {
    if (n > std::numeric_limits<std::uint64_t>::max() / value_count)
      throw std::overflow_error("state space does not fit 64-bit ranks");
    n *= value_count;
  }
  return n;
}

/// Lexicographic rank of a digit vector (digit 0 most significant).
inline std::uint64_t state_rank(const State& s, std::size_t value_count) {
  std::uint64_t r = 0;
  for (auto d : s.digits) r = r * value_count + d;
  return r;
}

inline State state_from_rank(std::uint64_t rank, std::size_t param_total, std::size_t value_count) {
  State s{std::vector<Digit>(param_total, 0)};
  for (std::size_t p = param_total; p-- > 0;) {
    s.digits[p] = static_cast<Digit>(rank % value_count);
    rank /= value_count;
  }
  return s;
}

/// The states with lexicographic ranks in [first, last).
class StateRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = State;
    using difference_type = std::ptrdiff_t;
    using pointer = const State*;
    using reference = const State&;

    iterator() = default;
    iterator(State s, std::uint64_t rank, std::size_t value_count)
        : state_(std::move(s)), rank_(rank), radix_(static_cast<Digit>(value_count)) {}

    const State& operator*() const noexcept { return state_; }
    const State* operator->() const noexcept { return &state_; }
    std::uint64_t rank() const noexcept { return rank_; }

    /// Index of the most significant digit changed by the last increment.
    std::size_t first_changed() const noexcept { return first_changed_; }

    iterator& operator++() {
      ++rank_;
      std::size_t p = state_.digits.size();
      while (p-- > 0) {
        if (++state_.digits[p] < radix_) break;
        state_.digits[p] = 0;
      }
      first_changed_ = p == static_cast<std::size_t>(-1) ? 0 : p;
      return *this;
    }
    void operator++(int) { ++*this; }

    friend bool operator==(const iterator& a, const iterator& b) noexcept { return a.rank_ == b.rank_; }

   private:
    State state_;
    std::uint64_t rank_ = 0;
    Digit radix_ = 1;
    std::size_t first_changed_ = 0;
  };

  StateRange(const Architecture& arch, std::size_t value_count)
      : StateRange(arch, value_count, 0, state_count_u64(param_count(arch), value_count)) {}

  StateRange(const Architecture& arch, std::size_t value_count, std::uint64_t first, std::uint64_t last)
      : params_(param_count(arch)), radix_(value_count), first_(first), last_(last) {
    if (value_count == 0) throw std::invalid_argument("value set is empty");
    const auto total = state_count_u64(params_, radix_);
    if (first_ > last_ || last_ > total) throw std::out_of_range("state range outside [0, V^P)");
  }

  iterator begin() const { return iterator(state_from_rank(first_ < last_ ? first_ : 0, params_, radix_), first_, radix_); }
  iterator end() const { return iterator(State{}, last_, radix_); }
  std::uint64_t size() const noexcept { return last_ - first_; }

 private:
  std::size_t params_;
  std::size_t radix_;
  std::uint64_t first_;
  std::uint64_t last_;
};

inline StateRange state_iter(const Architecture& arch, const ValueSet& vs) { return StateRange(arch, vs.size()); }

inline StateRange state_iter(const Architecture& arch, const ValueSet& vs, std::uint64_t first, std::uint64_t last) {
  return StateRange(arch, vs.size(), first, last);
}

/// Evaluates h(x). Each neuron sums its weighted inputs in source order and
/// adds its bias last; the output sums weighted top-layer outputs in order.
/// `values` maps digits to numbers of the evaluation type.
template <class Number, class Activation>
Number evaluate(const Architecture& arch, const State& s, std::span<const Number> values, Activation&& act,
                std::span<const Number> x) {
  if (x.size() != arch.input_count()) throw std::invalid_argument("input arity does not match architecture");
  if (s.size() != param_count(arch)) throw std::invalid_argument("state length does not match architecture");
  std::vector<Number> prev(x.begin(), x.end());
  std::vector<Number> cur;
  std::size_t k = 0;
  for (std::size_t l = 1; l <= arch.depth(); ++l) {
    cur.assign(arch.width(l), Number(0));
    for (std::size_t i = 0; i < arch.width(l); ++i) {
      Number acc(0);
      for (std::size_t j = 0; j < prev.size(); ++j) acc += values[s[k++]] * prev[j];
      acc += values[s[k++]];
      cur[i] = act(acc);
    }
    prev.swap(cur);
  }
  Number out(0);
  for (std::size_t j = 0; j < prev.size(); ++j) out += values[s[k++]] * prev[j];
  if (arch.include_output_bias()) out += values[s[k++]];
  return out;
}

}  // namespace hspace
