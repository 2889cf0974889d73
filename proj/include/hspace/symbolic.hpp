#pragma once

// Canonical normal forms of the network function with the activation left
// uninterpreted, and counting of distinct forms over a state space.

#include "hspace/arch.hpp"
#include "hspace/numbers.hpp"
#include "hspace/parallel.hpp"
#include "hspace/symmetry.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hspace {

/// How far like terms are merged when a form is normalized. Terms are always
/// sorted; with combine_like_terms off a form keeps one term per source (a
/// sorted multiset), which is what distinguishes σ(a)-σ(a) from nothing.
struct NormalizationPolicy {
  bool combine_like_terms = false;
  bool drop_zero_terms = false;

  void validate() const {
    if (drop_zero_terms && !combine_like_terms)
      throw std::invalid_argument("dropping zero terms requires combining like terms");
  }

  static NormalizationPolicy sorted() { return {false, false}; }
  static NormalizationPolicy combined() { return {true, false}; }
  static NormalizationPolicy combined_dropped() { return {true, true}; }

  bool operator==(const NormalizationPolicy&) const = default;
};

inline std::string to_string(const NormalizationPolicy& p) {
  p.validate();
  if (!p.combine_like_terms) return "sorted";
  return p.drop_zero_terms ? "combined-dropped" : "combined";
}

inline NormalizationPolicy parse_policy(std::string_view text) {
  if (text == "sorted") return NormalizationPolicy::sorted();
  if (text == "combined") return NormalizationPolicy::combined();
  if (text == "combined-dropped") return NormalizationPolicy::combined_dropped();
  throw std::invalid_argument("unknown normalization policy '" + std::string(text) + "'");
}

inline const std::vector<NormalizationPolicy>& all_policies() {
  static const std::vector<NormalizationPolicy> policies{NormalizationPolicy::sorted(), NormalizationPolicy::combined(),
                                                         NormalizationPolicy::combined_dropped()};
  return policies;
}

struct AffineForm;

/// Either an input variable x_j or σ applied to a normal form.
struct Atom {
  enum class Kind { var, sigma };
  Kind kind = Kind::var;
  std::size_t var_index = 0;
  std::shared_ptr<const AffineForm> arg;

  static Atom var(std::size_t j) { return Atom{Kind::var, j, nullptr}; }
  static Atom sigma(std::shared_ptr<const AffineForm> form) { return Atom{Kind::sigma, 0, std::move(form)}; }
};

struct Term {
  Atom atom;
  Rational coefficient;
};

/// constant + Σ coefficient·atom with terms in canonical order.
struct AffineForm {
  Rational constant;
  std::vector<Term> terms;
  std::uint64_t fingerprint = 0;
};

namespace detail {

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
  // splitmix64 finalizer over a running combination
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_bigint(const BigInt& v) {
  std::uint64_t h = v.sign() < 0 ? 0x5bd1e995ULL : 0x1b873593ULL;
  BigInt mag = boost::multiprecision::abs(v);
  do {
    h = mix(h, static_cast<std::uint64_t>(mag & BigInt(0xFFFFFFFFFFFFFFFFULL)));
    mag >>= 64;
  } while (mag != 0);
  return h;
}

inline std::uint64_t hash_rational(const Rational& r) {
  return mix(hash_bigint(boost::multiprecision::numerator(r)), hash_bigint(boost::multiprecision::denominator(r)));
}

inline std::uint64_t hash_atom(const Atom& a) {
  return a.kind == Atom::Kind::var ? mix(0x76617200ULL, a.var_index) : mix(0x7369676dULL, a.arg->fingerprint);
}

}  // namespace detail

inline std::strong_ordering compare(const AffineForm& a, const AffineForm& b);

/// Every Var precedes every Sigma; Vars by index; Sigmas by their arguments.
inline std::strong_ordering compare(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return a.kind == Atom::Kind::var ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.kind == Atom::Kind::var) return a.var_index <=> b.var_index;
  if (a.arg == b.arg) return std::strong_ordering::equal;
  return compare(*a.arg, *b.arg);
}

inline std::strong_ordering compare_rational(const Rational& a, const Rational& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

/// Constant first, then the term sequence lexicographically (atom, then
/// coefficient), shorter sequences first on a common prefix.
inline std::strong_ordering compare(const AffineForm& a, const AffineForm& b) {
  if (&a == &b) return std::strong_ordering::equal;
  if (auto c = compare_rational(a.constant, b.constant); c != 0) return c;
  const auto n = std::min(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare(a.terms[i].atom, b.terms[i].atom); c != 0) return c;
    if (auto c = compare_rational(a.terms[i].coefficient, b.terms[i].coefficient); c != 0) return c;
  }
  return a.terms.size() <=> b.terms.size();
}

/// Structural identity.
inline bool operator==(const AffineForm& a, const AffineForm& b) {
  return a.fingerprint == b.fingerprint && compare(a, b) == 0;
}

/// Sorts terms and, per policy, merges like atoms and drops zero coefficients;
/// fills in the fingerprint.
inline std::shared_ptr<const AffineForm> normalize(Rational constant, std::vector<Term> terms, const NormalizationPolicy& policy) {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
    const auto c = compare(x.atom, y.atom);
    return c != 0 ? c < 0 : x.coefficient < y.coefficient;
  });
  if (policy.combine_like_terms) {
    std::vector<Term> merged;
    for (auto& t : terms) {
      if (!merged.empty() && compare(merged.back().atom, t.atom) == 0)
        merged.back().coefficient += t.coefficient;
      else
        merged.push_back(std::move(t));
    }
    if (policy.drop_zero_terms)
      std::erase_if(merged, [](const Term& t) { return t.coefficient == 0; });
    terms = std::move(merged);
  }
  auto form = std::make_shared<AffineForm>();
  form->constant = std::move(constant);
  form->terms = std::move(terms);
  std::uint64_t h = detail::mix(0x666f726dULL, detail::hash_rational(form->constant));
  for (const auto& t : form->terms) h = detail::mix(detail::mix(h, detail::hash_atom(t.atom)), detail::hash_rational(t.coefficient));
  form->fingerprint = h;
  return form;
}

/// Normal form of h for state s: each hidden neuron becomes σ(normal form of
/// its weighted inputs plus bias), the output is the normal form of the
/// weighted top-layer atoms (plus output bias when enabled).
inline std::shared_ptr<const AffineForm> build_normal_form(const Architecture& arch, const State& s, const ValueSet& vs,
                                                           const NormalizationPolicy& policy = {}) {
  policy.validate();
  if (s.size() != param_count(arch)) throw std::invalid_argument("state length does not match architecture");
  std::vector<Atom> prev;
  for (std::size_t j = 0; j < arch.input_count(); ++j) prev.push_back(Atom::var(j));
  std::vector<Atom> cur;
  std::size_t k = 0;
  for (std::size_t l = 1; l <= arch.depth(); ++l) {
    cur.clear();
    for (std::size_t i = 0; i < arch.width(l); ++i) {
      std::vector<Term> terms;
      terms.reserve(prev.size());
      for (const auto& src : prev) terms.push_back({src, vs[s[k++]]});
      const Rational& bias = vs[s[k++]];
      cur.push_back(Atom::sigma(normalize(bias, std::move(terms), policy)));
    }
    prev.swap(cur);
  }
  std::vector<Term> terms;
  for (const auto& src : prev) terms.push_back({src, vs[s[k++]]});
  Rational constant = arch.include_output_bias() ? vs[s[k++]] : Rational(0);
  return normalize(std::move(constant), std::move(terms), policy);
}

inline std::string serialize(const AffineForm& f);

inline std::string serialize(const Atom& a) {
  if (a.kind == Atom::Kind::var) return "x" + std::to_string(a.var_index + 1);
  return "sigma(" + serialize(*a.arg) + ")";
}

/// One-line canonical text, e.g. "0 + 2*sigma(1 + 1*x1)". Injective on forms.
inline std::string serialize(const AffineForm& f) {
  std::string s = to_string(f.constant);
  for (const auto& t : f.terms) s += " + " + to_string(t.coefficient) + "*" + serialize(t.atom);
  return s;
}

/// Set of normal forms keyed by fingerprint; forms sharing a fingerprint are
/// told apart by their canonical serialization.
class FormSet {
 public:
  bool insert(const AffineForm& f) {
    auto& bucket = buckets_[f.fingerprint];
    std::string text = serialize(f);
    if (std::find(bucket.begin(), bucket.end(), text) != bucket.end()) return false;
    bucket.push_back(std::move(text));
    ++size_;
    return true;
  }

  void merge(FormSet&& other) {
    for (auto& [fp, texts] : other.buckets_) {
      auto& bucket = buckets_[fp];
      for (auto& t : texts) {
        if (std::find(bucket.begin(), bucket.end(), t) != bucket.end()) continue;
        bucket.push_back(std::move(t));
        ++size_;
      }
    }
    other.buckets_.clear();
    other.size_ = 0;
  }

  std::uint64_t size() const noexcept { return size_; }

  /// All serialized forms in byte order.
  std::vector<std::string> listing() const {
    std::vector<std::string> out;
    out.reserve(size_);
    for (const auto& [fp, texts] : buckets_) out.insert(out.end(), texts.begin(), texts.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::unordered_map<std::uint64_t, std::vector<std::string>> buckets_;
  std::uint64_t size_ = 0;
};

struct SymbolicOptions {
  EnumerationGuard guard{};
  std::size_t shards = 1;
  /// Visit only lexicographically minimal orbit representatives.
  bool orbit_reduced = true;
};

struct SymbolicCount {
  std::uint64_t count = 0;
  FormSet forms;
};

/// Number of distinct normal forms over all V^P states.
inline SymbolicCount count_unique_symbolic(const Architecture& arch, const ValueSet& vs, const NormalizationPolicy& policy = {},
                                           const SymbolicOptions& opt = {}) {
  policy.validate();
  opt.guard.check(state_count(arch, vs.size()), "symbolic count of " + arch.to_string());
  std::unique_ptr<SymmetryGroup> group;
  if (opt.orbit_reduced) group = std::make_unique<SymmetryGroup>(arch);
  const StateRange all(arch, vs.size());
  std::vector<FormSet> parts(std::max<std::size_t>(opt.shards, 1));
  run_sharded(all.size(), opt.shards, [&](std::size_t shard, std::uint64_t first, std::uint64_t last) {
    auto& part = parts[shard];
    for (auto it = StateRange(arch, vs.size(), first, last).begin(); it.rank() < last; ++it) {
      if (group && !group->is_canonical(*it)) continue;
      part.insert(*build_normal_form(arch, *it, vs, policy));
    }
  });
  SymbolicCount out;
  for (auto& part : parts) out.forms.merge(std::move(part));
  out.count = out.forms.size();
  return out;
}

}  // namespace hspace
