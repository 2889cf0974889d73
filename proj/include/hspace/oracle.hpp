#pragma once

// Verification harness: brute-force orbits against Burnside, exact action
// invariance of the network function, homomorphism and faithfulness of the
// induced action, and class-formula cycle counts against explicit cycles.

#include "hspace/arch.hpp"
#include "hspace/burnside.hpp"
#include "hspace/symmetry.hpp"

#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hspace {

/// A deliberately broken induced map that leaves output weights in place.
/// Only for exercising the oracle's failure path.
inline ParamPermutation corrupted_param_permutation(const Architecture& arch, const HiddenPermutation& g) {
  ParamPermutation p = induced_param_permutation(arch, g);
  const ParamLayout layout(arch);
  for (std::size_t j = 0; j < arch.width(arch.depth()); ++j) p.image[layout.output_weight(j)] = layout.output_weight(j);
  return p;
}

/// Exact nonlinear activation on rationals with no symmetry of its own.
struct ProbeActivation {
  Rational operator()(const Rational& a) const {
    if (a > 0) return a * a + Rational(1, 3);
    return a / 2 - Rational(1, 7);
  }
};

struct RandomCase {
  State state;
  HiddenPermutation g;
  std::vector<Rational> x;
};

inline HiddenPermutation random_hidden_permutation(const Architecture& arch, std::mt19937_64& rng) {
  HiddenPermutation g = HiddenPermutation::identity(arch);
  for (auto& p : g.per_layer) std::shuffle(p.image.begin(), p.image.end(), rng);
  return g;
}

inline State random_state(std::size_t params, std::size_t value_count, std::mt19937_64& rng) {
  State s{std::vector<Digit>(params)};
  for (auto& d : s.digits) d = static_cast<Digit>(rng() % value_count);
  return s;
}

inline std::vector<Rational> random_input(std::size_t n, std::mt19937_64& rng) {
  std::vector<Rational> x;
  for (std::size_t j = 0; j < n; ++j)
    x.emplace_back(static_cast<long>(rng() % 41) - 20, static_cast<long>(rng() % 7) + 1);
  return x;
}

struct OracleOptions {
  EnumerationGuard guard{};
  std::size_t shards = 1;
  std::size_t invariance_cases = 10'000;
  std::size_t homomorphism_cases = 1'000;
  std::uint64_t seed = 20190523;
  InducedMap induce = induced_param_permutation;
};

struct OracleCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  std::string burnside_count;
  std::string orbit_count;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline std::string describe(const State& s) {
  std::string out = "[";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? " " : "") + std::to_string(s[k]);
  return out + "]";
}

inline std::string describe(const HiddenPermutation& g) {
  std::string out;
  for (std::size_t l = 0; l < g.per_layer.size(); ++l) out += (l ? " x " : "") + to_cycle_notation(g.per_layer[l]);
  return out;
}

}  // namespace detail

inline OracleReport run_oracle(const Architecture& arch, const ValueSet& vs, const OracleOptions& opt = {}) {
  OracleReport report;
  const std::size_t params = param_count(arch);
  const SymmetryGroup group(arch, opt.induce);
  std::mt19937_64 rng(opt.seed);

  {
    OracleCheck c{"orbit count (Burnside vs brute force)"};
    const BigInt exact = burnside_exact(arch, vs.size());
    OrbitOptions oo;
    oo.guard = opt.guard;
    oo.shards = opt.shards;
    oo.keep_representatives = false;
    const auto enumerated = orbit_enumerate(group, vs.size(), oo);
    report.burnside_count = exact.str();
    report.orbit_count = std::to_string(enumerated.orbit_count);
    c.passed = exact == enumerated.orbit_count;
    c.detail = "burnside " + report.burnside_count + ", enumerated " + report.orbit_count;
    report.checks.push_back(c);
  }

  {
    OracleCheck c{"action invariance (exact rational)"};
    std::vector<Rational> values = vs.values();
    auto fails = [&](const State& s, const ParamPermutation& p, const std::vector<Rational>& x) {
      const std::span<const Rational> vals(values), xs(x);
      return evaluate(arch, s, vals, ProbeActivation{}, xs) != evaluate(arch, apply(s, p), vals, ProbeActivation{}, xs);
    };
    bool failed = false;
    for (std::size_t t = 0; t < opt.invariance_cases && !failed; ++t) {
      const State s = random_state(params, vs.size(), rng);
      const auto gi = rng() % group.order();
      failed = fails(s, group.induced()[gi], random_input(arch.input_count(), rng));
    }
    c.passed = !failed;
    c.detail = std::to_string(opt.invariance_cases) + " random cases";
    if (failed) {
      // Smallest failing state in lexicographic order, first failing element.
      const std::vector<Rational> x(arch.input_count(), Rational(1, 2));
      const auto limit = std::min<BigInt>(state_count(arch, vs.size()), BigInt(opt.guard.max_states));
      const auto total = static_cast<std::uint64_t>(limit);
      bool found = false;
      for (auto it = StateRange(arch, vs.size(), 0, total).begin(); it.rank() < total && !found; ++it)
        for (std::size_t gi = 0; gi < group.order() && !found; ++gi)
          if (fails(*it, group.induced()[gi], x)) {
            found = true;
            c.detail = "counterexample: state " + detail::describe(*it) + ", g = " + detail::describe(group.elements()[gi]) +
                       ", x = " + to_string(x[0]);
          }
    }
    report.checks.push_back(c);
  }

  {
    OracleCheck c{"homomorphism and faithfulness"};
    const auto identity = opt.induce(arch, HiddenPermutation::identity(arch));
    if (!identity.is_identity()) {
      c.passed = false;
      c.detail = "identity does not induce the identity";
    }
    for (std::size_t t = 0; t < opt.homomorphism_cases && c.passed; ++t) {
      const auto g1 = random_hidden_permutation(arch, rng);
      const auto g2 = random_hidden_permutation(arch, rng);
      const auto lhs = opt.induce(arch, compose(g2, g1));
      const auto rhs = compose(opt.induce(arch, g2), opt.induce(arch, g1));
      if (lhs != rhs) {
        c.passed = false;
        c.detail = "counterexample: g1 = " + detail::describe(g1) + ", g2 = " + detail::describe(g2);
      }
    }
    for (std::size_t gi = 0; gi < group.order() && c.passed; ++gi) {
      if (!group.induced()[gi].is_bijection() || (!group.elements()[gi].is_identity() && group.induced()[gi].is_identity())) {
        c.passed = false;
        c.detail = "counterexample: g = " + detail::describe(group.elements()[gi]) + " acts trivially or not bijectively";
      }
    }
    if (c.passed) c.detail = std::to_string(opt.homomorphism_cases) + " random pairs, " + std::to_string(group.order()) + " elements";
    report.checks.push_back(c);
  }

  {
    OracleCheck c{"cycle counts (class formula vs explicit)"};
    for (std::size_t gi = 0; gi < group.order() && c.passed; ++gi) {
      const auto& g = group.elements()[gi];
      const auto explicit_cycles = cycle_count(group.induced()[gi]);
      const auto formula = cycles_from_types(arch, cycle_type(g));
      if (explicit_cycles != formula) {
        c.passed = false;
        c.detail = "counterexample: g = " + detail::describe(g) + ", explicit " + std::to_string(explicit_cycles) +
                   ", formula " + std::to_string(formula);
      }
    }
    if (c.passed) c.detail = std::to_string(group.order()) + " elements";
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace hspace
