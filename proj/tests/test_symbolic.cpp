#include "hspace/burnside.hpp"
#include "hspace/oracle.hpp"
#include "hspace/symbolic.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace hspace;

namespace {

std::string form_of(const char* spec, std::vector<Digit> digits, const ValueSet& vs, NormalizationPolicy policy) {
  return serialize(*build_normal_form(parse_architecture(spec), State{std::move(digits)}, vs, policy));
}

std::uint64_t count(const char* spec, std::size_t v, NormalizationPolicy policy, SymbolicOptions opt = {}) {
  return count_unique_symbolic(parse_architecture(spec), default_value_set(v), policy, opt).count;
}

// Brute force over every state with a plain std::set of serializations.
std::uint64_t brute_count(const Architecture& arch, const ValueSet& vs, NormalizationPolicy policy) {
  std::set<std::string> seen;
  for (const auto& s : StateRange(arch, vs.size())) seen.insert(serialize(*build_normal_form(arch, s, vs, policy)));
  return seen.size();
}

}  // namespace

TEST(NormalizationPolicy, Names) {
  for (const auto& p : all_policies()) EXPECT_EQ(parse_policy(to_string(p)), p);
  EXPECT_THROW(parse_policy("loose"), std::invalid_argument);
  EXPECT_THROW((NormalizationPolicy{false, true}).validate(), std::invalid_argument);
}

TEST(BuildNormalForm, SingleNeuron) {
  const auto vs = parse_value_set("1");
  EXPECT_EQ(form_of("1-1", {0, 0, 0}, vs, NormalizationPolicy::sorted()), "0 + 1*sigma(1 + 1*x1)");
}

TEST(BuildNormalForm, LikeTermsCombine) {
  const auto vs = parse_value_set("1");
  EXPECT_EQ(form_of("1-2", {0, 0, 0, 0, 0, 0}, vs, NormalizationPolicy::combined()), "0 + 2*sigma(1 + 1*x1)");
  EXPECT_EQ(form_of("1-2", {0, 0, 0, 0, 0, 0}, vs, NormalizationPolicy::sorted()),
            "0 + 1*sigma(1 + 1*x1) + 1*sigma(1 + 1*x1)");
}

TEST(BuildNormalForm, CancellationInsideArgument) {
  const auto vs = default_value_set(3);  // digits 0,1,2 -> -1,0,1
  // layer 1: two identical neurons (1, 1); layer 2 neuron 1: weights (1, -1), bias 0;
  // neuron 2: weights (1, 1), bias 1; output weights (1, 0)
  const std::vector<Digit> s{2, 2, 2, 2, 2, 0, 1, 2, 2, 2, 2, 1};
  EXPECT_EQ(form_of("1-2-2", s, vs, NormalizationPolicy::combined_dropped()), "0 + 1*sigma(0)");
  EXPECT_EQ(form_of("1-2-2", s, vs, NormalizationPolicy::combined()),
            "0 + 1*sigma(0 + 0*sigma(1 + 1*x1)) + 0*sigma(1 + 2*sigma(1 + 1*x1))");
}

TEST(BuildNormalForm, DeterministicAndOrderedAtoms) {
  const auto vs = default_value_set(3);
  const auto arch = parse_architecture("2-2-2");
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_state(param_count(arch), 3, rng);
    for (const auto& policy : all_policies()) {
      const auto a = build_normal_form(arch, s, vs, policy);
      const auto b = build_normal_form(arch, s, vs, policy);
      EXPECT_TRUE(*a == *b);
      EXPECT_EQ(serialize(*a), serialize(*b));
      for (std::size_t i = 1; i < a->terms.size(); ++i) {
        const auto c = compare(a->terms[i - 1].atom, a->terms[i].atom);
        if (policy.combine_like_terms)
          EXPECT_TRUE(c < 0);
        else
          EXPECT_TRUE(c <= 0);
      }
      if (policy.drop_zero_terms)
        for (const auto& term : a->terms) EXPECT_NE(term.coefficient, 0);
    }
  }
}

TEST(Atom, OrderPutsVariablesFirst) {
  const auto f = normalize(Rational(0), {}, {});
  const auto g = normalize(Rational(1), {}, {});
  EXPECT_TRUE(compare(Atom::var(0), Atom::var(1)) < 0);
  EXPECT_TRUE(compare(Atom::var(7), Atom::sigma(f)) < 0);
  EXPECT_TRUE(compare(Atom::sigma(f), Atom::sigma(g)) < 0);
  const auto longer = normalize(Rational(0), {Term{Atom::var(0), Rational(1)}}, {});
  EXPECT_TRUE(compare(*f, *longer) < 0);
}

TEST(FormSet, SeparatesFingerprintCollisions) {
  auto a = std::make_shared<AffineForm>(*normalize(Rational(1), {}, {}));
  auto b = std::make_shared<AffineForm>(*normalize(Rational(2), {}, {}));
  b->fingerprint = a->fingerprint;
  FormSet set;
  EXPECT_TRUE(set.insert(*a));
  EXPECT_TRUE(set.insert(*b));
  EXPECT_FALSE(set.insert(*a));
  EXPECT_EQ(set.size(), 2u);
  FormSet other;
  other.insert(*b);
  other.insert(*normalize(Rational(3), {}, {}));
  set.merge(std::move(other));
  EXPECT_EQ(set.size(), 3u);
  EXPECT_EQ(set.listing(), (std::vector<std::string>{"1", "2", "3"}));
}

TEST(CountUniqueSymbolic, SingleNeuronAllDistinct) {
  for (const auto& policy : all_policies()) EXPECT_EQ(count("1-1", 2, policy), 8u);
}

TEST(CountUniqueSymbolic, SortedPolicyReproducesReportedCountsAtVTwo) {
  EXPECT_EQ(count("1-4", 2, NormalizationPolicy::sorted()), 330u);
  EXPECT_EQ(count("1-2-2", 2, NormalizationPolicy::sorted()), 1128u);
}

// Frozen from an independent brute-force prototype (plain enumeration, no
// orbit reduction).
TEST(CountUniqueSymbolic, PolicyTableAtVTwo) {
  EXPECT_EQ(count("1-4", 2, NormalizationPolicy::combined()), 306u);
  EXPECT_EQ(count("1-4", 2, NormalizationPolicy::combined_dropped()), 225u);
  EXPECT_EQ(count("1-2-2", 2, NormalizationPolicy::combined()), 1128u);
  EXPECT_EQ(count("1-2-2", 2, NormalizationPolicy::combined_dropped()), 1033u);
  EXPECT_EQ(count("1-2", 2, NormalizationPolicy::combined_dropped()), 33u);
}

// Combining like terms merges states from different orbits:
// {(a,+1),(a,+1),(a,-1),(c,+1)} and {(a,+1),(c,+1),(c,+1),(c,-1)} both give
// 1*σ(a) + 1*σ(c).
TEST(CountUniqueSymbolic, CombinedPolicyMergesDistinctOrbits) {
  const auto arch = parse_architecture("1-4");
  const auto vs = default_value_set(2);  // digit 0 -> -1, 1 -> +1
  // a = σ(x+1) -> (1,1); c = σ(-x+1) -> (0,1)
  const State s1{{1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 0, 1}};
  const State s2{{1, 1, 0, 1, 0, 1, 0, 1, 1, 1, 0, 1}};
  const SymmetryGroup group(arch);
  EXPECT_NE(group.canonical(s1), group.canonical(s2));
  EXPECT_EQ(serialize(*build_normal_form(arch, s1, vs, NormalizationPolicy::combined())),
            serialize(*build_normal_form(arch, s2, vs, NormalizationPolicy::combined())));
  EXPECT_NE(serialize(*build_normal_form(arch, s1, vs, NormalizationPolicy::sorted())),
            serialize(*build_normal_form(arch, s2, vs, NormalizationPolicy::sorted())));
}

TEST(CountUniqueSymbolic, OrbitConstancy) {
  std::mt19937_64 rng(8);
  for (const char* spec : {"1-4", "1-2-2", "2-3-2"}) {
    const auto arch = parse_architecture(spec);
    const auto vs = default_value_set(3);
    for (int t = 0; t < 300; ++t) {
      const auto s = random_state(param_count(arch), 3, rng);
      const auto g = random_hidden_permutation(arch, rng);
      const auto moved = apply(s, induced_param_permutation(arch, g));
      for (const auto& policy : all_policies())
        EXPECT_TRUE(*build_normal_form(arch, s, vs, policy) == *build_normal_form(arch, moved, vs, policy)) << spec;
    }
  }
  // exhaustive on a tiny net
  const auto arch = parse_architecture("1-2-2");
  const SymmetryGroup group(arch);
  const auto vs = default_value_set(2);
  for (const auto& s : StateRange(arch, 2))
    for (const auto& p : group.induced())
      ASSERT_TRUE(*build_normal_form(arch, s, vs) == *build_normal_form(arch, apply(s, p), vs));
}

TEST(CountUniqueSymbolic, OrbitReductionIsSound) {
  for (const char* spec : {"1-2", "1-3", "1-2-2", "2-2", "1-1-2"}) {
    for (std::size_t v : {2u, 3u}) {
      const auto arch = parse_architecture(spec);
      if (state_count(arch, v) > (1u << 12)) continue;
      for (const auto& policy : all_policies()) {
        SymbolicOptions full;
        full.orbit_reduced = false;
        const auto reduced = count_unique_symbolic(arch, default_value_set(v), policy).count;
        EXPECT_EQ(reduced, count_unique_symbolic(arch, default_value_set(v), policy, full).count) << spec;
        EXPECT_EQ(reduced, brute_count(arch, default_value_set(v), policy)) << spec;
      }
    }
  }
}

TEST(CountUniqueSymbolic, BoundedByOrbitCountAndMonotoneInPolicy) {
  for (const char* spec : {"1-2", "1-3", "1-4", "1-2-2", "2-2", "1-1-3"}) {
    for (std::size_t v : {2u, 3u}) {
      const auto arch = parse_architecture(spec);
      if (state_count(arch, v) > (1u << 16)) continue;
      const auto sorted = count(spec, v, NormalizationPolicy::sorted());
      const auto combined = count(spec, v, NormalizationPolicy::combined());
      const auto dropped = count(spec, v, NormalizationPolicy::combined_dropped());
      EXPECT_LE(sorted, burnside_exact(arch, v)) << spec;
      EXPECT_GE(sorted, combined) << spec;
      EXPECT_LE(dropped, combined) << spec;
    }
  }
}

TEST(CountUniqueSymbolic, ShallowSortedCountEqualsOrbitCount) {
  for (std::size_t u = 2; u <= 4; ++u) {
    const Architecture arch(1, {u});
    EXPECT_EQ(count_unique_symbolic(arch, default_value_set(2), NormalizationPolicy::sorted()).count, burnside_exact(arch, 2));
  }
}

TEST(CountUniqueSymbolic, ShardCountIndependent) {
  for (std::size_t shards : {1u, 2u, 8u}) {
    SymbolicOptions opt;
    opt.shards = shards;
    EXPECT_EQ(count("1-2-2", 2, NormalizationPolicy::sorted(), opt), 1128u);
    EXPECT_EQ(count("1-2-2", 2, NormalizationPolicy::combined_dropped(), opt), 1033u);
  }
}

TEST(CountUniqueSymbolic, ListingIsDeterministic) {
  const auto a = count_unique_symbolic(parse_architecture("1-2"), default_value_set(2)).forms.listing();
  SymbolicOptions opt;
  opt.shards = 3;
  const auto b = count_unique_symbolic(parse_architecture("1-2"), default_value_set(2), {}, opt).forms.listing();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 36u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(CountUniqueSymbolic, GuardRejectsLargeSpaces) {
  EXPECT_THROW(count_unique_symbolic(parse_architecture("1-3-3"), default_value_set(3)), GuardExceeded);
}

TEST(CountUniqueSymbolic, PolicyTableAtVThree) {
  EXPECT_EQ(count("1-4", 3, NormalizationPolicy::sorted()), 27405u);
  EXPECT_EQ(count("1-4", 3, NormalizationPolicy::combined()), 18423u);
  EXPECT_EQ(count("1-4", 3, NormalizationPolicy::combined_dropped()), 5641u);
  EXPECT_EQ(count("1-2-2", 3, NormalizationPolicy::sorted()), 132921u);
  EXPECT_EQ(count("1-2-2", 3, NormalizationPolicy::combined()), 127764u);
  EXPECT_EQ(count("1-2-2", 3, NormalizationPolicy::combined_dropped()), 46465u);
}
