#include <gtest/gtest.h>

#include "boxworld/boxworld.hpp"

using namespace boxworld;

namespace {

using Tuple = std::vector<std::size_t>;

Rational q(long n, unsigned long d) { return make_rational(n, d); }

/// Direct recursion for the number of basic strategies on identical k x l
/// boxes: n * k * count(n-1)^l.
std::uint64_t identical_box_count(std::size_t n, std::uint64_t k, std::uint64_t l) {
  if (n == 0) return 1;
  std::uint64_t sub = identical_box_count(n - 1, k, l), p = 1;
  for (std::uint64_t i = 0; i < l; ++i) p *= sub;
  return n * k * p;
}

/// Measure box 0 with input 0; on output 0 measure box 1 with input 0,
/// otherwise with input 1.
BasicStrategy adaptive_pr_strategy() {
  return BasicStrategy(pr_box().layout(),
                       make_branch(0, 0, {make_branch(1, 0, {make_leaf(), make_leaf()}),
                                          make_branch(1, 1, {make_leaf(), make_leaf()})}));
}

}  // namespace

TEST(Strategies, CountMatchesRecursion) {
  EXPECT_EQ(count_strategies(SystemLayout{{2, 2}, {2, 2}}), 16u);
  EXPECT_EQ(count_strategies(SystemLayout{{2, 2}, {2, 2}, {2, 2}}), identical_box_count(3, 2, 2));
  EXPECT_EQ(identical_box_count(3, 2, 2), 1536u);
  // box 0 first: 2 * 3^3, box 1 first: 3 * 2^2
  EXPECT_EQ(count_strategies(SystemLayout{{2, 3}, {3, 2}}), 66u);
  EXPECT_EQ(count_strategies(SystemLayout{{5, 7}}), 5u);
}

TEST(Strategies, EnumerationIsCompleteAndDistinct) {
  const SystemLayout l{{2, 3}, {3, 2}};
  std::set<std::string> seen;
  enumerate_strategies(l, [&](const BasicStrategy& s) {
    EXPECT_TRUE(s.injective());
    seen.insert(strategy_to_json(s).dump());
  });
  EXPECT_EQ(seen.size(), 66u);
  EXPECT_THROW(enumerate_strategies(l, [](const BasicStrategy&) {}, 10), ResourceError);
}

TEST(Strategies, RejectsRepeatedBoxOnAPath) {
  const SystemLayout l{{2, 2}, {2, 2}};
  EXPECT_THROW(BasicStrategy(l, make_branch(0, 0, {make_branch(0, 1, {make_leaf(), make_leaf()}), make_leaf()})),
               ParameterError);
  EXPECT_THROW(BasicStrategy(l, make_branch(0, 2, {make_leaf(), make_leaf()})), ParameterError);
}

TEST(Strategies, EvaluateOnPrBox) {
  const auto dist = evaluate_strategy(pr_box(), adaptive_pr_strategy());
  // x = 0 on box 0 forces a = b whatever box 1 uses
  ASSERT_EQ(dist.size(), 4u);
  EXPECT_EQ(dist.at(Tuple{0, 0}), q(1, 2));
  EXPECT_EQ(dist.at(Tuple{1, 1}), q(1, 2));
  EXPECT_EQ(dist.at(Tuple{0, 1}), 0);
  EXPECT_EQ(dist.at(Tuple{1, 0}), 0);
}

TEST(Strategies, EvaluateFiducialOnMainExample) {
  const auto s = example_main(4);
  const auto dist = evaluate_strategy(s, fiducial_strategy(s.layout(), {1, 0}));
  Rational total = 0;
  std::size_t support = 0;
  for (const auto& [label, p] : dist) {
    total += p;
    support += sgn(p) != 0;
  }
  EXPECT_EQ(total, 1);
  EXPECT_EQ(dist.size(), 10u);  // one label per output tuple
  EXPECT_EQ(support, 5u);       // (0,1) and (i,0) for i = 1..4
}

TEST(Strategies, JsonRoundTrip) {
  const auto s = adaptive_pr_strategy();
  const auto back = strategy_from_json(json::parse(strategy_to_json(s).dump()));
  EXPECT_EQ(strategy_to_json(back), strategy_to_json(s));
}

TEST(Effects, StrategyEffectsFormAMeasurement) {
  const auto effects = effects_of(strategy_effects(adaptive_pr_strategy()));
  EXPECT_EQ(effects.size(), 4u);
  EXPECT_TRUE(is_measurement(effects));
  EXPECT_TRUE(is_maximally_informative(effects));
  Rational total = 0;
  for (const auto& e : effects) total += effect_apply(e, noisy_pr_box(q(1, 3)));
  EXPECT_EQ(total, 1);
}

TEST(Effects, DroppingAnOutcomeIsNotAMeasurement) {
  auto effects = effects_of(strategy_effects(adaptive_pr_strategy()));
  effects.pop_back();
  EXPECT_FALSE(is_measurement(effects));
}

TEST(Effects, CoarseGrainedStrategyIsNotFineGrained) {
  // Label by parity only: two outcomes, each a sum of two single entries.
  const auto coarse = relabel(adaptive_pr_strategy(), [](const Tuple& a) { return OutcomeLabel{a[0] ^ a[1]}; });
  EXPECT_FALSE(coarse.injective());
  const auto effects = effects_of(strategy_effects(coarse));
  EXPECT_TRUE(is_measurement(effects));
  EXPECT_FALSE(is_maximally_informative(effects));
}

TEST(Effects, EqualityModuloNoSignalling) {
  // On two-box states p(a0|x0=0) summed over box 1's output does not depend
  // on which input box 1 used.
  const SystemLayout l{{2, 2}, {2, 2}};
  std::vector<Rational> r(l.table_size()), s(l.table_size());
  for (std::size_t b = 0; b < 2; ++b) {
    r[l.flat_index(Tuple{0, 0}, Tuple{0, b})] = 1;
    s[l.flat_index(Tuple{0, 1}, Tuple{0, b})] = 1;
  }
  EXPECT_TRUE(effects_equal(EffectVector(l, r), EffectVector(l, s)));
  s[l.flat_index(Tuple{0, 1}, Tuple{0, 0})] = 0;
  EXPECT_FALSE(effects_equal(EffectVector(l, r), EffectVector(l, s)));
}

TEST(Effects, SingleOutputBoxesAreUnsupported) {
  const SystemLayout l{{2, 1}, {2, 2}};
  std::vector<EffectVector> e{EffectVector(l, std::vector<Rational>(l.table_size(), 1))};
  EXPECT_THROW(is_measurement(e), UnsupportedLayoutError);
}

TEST(Effects, CoefficientsOutsideUnitIntervalRejected) {
  const SystemLayout l{{1, 2}};
  EXPECT_THROW(EffectVector(l, {q(3, 2), Rational(0)}), ParameterError);
  EXPECT_THROW(EffectVector(l, {Rational(1)}), StructuralError);
}

TEST(SeparatingState, DifferentOutputs) {
  const SystemLayout l{{2, 3}, {3, 2}};
  const OutputInput first{{1, 0}, {0, 2}}, second{{2, 1}, {1, 0}};
  const auto s = separating_state(l, first, second);
  EXPECT_EQ(s.prob(first.outputs, first.inputs), 0);
  EXPECT_GT(s.prob(second.outputs, second.inputs), 0);
}

TEST(SeparatingState, SameOutputsDifferentInputs) {
  const SystemLayout l{{2, 3}, {3, 2}};
  const OutputInput first{{1, 1}, {0, 2}}, second{{1, 1}, {0, 1}};
  const auto s = separating_state(l, first, second);
  EXPECT_EQ(s.prob(first.outputs, first.inputs), 0);
  EXPECT_EQ(s.prob(second.outputs, second.inputs), 1);
  EXPECT_THROW(separating_state(l, first, first), ParameterError);
}

TEST(Deterministic, CountAndEnumeration) {
  const SystemLayout l{{2, 3}, {1, 2}};
  EXPECT_EQ(count_deterministic(l), 18u);  // 3^2 * 2
  const auto all = enumerate_deterministic(l);
  EXPECT_EQ(all.size(), 18u);
  for (const auto& d : all) {
    const auto st = deterministic_state(l, d.outputs);
    EXPECT_TRUE(validate_state(st.layout(), st.table()).ok());
  }
}
