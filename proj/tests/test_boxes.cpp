#include <gtest/gtest.h>

#include "boxworld/boxworld.hpp"

using namespace boxworld;

namespace {

using Tuple = std::vector<std::size_t>;

Rational q(long n, unsigned long d) { return make_rational(n, d); }

}  // namespace

TEST(Layout, IndexingIsBoxZeroMostSignificant) {
  SystemLayout l{{2, 3}, {3, 2}};
  EXPECT_EQ(l.input_tuples(), 6u);
  EXPECT_EQ(l.output_tuples(), 6u);
  EXPECT_EQ(l.table_size(), 36u);
  EXPECT_EQ(l.input_index(Tuple{1, 2}), 5u);
  EXPECT_EQ(l.output_index(Tuple{2, 0}), 4u);
  EXPECT_EQ(l.flat_index(Tuple{1, 0}, Tuple{0, 1}), 3u * 6u + 1u);
  EXPECT_EQ(l.decode_inputs(4), (Tuple{1, 1}));
  EXPECT_EQ(l.decode_outputs(5), (Tuple{2, 1}));
  EXPECT_EQ(l.non_classical_count(), 2u);
}

TEST(Layout, RejectsEmptyBoxes) {
  EXPECT_THROW(SystemLayout({{0, 2}}), ParameterError);
  EXPECT_THROW(SystemLayout({{2, 0}}), ParameterError);
}

TEST(Layout, OversizedTableIsResourceError) {
  std::vector<BoxSpec> many(40, BoxSpec{4, 4});
  EXPECT_THROW(SystemLayout{many}, ResourceError);
}

TEST(PrBox, TableMatchesDefinition) {
  const auto pr = pr_box();
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const Rational expected = ((a ^ b) == (x & y)) ? q(1, 2) : Rational(0);
          EXPECT_EQ(pr.prob(Tuple{a, b}, Tuple{x, y}), expected);
        }
  EXPECT_TRUE(validate_state(pr.layout(), pr.table()).ok());
}

TEST(Validate, NamesTheBrokenConstraint) {
  const auto pr = pr_box();
  std::vector<Rational> t(pr.table().begin(), pr.table().end());
  t[0] = q(3, 4);  // breaks normalization at x = (0,0) and no-signalling
  const auto report = validate_state(pr.layout(), t);
  EXPECT_FALSE(report.ok());
  EXPECT_GE(report.count(ViolationKind::normalization), 1u);
  EXPECT_EQ(report.count(ViolationKind::range), 0u);
  bool named = false;
  for (const auto& v : report.violations) named = named || v.describe().rfind("normalization", 0) == 0;
  EXPECT_TRUE(named);
  EXPECT_THROW(JointState::from_table(pr.layout(), t), InvalidStateError);
}

TEST(Validate, DetectsSignalling) {
  // Box 1 copies box 0's input: normalized but signalling.
  SystemLayout l{{2, 2}, {1, 2}};
  std::vector<Rational> t(l.table_size());
  for (std::size_t x = 0; x < 2; ++x) t[l.flat_index(Tuple{x, 0}, Tuple{0, x})] = 1;
  const auto report = validate_state(l, t);
  EXPECT_EQ(report.count(ViolationKind::normalization), 0u);
  EXPECT_GE(report.count(ViolationKind::no_signalling), 1u);
}

TEST(Validate, NegativeEntryIsRange) {
  SystemLayout l{{1, 2}};
  std::vector<Rational> t{q(3, 2), q(-1, 2)};
  const auto report = validate_state(l, t);
  EXPECT_EQ(report.count(ViolationKind::range), 2u);  // above 1 and below 0
}

TEST(Marginalize, PrBoxMarginalsAreUniform) {
  const auto m = marginalize(pr_box(), {1});
  ASSERT_EQ(m.size(), 1u);
  for (auto p : m.table()) EXPECT_EQ(p, q(1, 2));
}

TEST(Marginalize, MainExampleMarginalOfX) {
  const auto m = marginalize(example_main(4), {0});
  // x = 0: half on output 0, rest spread over 1..4
  EXPECT_EQ(m.prob(Tuple{0}, Tuple{0}), q(1, 2));
  EXPECT_EQ(m.prob(Tuple{3}, Tuple{0}), q(1, 8));
  EXPECT_EQ(m.prob(Tuple{0}, Tuple{1}), q(1, 2));
}

TEST(Tensor, LayoutsConcatenateAndTablesMultiply) {
  const auto a = pr_box();
  const auto b = classical_state({3}, {q(1, 2), q(1, 3), q(1, 6)});
  const auto t = tensor(a, b);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.prob(Tuple{1, 0, 2}, Tuple{1, 1, 0}), q(1, 12));
  EXPECT_TRUE(validate_state(t.layout(), t.table()).ok());
  EXPECT_EQ(marginalize(t, {0, 1}).canonical_key(), a.canonical_key());
}

TEST(Mix, ConvexCombination) {
  const auto pr = pr_box();
  const auto u = uniform_state(pr.layout());
  const auto m = mix({pr, u}, {q(1, 4), q(3, 4)});
  EXPECT_EQ(m.canonical_key(), noisy_pr_box(q(1, 4)).canonical_key());
  EXPECT_THROW(mix({pr, u}, {q(1, 2), q(1, 4)}), ParameterError);
}

TEST(Condition, SliceOfPrBoxIsDeterministic) {
  const auto parts = condition_all(pr_box(), 0, 1);
  ASSERT_EQ(parts.size(), 2u);
  for (const auto& c : parts) {
    EXPECT_EQ(c.probability, q(1, 2));
    ASSERT_TRUE(c.remainder.has_value());
    EXPECT_TRUE(is_deterministic_box(*c.remainder, 0));
  }
}

TEST(Constructors, ExampleMainIsValidForSeveralN) {
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u}) {
    const auto s = example_main(n);
    EXPECT_EQ(s.layout().box(0).outputs, n + 1);
    EXPECT_TRUE(validate_state(s.layout(), s.table()).ok()) << n;
  }
  EXPECT_THROW(example_main(0), ParameterError);
}

TEST(Constructors, DampedRejectsLambdaAboveOne) {
  EXPECT_NO_THROW(example_damped(4, 1));
  EXPECT_THROW(example_damped(4, 1.5), ParameterError);
  const auto lam = damped_lambda(1 << 16, 1);
  EXPECT_DOUBLE_EQ(lam.target, 0.125);
  EXPECT_EQ(lam.rounded, q(1, 8));
}

TEST(Constructors, ClassicalRealizationIsClassical) {
  const auto s = classical_realization(4);
  for (const auto& b : s.layout().boxes()) EXPECT_TRUE(b.classical());
  EXPECT_TRUE(validate_state(s.layout(), s.table()).ok());
}

TEST(StateJson, RoundTrip) {
  for (const auto& s : {pr_box(), example_main(3), noisy_pr_box(q(2, 3))}) {
    const auto back = state_from_json(json::parse(state_to_json(s).dump()));
    EXPECT_EQ(back.canonical_key(), s.canonical_key());
  }
}

TEST(StateJson, MalformedInputIsParseError) {
  EXPECT_THROW(state_from_json(json::parse(R"({"layout": 3})")), ParseError);
  EXPECT_THROW(state_from_json(json::parse(R"({"layout": [{"inputs": 1, "outputs": 2}],
      "table": [{"x": [0], "a": [0], "p": "one half"}]})")),
               ParseError);
}

TEST(Rationals, ParseAndCanonicalize) {
  EXPECT_EQ(make_rational(2, 4), q(1, 2));
  EXPECT_EQ(to_string(make_rational(6, 4)), "3/2");
  EXPECT_EQ(parse_rational("-3/9"), q(-1, 3));
  EXPECT_THROW(parse_rational("0.25"), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
}
