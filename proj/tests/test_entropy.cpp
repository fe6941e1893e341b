#include <gtest/gtest.h>

#include <cmath>

#include "boxworld/boxworld.hpp"

using namespace boxworld;

namespace {

Rational q(long n, unsigned long d) { return make_rational(n, d); }

double plogp_sum(std::initializer_list<double> p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

/// Minimum over all injective basic strategies, enumerated here rather than
/// through the library's brute force.
double enumerated_minimum(const JointState& s) {
  double best = INFINITY;
  enumerate_strategies(s.layout(), [&](const BasicStrategy& st) { best = std::min(best, shannon(evaluate_strategy(s, st))); });
  return best;
}

constexpr double kTol = 1e-9;

}  // namespace

TEST(Shannon, KnownDistributions) {
  EXPECT_NEAR(shannon(std::vector<Rational>{q(1, 2), q(1, 4), q(1, 4)}), 1.5, kTol);
  EXPECT_NEAR(shannon(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 2.0, kTol);
  EXPECT_EQ(shannon(std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_NEAR(binary_entropy(0.125), plogp_sum({0.125, 0.875}), 1e-15);
  EXPECT_EQ(binary_entropy(0), 0);
  EXPECT_EQ(binary_entropy(1), 0);
}

TEST(MeasurementEntropy, PrBoxIsOneBitEverywhere) {
  const auto pr = pr_box();
  EXPECT_NEAR(enumerated_minimum(pr), 1.0, kTol);
  EXPECT_NEAR(measurement_entropy(pr).bits, 1.0, kTol);
  EXPECT_TRUE(measurement_entropy(pr).exact);
  EXPECT_NEAR(measurement_entropy(marginalize(pr, {0})).bits, 1.0, kTol);
  const auto v = entropy_vector(pr, {{0}, {1}}).bipartite();
  EXPECT_NEAR(v[0], 1.0, kTol);
  EXPECT_NEAR(v[1], 1.0, kTol);
  EXPECT_NEAR(v[2], 1.0, kTol);
}

TEST(MeasurementEntropy, MainExampleAgainstEnumeration) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto s = example_main(n);
    const double joint = enumerated_minimum(s);
    EXPECT_NEAR(measurement_entropy(s).bits, joint, kTol) << n;
    EXPECT_NEAR(measurement_entropy_bruteforce(s), joint, kTol) << n;
    EXPECT_NEAR(joint, 1.0, kTol) << n;
  }
}

TEST(MeasurementEntropy, MainExampleMarginalOfX) {
  // either input: 1/2 on one output, 1/(2N) on N others
  for (std::size_t n : {2u, 8u, 64u}) {
    const double expected = 1 + 0.5 * std::log2(static_cast<double>(n));
    EXPECT_NEAR(measurement_entropy(marginalize(example_main(n), {0})).bits, expected, kTol);
  }
}

TEST(MeasurementEntropy, AdditiveOnProducts) {
  const auto c = classical_state({3}, {q(1, 2), q(1, 4), q(1, 4)});
  const auto t = tensor(pr_box(), c);
  EXPECT_NEAR(measurement_entropy(t).bits, 2.5, kTol);
  EXPECT_TRUE(measurement_entropy(t).exact);
  EXPECT_NEAR(measurement_entropy_bruteforce(t), 2.5, kTol);
}

TEST(MeasurementEntropy, ThreeNonClassicalBoxesAreFlaggedInexact) {
  const auto t = tensor(pr_box(), uniform_state(SystemLayout{{2, 2}}));
  EXPECT_FALSE(measurement_entropy(t).exact);
  EXPECT_NEAR(measurement_entropy(t).bits, 2.0, kTol);
}

TEST(MeasurementEntropy, DeterministicBoxesContributeNothing) {
  const auto d = deterministic_state(SystemLayout{{3, 4}}, {{2, 0, 3}});
  const auto t = tensor(noisy_pr_box(q(1, 2)), d);
  EXPECT_NEAR(measurement_entropy(t).bits, measurement_entropy(noisy_pr_box(q(1, 2))).bits, kTol);
  EXPECT_EQ(measurement_entropy(d).bits, 0);
}

TEST(MeasurementEntropy, OptimalStrategyAttainsTheValue) {
  for (const auto& s : {pr_box(), example_main(5), noisy_pr_box(q(3, 5))}) {
    const auto opt = optimal_measurement(s);
    EXPECT_TRUE(opt.strategy.injective());
    EXPECT_NEAR(shannon(evaluate_strategy(s, opt.strategy)), opt.value.bits, kTol);
  }
}

TEST(MeasurementEntropy, NoisyPrBoxOracle) {
  // Whatever the inputs, the first output is uniform and the second obeys
  // the PR relation with probability (1 + v)/2.
  for (long num : {0L, 1L, 2L, 3L, 4L}) {
    const double v = num / 4.0;
    EXPECT_NEAR(measurement_entropy(noisy_pr_box(q(num, 4))).bits, 1 + binary_entropy((1 + v) / 2), kTol) << v;
  }
}

TEST(EntropyVector, ReportsEverySubset) {
  const auto ev = entropy_vector(example_main(4), {{0}, {1}});
  EXPECT_EQ(ev.entries().size(), 3u);
  EXPECT_TRUE(ev.exact());
  const auto v = ev.bipartite();
  EXPECT_NEAR(v[0], 2.0, kTol);
  EXPECT_NEAR(v[1], 1.0, kTol);
  EXPECT_NEAR(v[2], 1.0, kTol);
  const auto j = entropy_vector_to_json(ev);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 3u);
}

TEST(EntropyVector, DampedClosedForm) {
  // lambda = 2k / log2 N = 1/8 at N = 2^16, k = 1
  const double lam = 0.125, t = lam + plogp_sum({lam, 1 - lam});
  const auto v = entropy_vector(example_damped(1 << 16, 1), {{0}, {1}}).bipartite();
  EXPECT_NEAR(v[0], t + 1, 1e-6);
  EXPECT_NEAR(v[1], t, 1e-6);
  EXPECT_NEAR(v[2], t, 1e-6);
  EXPECT_NEAR(t, 0.6685644431995964, 1e-12);
}

TEST(EntropyVector, ClassicalComparisonValues) {
  for (std::size_t n : {2u, 4u, 8u}) {
    const auto c = classical_comparison(n);
    const double logn = std::log2(static_cast<double>(n));
    EXPECT_NEAR(c.classical.x, 1 + logn, kTol);
    EXPECT_NEAR(c.classical.y, 1, kTol);
    EXPECT_NEAR(c.classical.z, 1 + logn, kTol);
    EXPECT_TRUE(c.classical_monotone);
    EXPECT_NEAR(c.gnst_violation, 0.5 * logn, kTol);
  }
  EXPECT_THROW(classical_comparison(1), ParameterError);
}
