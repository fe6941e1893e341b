#include <gtest/gtest.h>

#include "boxworld/boxworld.hpp"

using namespace boxworld;

namespace {

using Tuple = std::vector<std::size_t>;

Rational q(long n, unsigned long d) { return make_rational(n, d); }

LinearSystem system_of(std::size_t columns, std::vector<std::vector<long>> rows, std::vector<long> rhs) {
  LinearSystem s;
  s.columns = columns;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<Rational> r;
    for (long v : rows[i]) r.emplace_back(v);
    s.add_row(std::move(r), Rational(rhs[i]));
  }
  return s;
}

/// Largest CHSH sum over the 16 deterministic local strategies, computed
/// directly: a(x), b(y) in {0,1}.
int max_local_chsh_wins() {
  int best = 0;
  for (int mask = 0; mask < 16; ++mask) {
    int wins = 0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const int a = mask >> x & 1, b = mask >> (2 + y) & 1;
        wins += (a ^ b) == (x & y);
      }
    best = std::max(best, wins);
  }
  return best;
}

}  // namespace

TEST(Lp, SingleRowFeasible) {
  const auto r = lp_feasibility(system_of(2, {{1, 1}}, {1}));
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.point[0] + r.point[1], 1);
  EXPECT_GE(r.point[0], 0);
  EXPECT_GE(r.point[1], 0);
}

TEST(Lp, NegativeRightHandSideInfeasible) {
  EXPECT_FALSE(lp_feasibility(system_of(2, {{1, 1}}, {-1})).feasible);
}

TEST(Lp, RedundantRowsAndZeroRhs) {
  const auto r = lp_feasibility(system_of(3, {{1, 1, 0}, {2, 2, 0}, {0, 0, 1}}, {1, 2, 0}));
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.point[2], 0);
}

TEST(Lp, ExactPointOnFractionalSystem) {
  // 3a + b = 2, a + 3b = 2 -> a = b = 1/2
  const auto r = lp_feasibility(system_of(2, {{3, 1}, {1, 3}}, {2, 2}));
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.point[0], q(1, 2));
  EXPECT_EQ(r.point[1], q(1, 2));
}

TEST(Lp, RowWidthChecked) {
  LinearSystem s;
  s.columns = 2;
  EXPECT_THROW(s.add_row({Rational(1)}, Rational(1)), StructuralError);
}

TEST(Locality, PrBoxIsNonlocal) {
  const auto r = is_local(pr_box(), Bipartition::prefix(1, 2));
  EXPECT_EQ(r.status, LocalityStatus::nonlocal);
  // cross-check: PR wins CHSH always, local strategies at most 3 of 4 times
  EXPECT_EQ(max_local_chsh_wins(), 3);
  EXPECT_EQ(chsh_win_probability(pr_box()), 1);
}

TEST(Locality, MainExampleIsLocalWithVerifiedWeights) {
  for (std::size_t n : {1u, 2u, 5u}) {
    const auto s = example_main(n);
    const auto parties = Bipartition::prefix(1, 2);
    const auto r = is_local(s, parties);
    ASSERT_TRUE(r.local()) << n;
    Rational total = 0;
    for (const auto& w : r.weights) total += w.weight;
    EXPECT_EQ(total, 1);
    EXPECT_TRUE(verify_decomposition(s, decomposition_terms(r, s.layout(), parties), parties));
  }
}

TEST(Locality, ClassicalRealizationSplitIsLocal) {
  const auto s = classical_realization(2);
  EXPECT_TRUE(is_local(s, Bipartition{{0, 1}, {2}}).local());
}

TEST(Locality, NoisyPrBoundaryIsHalfVisibility) {
  // CHSH sum 2 + 2v for visibility v; local iff v <= 1/2
  const auto parties = Bipartition::prefix(1, 2);
  EXPECT_TRUE(is_local(noisy_pr_box(q(1, 2)), parties).local());
  EXPECT_FALSE(is_local(noisy_pr_box(q(513, 1024)), parties).local());
  EXPECT_FALSE(is_local(noisy_pr_box(q(3, 5)), parties).local());
  EXPECT_EQ(chsh_win_probability(noisy_pr_box(q(1, 2))), q(3, 4));
}

TEST(Locality, ThresholdBracket) {
  const auto t = pr_noise_threshold(q(1, 1 << 10));
  EXPECT_LE(t.lo, q(1, 2));
  EXPECT_GT(t.hi, q(1, 2));
  EXPECT_LE(t.hi - t.lo, q(1, 1 << 10));
  EXPECT_LE(t.win_lo, q(3, 4));
  EXPECT_GT(t.win_hi, q(3, 4));
}

TEST(Locality, BipartitionChecks) {
  const auto s = example_main(2);
  EXPECT_THROW(is_local(s, Bipartition{{0}, {0}}), ParameterError);
  EXPECT_THROW(is_local(s, Bipartition{{0}, {}}), ParameterError);
  EXPECT_THROW(is_local(s, Bipartition{{0}, {3}}), ParameterError);
}

TEST(Locality, BudgetExceededIsResourceError) {
  LocalityBudget tight;
  tight.max_strategies_per_side = 2;
  EXPECT_THROW(is_local(example_main(3), Bipartition::prefix(1, 2), tight), ResourceError);
}

TEST(VerifyDecomposition, MainExampleFactorsForAllSmallN) {
  const auto parties = Bipartition::prefix(1, 2);
  for (std::size_t n = 1; n <= 16; ++n) {
    const auto f = main_example_factors(n);
    const std::vector<ProductTerm> terms{{q(1, 2), f.q1, f.r1}, {q(1, 2), f.q2, f.r2}};
    EXPECT_TRUE(verify_decomposition(example_main(n), terms, parties)) << n;
  }
}

TEST(VerifyDecomposition, WrongWeightsFail) {
  const auto parties = Bipartition::prefix(1, 2);
  const auto f = main_example_factors(4);
  const std::vector<ProductTerm> terms{{q(1, 4), f.q1, f.r1}, {q(3, 4), f.q2, f.r2}};
  EXPECT_FALSE(verify_decomposition(example_main(4), terms, parties));
}

TEST(VerifyDecomposition, InvalidWeightsThrow) {
  const auto parties = Bipartition::prefix(1, 2);
  const auto f = main_example_factors(2);
  EXPECT_THROW(verify_decomposition(example_main(2), {{q(1, 2), f.q1, f.r1}}, parties), ParameterError);
  EXPECT_THROW(verify_decomposition(example_main(2), {{q(3, 2), f.q1, f.r1}, {q(-1, 2), f.q2, f.r2}}, parties),
               ParameterError);
  EXPECT_THROW(verify_decomposition(example_main(3), {{q(1, 2), f.q1, f.r1}, {q(1, 2), f.q2, f.r2}}, parties),
               LayoutMismatchError);
}

TEST(LocalityJson, WeightsAreFractionStrings) {
  const auto r = is_local(example_main(2), Bipartition::prefix(1, 2));
  const auto j = locality_to_json(r);
  EXPECT_EQ(j.at("status"), "LOCAL");
  ASSERT_FALSE(j.at("weights").empty());
  Rational total = 0;
  for (const auto& w : j.at("weights")) total += parse_rational(w.at("weight").get<std::string>());
  EXPECT_EQ(total, 1);
  EXPECT_EQ(locality_to_json(is_local(pr_box(), Bipartition::prefix(1, 2))).at("status"), "NONLOCAL");
}
