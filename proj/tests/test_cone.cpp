#include <gtest/gtest.h>

#include <cmath>

#include "boxworld/boxworld.hpp"

using namespace boxworld;

namespace {

Rational q(long n, unsigned long d) { return make_rational(n, d); }

double h2(double p) { return (p <= 0 || p >= 1) ? 0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

/// lambda + h(lambda) for the damped family at scale N and k = 1.
double damped_delta(std::size_t n) {
  const double lam = 2.0 / std::log2(static_cast<double>(n));
  return lam + h2(lam);
}

}  // namespace

TEST(Cone, Membership) {
  EXPECT_TRUE(cone_contains(ConeVector{1, 1, 2}));
  EXPECT_TRUE(cone_contains(ConeVector{0, 0, 0}));
  EXPECT_FALSE(cone_contains(ConeVector{0, 0, 1}));
  EXPECT_FALSE(cone_contains(ConeVector{-1e-3, 1, 0}));
  EXPECT_TRUE(cone_contains(ConeVector{1, 1, 2 + 1e-12}));
  EXPECT_TRUE(cone_contains(q(1, 3), q(2, 3), Rational(1)));
  EXPECT_FALSE(cone_contains(q(1, 3), q(2, 3), q(4, 3)));
}

TEST(Cone, CanonicalDecomposition) {
  const auto d = cone_decompose(ConeVector{3, 2, 4});
  // min(x, z) = 3 on e1, then z - 3 = 1 on e2, x - 3 = 0 on e3, y - 1 = 1 on e4
  EXPECT_DOUBLE_EQ(d.lambda[0], 3);
  EXPECT_DOUBLE_EQ(d.lambda[1], 1);
  EXPECT_DOUBLE_EQ(d.lambda[2], 0);
  EXPECT_DOUBLE_EQ(d.lambda[3], 1);
  const auto v = d.reconstruct();
  EXPECT_DOUBLE_EQ(v[0], 3);
  EXPECT_DOUBLE_EQ(v[1], 2);
  EXPECT_DOUBLE_EQ(v[2], 4);
  EXPECT_THROW(cone_decompose(ConeVector{0, 0, 1}), ConeError);
}

TEST(Cone, ExactDecompositionReconstructs) {
  const auto d = cone_decompose(q(5, 2), q(1, 3), q(7, 4));
  for (const auto& l : d.lambda) EXPECT_GE(l, 0);
  const auto v = d.reconstruct();
  EXPECT_EQ(v[0], q(5, 2));
  EXPECT_EQ(v[1], q(1, 3));
  EXPECT_EQ(v[2], q(7, 4));
}

TEST(Cone, DistributionWithEntropy) {
  for (double bits : {0.0, 0.3, 1.0, 1.5, 2.0, 3.7, 10.0}) {
    const auto d = distribution_with_entropy(bits);
    Rational total = 0;
    for (const auto& p : d) total += p;
    EXPECT_EQ(total, 1);
    EXPECT_NEAR(shannon(std::span<const Rational>(d)), bits, 1e-10) << bits;
  }
  EXPECT_EQ(distribution_with_entropy(2.0).size(), 4u);
  EXPECT_THROW(distribution_with_entropy(-1), ParameterError);
  EXPECT_THROW(distribution_with_entropy(25), ParameterError);
}

TEST(Cone, RayStatesHitClassicalRaysExactly) {
  for (int ray : {1, 2})
    for (double lam : {0.0, 0.4, 1.0, 2.5}) {
      const auto v = bipartite_vector(ray_state(ray, lam, 16), {0}, {1});
      const auto& r = kConeRays[ray - 1];
      EXPECT_NEAR(v.x, lam * r[0], 1e-9);
      EXPECT_NEAR(v.y, lam * r[1], 1e-9);
      EXPECT_NEAR(v.z, lam * r[2], 1e-9);
    }
}

TEST(Cone, DampedRaysApproachFromAbove) {
  const auto v3 = bipartite_vector(ray_state(3, 1, 4096), {0}, {1});
  const auto v4 = bipartite_vector(ray_state(4, 1, 4096), {0}, {1});
  const double d = damped_delta(4096);
  EXPECT_NEAR(v3.x, 1 + d, 1e-6);
  EXPECT_NEAR(v3.y, d, 1e-6);
  EXPECT_NEAR(v4.x, d, 1e-6);
  EXPECT_NEAR(v4.y, 1 + d, 1e-6);
}

TEST(Synthesis, BoundaryTargetsAreReached) {
  for (const ConeVector t : {ConeVector{1, 1, 2}, ConeVector{1, 0, 1}, ConeVector{0, 1, 1}, ConeVector{2, 3, 5}}) {
    const auto s = synthesize_state(t, 1 << 8);
    EXPECT_LE(s.error, 1e-6) << t.x << "," << t.y << "," << t.z;
    EXPECT_TRUE(s.exact);
  }
}

TEST(Synthesis, DenseSigmaAgreesWithFactorSum) {
  // Both the dense product and the per-factor sum should give the same
  // vector while sigma is small enough to build.
  const ConeVector t{1.5, 0.5, 1.25};
  const auto s = synthesize_state(t, 16);
  ASSERT_TRUE(s.sigma.has_value());
  const auto dense = bipartite_vector(*s.sigma, s.parties.a_boxes, s.parties.b_boxes);
  bool exact = false;
  const auto additive = factor_entropy_sum(s.factors, &exact);
  EXPECT_TRUE(exact);
  EXPECT_LE(max_distance(dense, additive), 1e-9);
  EXPECT_LE(max_distance(dense, s.achieved), 1e-9);
}

TEST(Synthesis, PureDampedTargetMatchesClosedForm) {
  const double d = damped_delta(1 << 16);
  const auto s = synthesize_state(ConeVector{1, 0, 0}, 1 << 16);
  EXPECT_NEAR(s.achieved.x, 1 + d, 1e-6);
  EXPECT_NEAR(s.achieved.y, d, 1e-6);
  EXPECT_NEAR(s.achieved.z, d, 1e-6);
  EXPECT_NEAR(d, 0.6685644431995964, 1e-12);
}

TEST(Synthesis, TwoDampedRaysAddUp) {
  // (1,1,0) = e3 + e4: (1 + d, d, d) + (d, 1 + d, d)
  const double d = damped_delta(1 << 16);
  const auto s = synthesize_state(ConeVector{1, 1, 0}, 1 << 16);
  EXPECT_FALSE(s.sigma.has_value());
  EXPECT_NEAR(s.achieved.x, 1 + 2 * d, 1e-6);
  EXPECT_NEAR(s.achieved.y, 1 + 2 * d, 1e-6);
  EXPECT_NEAR(s.achieved.z, 2 * d, 1e-6);
}

TEST(Synthesis, ErrorShrinksWithN) {
  double previous = INFINITY;
  for (std::size_t n : {std::size_t{1} << 8, std::size_t{1} << 12, std::size_t{1} << 16}) {
    const auto s = synthesize_state(ConeVector{1, 0, 0}, n);
    EXPECT_LT(s.error, previous) << n;
    previous = s.error;
  }
}

TEST(Synthesis, OutsideTheConeIsRejected) {
  EXPECT_THROW(synthesize_state(ConeVector{0, 0, 1}, 16), ConeError);
  EXPECT_THROW(synthesize_state(ConeVector{2, 0, 0}, 4), ParameterError);  // lambda = 2 k / log2 N = 2
}

TEST(Separability, SmallScaleUsesLp) {
  const auto r = separability_report(ConeVector{2, 1, 1}, 4);
  EXPECT_EQ(r.certificate, CertificateKind::lp);
  EXPECT_TRUE(r.local);
  EXPECT_TRUE(r.verified);
  ASSERT_TRUE(r.lp.has_value());
  EXPECT_NEAR(r.synthesis.achieved.x, 4, 1e-9);
  EXPECT_NEAR(r.synthesis.achieved.y, 3, 1e-9);
  EXPECT_NEAR(r.synthesis.achieved.z, 3, 1e-9);
}

TEST(Separability, LargeScaleUsesExplicitTerms) {
  const auto r = separability_report(ConeVector{1, 0, 0}, 1 << 16);
  EXPECT_EQ(r.certificate, CertificateKind::structural);
  EXPECT_TRUE(r.local);
  EXPECT_TRUE(r.verified);
  const auto both = separability_report(ConeVector{1, 1, 0}, 1 << 16);
  EXPECT_EQ(both.certificate, CertificateKind::factorwise);
  EXPECT_TRUE(both.verified);
}

TEST(Separability, JsonHasLocalityBlock) {
  const auto j = separability_to_json(separability_report(ConeVector{1, 0, 1}, 16));
  EXPECT_EQ(j.at("locality").at("status"), "LOCAL");
  EXPECT_TRUE(j.at("locality").at("verified").get<bool>());
  EXPECT_EQ(j.at("achieved").size(), 3u);
}
