#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "boxworld/constructors.hpp"
#include "boxworld/entropy.hpp"
#include "boxworld/locality.hpp"

namespace boxworld {

/// Candidate bipartite entropy vector (H(A), H(B), H(AB)) in bits.
struct ConeVector {
  double x = 0, y = 0, z = 0;

  std::array<double, 3> array() const { return {x, y, z}; }
  friend bool operator==(const ConeVector&, const ConeVector&) = default;
};

inline double max_distance(const ConeVector& a, const ConeVector& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

/// x, y, z >= 0 and z <= x + y, each up to `tolerance`.
inline bool cone_contains(const ConeVector& v, double tolerance = 1e-9) {
  if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) return false;
  return v.x >= -tolerance && v.y >= -tolerance && v.z >= -tolerance && v.z <= v.x + v.y + tolerance;
}

inline bool cone_contains(const Rational& x, const Rational& y, const Rational& z) {
  return sgn(x) >= 0 && sgn(y) >= 0 && sgn(z) >= 0 && z <= x + y;
}

/// Rays e1 = (1,0,1), e2 = (0,1,1), e3 = (1,0,0), e4 = (0,1,0).
inline constexpr std::array<std::array<int, 3>, 4> kConeRays{{{1, 0, 1}, {0, 1, 1}, {1, 0, 0}, {0, 1, 0}}};

template <class T>
struct BasicRayDecomposition {
  std::array<T, 4> lambda{};

  std::array<T, 3> reconstruct() const {
    std::array<T, 3> v{T(0), T(0), T(0)};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        if (kConeRays[r][c]) v[c] += lambda[r];
    return v;
  }
};

using RayDecomposition = BasicRayDecomposition<double>;
using ExactRayDecomposition = BasicRayDecomposition<Rational>;

/// lambda1 = min(x, z), lambda2 = z - lambda1, lambda3 = x - lambda1,
/// lambda4 = y - lambda2. Coordinates within tolerance of the boundary are
/// clamped so every coefficient is non-negative.
inline RayDecomposition cone_decompose(const ConeVector& v, double tolerance = 1e-9) {
  if (!cone_contains(v, tolerance))
    throw ConeError("(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " + std::to_string(v.z) +
                    ") is outside the cone: need x, y, z >= 0 and z <= x + y");
  const double x = std::max(v.x, 0.0), y = std::max(v.y, 0.0), z = std::max(v.z, 0.0);
  RayDecomposition d;
  d.lambda[0] = std::min(x, z);
  d.lambda[1] = z - d.lambda[0];
  d.lambda[2] = x - d.lambda[0];
  d.lambda[3] = std::max(y - d.lambda[1], 0.0);
  return d;
}

inline ExactRayDecomposition cone_decompose(const Rational& x, const Rational& y, const Rational& z) {
  if (!cone_contains(x, y, z))
    throw ConeError("(" + to_string(x) + ", " + to_string(y) + ", " + to_string(z) + ") is outside the cone");
  ExactRayDecomposition d;
  d.lambda[0] = std::min(x, z);
  d.lambda[1] = z - d.lambda[0];
  d.lambda[2] = x - d.lambda[0];
  d.lambda[3] = y - d.lambda[1];
  return d;
}

/// A distribution whose Shannon entropy is `bits` up to about 1e-12: a
/// two-point (q, 1-q) for bits <= 1, otherwise one weight p plus a uniform
/// remainder over ceil(2^bits) symbols (exactly uniform when 2^bits is an
/// integer).
inline std::vector<Rational> distribution_with_entropy(double bits) {
  if (!(bits >= 0) || !std::isfinite(bits)) throw ParameterError("target entropy must be finite and non-negative");
  if (bits > 24) throw ParameterError("target entropy above 24 bits is not supported");
  if (bits == 0) return {Rational(1)};
  if (bits <= 1) {
    if (bits == 1) return {Rational(1, 2), Rational(1, 2)};
    double lo = 0, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      const double mid = lo + (hi - lo) / 2;
      if (mid == lo || mid == hi) break;
      (binary_entropy(mid) < bits ? lo : hi) = mid;
    }
    const double q = std::abs(binary_entropy(lo) - bits) <= std::abs(binary_entropy(hi) - bits) ? lo : hi;
    const Rational rq = from_double(q);
    return {rq, 1 - rq};
  }
  const double span = std::exp2(bits);
  const auto m = static_cast<std::size_t>(std::ceil(span));
  if (static_cast<double>(m) == span) return std::vector<Rational>(m, Rational(1, m));
  // f(p) = H(p, (1-p)/(m-1), ...) falls from log2 m at p = 1/m to 0 at p = 1.
  auto f = [m](double p) {
    const double rest = (1 - p) / static_cast<double>(m - 1);
    double h = p > 0 ? -p * std::log2(p) : 0;
    if (rest > 0) h -= (1 - p) * std::log2(rest);
    return h;
  };
  double lo = 1.0 / static_cast<double>(m), hi = 1;
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + (hi - lo) / 2;
    if (mid == lo || mid == hi) break;
    (f(mid) > bits ? lo : hi) = mid;
  }
  const Rational p = from_double(lo);
  std::vector<Rational> dist(m, (1 - p) / Rational(m - 1));
  dist[0] = p;
  return dist;
}

/// Two-box state (box 0 on side A, box 1 on side B) whose entropy vector is
/// lambda times ray `ray` (1..4). Rays 3 and 4 use the damped family at scale
/// N, so they only approach the ray as N grows. lambda = 0 gives a trivial
/// pair of single-output boxes.
inline JointState ray_state(int ray, double lambda, std::size_t n) {
  if (ray < 1 || ray > 4) throw ParameterError("ray must be 1, 2, 3 or 4");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ParameterError("ray weight must be finite and non-negative");
  if (lambda == 0) return classical_state({1, 1}, {Rational(1)});
  if (ray <= 2) {
    auto dist = distribution_with_entropy(lambda);
    const std::size_t m = dist.size();
    std::vector<Rational> table(2 * m);
    for (std::size_t s = 0; s < m; ++s) table[ray == 1 ? s * 2 : s] = dist[s];
    return ray == 1 ? classical_state({m, 2}, std::move(table)) : classical_state({2, m}, std::move(table));
  }
  auto damped = example_damped(n, lambda);
  if (ray == 3) return damped;
  return marginalize(damped, {1, 0});
}

/// Per-factor data for the synthesized state.
struct RayFactor {
  int ray = 0;
  double lambda = 0;
  JointState state;
};

/// Dense sigma tables above this many entries are not materialized.
inline constexpr std::uint64_t kDefaultSigmaEntries = std::uint64_t{1} << 23;

struct Synthesis {
  ConeVector target;
  RayDecomposition decomposition;
  std::size_t n = 0;
  std::vector<RayFactor> factors;
  std::optional<JointState> sigma;  ///< dense sigma, when it fits the entry cap
  double sigma_entries = 0;         ///< size of sigma's table
  Bipartition parties{{0, 2, 4, 6}, {1, 3, 5, 7}};
  ConeVector achieved;
  bool exact = true;
  double error = 0;
};

/// Sum of the factors' entropy vectors. Equals the entropy vector of sigma
/// because sigma has at most two non-classical boxes.
inline ConeVector factor_entropy_sum(const std::vector<RayFactor>& factors, bool* exact = nullptr) {
  ConeVector sum;
  bool all_exact = true;
  for (const auto& f : factors) {
    const auto ev = entropy_vector(f.state, {{0}, {1}});
    const auto b = ev.bipartite();
    sum.x += b[0];
    sum.y += b[1];
    sum.z += b[2];
    all_exact = all_exact && ev.exact();
  }
  if (exact) *exact = all_exact;
  return sum;
}

/// sigma = rho1 (x) rho2 (x) rho3 (x) rho4 with rho_r = ray_state(r, lambda_r, N).
/// Box 2r of sigma belongs to A, box 2r+1 to B. When sigma's table would
/// exceed `max_sigma_entries` it is left unbuilt and the achieved vector is
/// the factor sum.
inline Synthesis synthesize_state(const ConeVector& target, std::size_t n,
                                  std::uint64_t max_sigma_entries = kDefaultSigmaEntries) {
  Synthesis s;
  s.target = target;
  s.decomposition = cone_decompose(target);
  s.n = n;
  s.sigma_entries = 1;
  for (int r = 1; r <= 4; ++r) {
    auto rho = ray_state(r, s.decomposition.lambda[r - 1], n);
    s.sigma_entries *= static_cast<double>(rho.table().size());
    s.factors.push_back({r, s.decomposition.lambda[r - 1], std::move(rho)});
  }
  if (s.sigma_entries <= static_cast<double>(max_sigma_entries)) {
    JointState sigma = s.factors[0].state;
    for (std::size_t r = 1; r < 4; ++r) sigma = tensor(sigma, s.factors[r].state);
    const auto ev = entropy_vector(sigma, {s.parties.a_boxes, s.parties.b_boxes});
    const auto b = ev.bipartite();
    s.achieved = {b[0], b[1], b[2]};
    s.exact = ev.exact();
    s.sigma = std::move(sigma);
  } else {
    s.achieved = factor_entropy_sum(s.factors, &s.exact);
  }
  s.error = max_distance(s.achieved, target);
  return s;
}

namespace detail {

/// Single-party terms (weight, A state, B state) of one ray factor.
inline std::vector<ProductTerm> factor_terms(const RayFactor& f, std::size_t n) {
  const bool damped = f.ray >= 3 && f.lambda > 0;
  if (!damped) return {{Rational(1), marginalize(f.state, {0}), marginalize(f.state, {1})}};
  const Rational lam = damped_lambda(n, f.lambda).rounded;
  const auto q = main_example_factors(n, true);
  std::vector<std::vector<Rational>> inf_x(2, std::vector<Rational>(n + 2));
  inf_x[0][n + 1] = inf_x[1][n + 1] = 1;
  const auto dx = single_box_state(inf_x);
  const auto dy = single_box_state({{Rational(0), Rational(0), Rational(1)}});
  std::vector<ProductTerm> terms{{lam / 2, q.q1, q.r1}, {lam / 2, q.q2, q.r2}, {1 - lam, dx, dy}};
  if (f.ray == 4)
    for (auto& t : terms) std::swap(t.a_side, t.b_side);
  return terms;
}

}  // namespace detail

/// Separable decomposition of sigma read off the ray factors: the Cartesian
/// product of each factor's terms.
inline std::vector<ProductTerm> structural_decomposition(const Synthesis& s) {
  std::vector<ProductTerm> terms;
  for (const auto& f : s.factors) {
    auto local = detail::factor_terms(f, s.n);
    if (terms.empty()) {
      terms = std::move(local);
      continue;
    }
    std::vector<ProductTerm> next;
    for (const auto& t : terms)
      for (const auto& u : local)
        next.push_back({t.weight * u.weight, tensor(t.a_side, u.a_side), tensor(t.b_side, u.b_side)});
    terms = std::move(next);
  }
  return terms;
}

/// lp: exact LP on sigma. structural: the ray-factor decomposition checked
/// on sigma. factorwise: sigma too large to build; each factor's
/// decomposition is checked on that factor.
enum class CertificateKind { lp, structural, factorwise };

inline const char* certificate_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::lp: return "lp";
    case CertificateKind::structural: return "structural";
    case CertificateKind::factorwise: return "factorwise";
  }
  return "?";
}

struct SeparabilityReport {
  Synthesis synthesis;
  CertificateKind certificate = CertificateKind::lp;
  bool local = false;
  bool verified = false;  ///< the decomposition re-checked exactly
  std::optional<LocalityResult> lp;
  std::string fallback_reason;  ///< set when the LP was skipped
  std::size_t terms = 0;
};

/// Synthesis followed by a locality certificate for sigma across A|B: the
/// exact LP when it fits the budget, else the structural decomposition.
inline SeparabilityReport separability_report(const ConeVector& target, std::size_t n,
                                              const LocalityBudget& budget = {},
                                              std::uint64_t max_sigma_entries = kDefaultSigmaEntries) {
  SeparabilityReport rep;
  rep.synthesis = synthesize_state(target, n, max_sigma_entries);
  const auto& s = rep.synthesis;
  if (!s.sigma) {
    rep.certificate = CertificateKind::factorwise;
    rep.fallback_reason = "sigma not built: table would have " + std::to_string(s.sigma_entries) + " entries";
    rep.verified = true;
    rep.terms = 1;
    for (const auto& f : s.factors) {
      const auto terms = detail::factor_terms(f, s.n);
      rep.terms *= terms.size();
      rep.verified = rep.verified && verify_decomposition(f.state, terms, Bipartition::prefix(1, 2));
    }
    rep.local = rep.verified;
    return rep;
  }
  try {
    auto result = is_local(*s.sigma, s.parties, budget);
    rep.local = result.local();
    if (rep.local) {
      const auto terms = decomposition_terms(result, s.sigma->layout(), s.parties);
      rep.terms = terms.size();
      rep.verified = verify_decomposition(*s.sigma, terms, s.parties);
    }
    rep.lp = std::move(result);
    return rep;
  } catch (const ResourceError& e) {
    rep.fallback_reason = e.what();
  }
  rep.certificate = CertificateKind::structural;
  const auto terms = structural_decomposition(s);
  rep.terms = terms.size();
  rep.verified = verify_decomposition(*s.sigma, terms, s.parties);
  rep.local = rep.verified;
  return rep;
}

inline json cone_vector_to_json(const ConeVector& v) { return json::array({v.x, v.y, v.z}); }

inline json synthesis_to_json(const Synthesis& s) {
  json factors = json::array();
  for (const auto& f : s.factors)
    factors.push_back({{"ray", f.ray}, {"lambda", f.lambda}, {"layout", layout_to_json(f.state.layout())}});
  return {{"target", cone_vector_to_json(s.target)},
          {"decomposition", s.decomposition.lambda},
          {"N", s.n},
          {"factors", factors},
          {"sigma_entries", s.sigma_entries},
          {"sigma_built", s.sigma.has_value()},
          {"achieved", cone_vector_to_json(s.achieved)},
          {"exact", s.exact},
          {"error", s.error}};
}

inline json separability_to_json(const SeparabilityReport& r) {
  json j = synthesis_to_json(r.synthesis);
  j["locality"] = {{"status", r.local ? "LOCAL" : "NONLOCAL"},
                   {"certificate", certificate_name(r.certificate)},
                   {"verified", r.verified},
                   {"terms", r.terms}};
  if (r.lp) j["locality"]["lp"] = locality_to_json(*r.lp);
  if (!r.fallback_reason.empty()) j["locality"]["fallback_reason"] = r.fallback_reason;
  return j;
}

}  // namespace boxworld
