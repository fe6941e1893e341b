#pragma once

#include <cmath>
#include <vector>

#include "boxworld/cone.hpp"
#include "boxworld/constructors.hpp"
#include "boxworld/entropy.hpp"

namespace boxworld {

inline ConeVector bipartite_vector(const JointState& s, std::vector<std::size_t> a, std::vector<std::size_t> b,
                                   bool* exact = nullptr) {
  const auto ev = entropy_vector(s, {std::move(a), std::move(b)});
  if (exact) *exact = ev.exact();
  const auto v = ev.bipartite();
  return {v[0], v[1], v[2]};
}

struct MainReproduction {
  std::size_t n = 0;
  ConeVector achieved;
  ConeVector expected;  ///< (1 + log2(N)/2, 1, 1)
  double deviation = 0;
  bool exact = true;
  OptimalMeasurement optimal;
};

inline MainReproduction reproduce_main(std::size_t n) {
  const auto s = example_main(n);
  MainReproduction r{n, {}, {1 + 0.5 * std::log2(static_cast<double>(n)), 1, 1}, 0, true, optimal_measurement(s)};
  r.achieved = bipartite_vector(s, {0}, {1}, &r.exact);
  r.deviation = max_distance(r.achieved, r.expected);
  return r;
}

/// (lambda + k + h(lambda), lambda + h(lambda), lambda + h(lambda)).
inline ConeVector damped_closed_form(double lambda, double k) {
  const double t = lambda + binary_entropy(lambda);
  return {t + k, t, t};
}

struct DampedReproduction {
  std::size_t n = 0;
  double k = 0;
  DampedLambda lambda;
  ConeVector achieved;
  ConeVector closed_form;  ///< evaluated at the unrounded lambda
  double deviation = 0;
  bool exact = true;
};

inline DampedReproduction reproduce_damped(std::size_t n, double k) {
  DampedReproduction r;
  r.n = n;
  r.k = k;
  r.lambda = damped_lambda(n, k);
  r.achieved = bipartite_vector(example_damped_lambda(n, r.lambda.rounded), {0}, {1}, &r.exact);
  r.closed_form = damped_closed_form(r.lambda.target, k);
  r.deviation = max_distance(r.achieved, r.closed_form);
  return r;
}

struct ClassicalComparison {
  std::size_t n = 0;
  ConeVector classical;           ///< Shannon vector of the classical realization, (X0 X1 | Y)
  ConeVector classical_expected;  ///< (1 + log2 N, 1, 1 + log2 N)
  ConeVector gnst;                ///< measurement entropy vector of example_main(N)
  ConeVector gnst_expected;       ///< (1 + log2(N)/2, 1, 1)
  double classical_deviation = 0;
  double gnst_deviation = 0;
  bool classical_monotone = false;  ///< S(AB) >= S(A)
  double gnst_violation = 0;        ///< H(A) - H(AB)
};

inline ClassicalComparison classical_comparison(std::size_t n) {
  if (n < 2) throw ParameterError("classical comparison needs N >= 2");
  ClassicalComparison c;
  c.n = n;
  const auto s = classical_realization(n);
  // All boxes are classical, so each table is a plain distribution.
  c.classical = {shannon(marginalize(s, {0, 1}).table()), shannon(marginalize(s, {2}).table()), shannon(s.table())};
  const double logn = std::log2(static_cast<double>(n));
  c.classical_expected = {1 + logn, 1, 1 + logn};
  c.gnst = bipartite_vector(example_main(n), {0}, {1});
  c.gnst_expected = {1 + 0.5 * logn, 1, 1};
  c.classical_deviation = max_distance(c.classical, c.classical_expected);
  c.gnst_deviation = max_distance(c.gnst, c.gnst_expected);
  c.classical_monotone = c.classical.z >= c.classical.x - kEntropyTolerance;
  c.gnst_violation = c.gnst.x - c.gnst.z;
  return c;
}

}  // namespace boxworld
