#pragma once

#include <cmath>
#include <vector>

#include "boxworld/state.hpp"

namespace boxworld {

/// Product of single-box deterministic states: box i answers input x with
/// assignment[i][x].
inline JointState deterministic_state(const SystemLayout& layout,
                                      const std::vector<std::vector<std::size_t>>& assignment) {
  if (assignment.size() != layout.size()) throw ParameterError("deterministic_state: one assignment per box");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (assignment[i].size() != layout.box(i).inputs)
      throw ParameterError("deterministic_state: box " + std::to_string(i) + " needs one output per input");
    for (auto o : assignment[i])
      if (o >= layout.box(i).outputs) throw ParameterError("deterministic_state: output out of range");
  }
  std::vector<Rational> table(layout.table_size());
  std::vector<std::size_t> a(layout.size());
  for (std::size_t x = 0; x < layout.input_tuples(); ++x) {
    const auto xt = layout.decode_inputs(x);
    for (std::size_t i = 0; i < layout.size(); ++i) a[i] = assignment[i][xt[i]];
    table[x * layout.output_tuples() + layout.output_index(a)] = 1;
  }
  return JointState::unchecked(layout, std::move(table));
}

/// Single box with the given columns; columns[x][a] = p(a|x).
inline JointState single_box_state(const std::vector<std::vector<Rational>>& columns) {
  if (columns.empty()) throw ParameterError("single_box_state: no columns");
  const BoxSpec spec{columns.size(), columns.front().size()};
  std::vector<Rational> table;
  for (const auto& c : columns) {
    if (c.size() != spec.outputs) throw ParameterError("single_box_state: ragged columns");
    table.insert(table.end(), c.begin(), c.end());
  }
  return JointState::from_table(SystemLayout{spec}, std::move(table));
}

/// Classical multi-box state from a joint distribution over output tuples.
inline JointState classical_state(std::vector<std::size_t> outputs, std::vector<Rational> distribution) {
  std::vector<BoxSpec> boxes;
  for (auto l : outputs) boxes.push_back({1, l});
  return JointState::from_table(SystemLayout(std::move(boxes)), std::move(distribution));
}

/// p(a,b|x,y) = 1/2 if a xor b = x*y.
inline JointState pr_box() {
  const SystemLayout layout{{2, 2}, {2, 2}};
  std::vector<Rational> table(layout.table_size());
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) table[(x * 2 + y) * 4 + a * 2 + b] = Rational(1, 2);
  return JointState::unchecked(layout, std::move(table));
}

/// p(a|x) = 1 / (number of output tuples) for every x.
inline JointState uniform_state(const SystemLayout& layout) {
  return JointState::unchecked(layout, std::vector<Rational>(layout.table_size(),
                                                             Rational(1, layout.output_tuples())));
}

/// v * pr_box + (1 - v) * uniform noise.
inline JointState noisy_pr_box(const Rational& v) {
  if (sgn(v) < 0 || v > 1) throw ParameterError("noisy_pr_box: visibility must lie in [0,1]");
  const auto pr = pr_box();
  return mix({pr, uniform_state(pr.layout())}, {v, Rational(1 - v)});
}

/// Box X (2 inputs, N+1 outputs) and classical bit Y whose value tells which
/// input of X yields the certain output 0.
inline JointState example_main(std::size_t n) {
  if (n == 0) throw ParameterError("example_main: N must be at least 1");
  const SystemLayout layout{{2, n + 1}, {1, 2}};
  std::vector<Rational> table(layout.table_size());
  const Rational half(1, 2), spread(1, 2 * n);
  for (std::size_t x = 0; x < 2; ++x) {
    auto at = [&](std::size_t a, std::size_t b) -> Rational& { return table[x * (n + 1) * 2 + a * 2 + b]; };
    at(0, x) = half;  // x=0: a=b=0; x=1: a=0,b=1
    for (std::size_t a = 1; a <= n; ++a) at(a, 1 - x) = spread;
  }
  return JointState::unchecked(layout, std::move(table));
}

struct DampedLambda {
  double target = 0;  ///< 2k / log2(N)
  Rational rounded;   ///< target rounded to the nearest multiple of 2^-40
};

inline DampedLambda damped_lambda(std::size_t n, double k) {
  if (n < 3) throw ParameterError("damped family needs N >= 3");
  if (!(k > 0) || !std::isfinite(k)) throw ParameterError("damped family needs k > 0");
  DampedLambda lam;
  lam.target = 2.0 * k / std::log2(static_cast<double>(n));
  if (lam.target > 1) throw ParameterError("lambda_N = " + std::to_string(lam.target) + " exceeds 1");
  const double scaled = std::nearbyint(std::ldexp(lam.target, 40));
  lam.rounded = Rational(mpz_class(scaled), mpz_class(1) << 40);
  lam.rounded.canonicalize();
  return lam;
}

/// The main example with weight lambda and an extra output "infinity" (index
/// N+1 on X, 2 on Y) carrying the remaining weight 1 - lambda.
inline JointState example_damped_lambda(std::size_t n, const Rational& lambda) {
  if (n == 0) throw ParameterError("example_damped: N must be at least 1");
  if (sgn(lambda) < 0 || lambda > 1) throw ParameterError("example_damped: lambda must lie in [0,1]");
  const std::size_t lx = n + 2, inf_x = n + 1, inf_y = 2;
  const SystemLayout layout{{2, lx}, {1, 3}};
  std::vector<Rational> table(layout.table_size());
  const Rational half = lambda / 2, spread = lambda / (2 * n), rest = 1 - lambda;
  for (std::size_t x = 0; x < 2; ++x) {
    auto at = [&](std::size_t a, std::size_t b) -> Rational& { return table[x * lx * 3 + a * 3 + b]; };
    at(0, x) = half;
    for (std::size_t a = 1; a <= n; ++a) at(a, 1 - x) = spread;
    at(inf_x, inf_y) = rest;
  }
  return JointState::unchecked(layout, std::move(table));
}

inline JointState example_damped(std::size_t n, double k) {
  return example_damped_lambda(n, damped_lambda(n, k).rounded);
}

/// Classical boxes X0, X1 (N+1 outputs each) and Y (2 outputs) whose
/// input-hiding wiring reproduces example_main(N).
inline JointState classical_realization(std::size_t n) {
  if (n == 0) throw ParameterError("classical_realization: N must be at least 1");
  const SystemLayout layout{{1, n + 1}, {1, n + 1}, {1, 2}};
  std::vector<Rational> table(layout.table_size());
  const Rational w(1, 2 * n);
  for (std::size_t j = 1; j <= n; ++j) {
    table[(0 * (n + 1) + j) * 2 + 0] = w;
    table[(j * (n + 1) + 0) * 2 + 1] = w;
  }
  return JointState::unchecked(layout, std::move(table));
}

/// Single-party states of the separable decomposition of example_main(N):
/// p = 1/2 q1 (x) r1 + 1/2 q2 (x) r2. With `with_infinity` every state gets the
/// extra output used by the damped family.
struct MainExampleFactors {
  JointState q1, q2, r1, r2;
};

inline MainExampleFactors main_example_factors(std::size_t n, bool with_infinity = false) {
  if (n == 0) throw ParameterError("main_example_factors: N must be at least 1");
  const std::size_t lx = n + 1 + (with_infinity ? 1 : 0), ly = with_infinity ? 3 : 2;
  auto q = [&](std::size_t zero_input) {
    std::vector<std::vector<Rational>> cols(2, std::vector<Rational>(lx));
    cols[zero_input][0] = 1;
    for (std::size_t a = 1; a <= n; ++a) cols[1 - zero_input][a] = Rational(1, n);
    return single_box_state(cols);
  };
  auto r = [&](std::size_t b) {
    std::vector<std::vector<Rational>> cols(1, std::vector<Rational>(ly));
    cols[0][b] = 1;
    return single_box_state(cols);
  };
  return {q(0), q(1), r(0), r(1)};
}

}  // namespace boxworld
