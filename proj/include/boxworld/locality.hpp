#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "boxworld/deterministic.hpp"
#include "boxworld/lp.hpp"
#include "boxworld/state_io.hpp"

namespace boxworld {

/// Split of a layout's boxes into parties A and B.
struct Bipartition {
  std::vector<std::size_t> a_boxes;
  std::vector<std::size_t> b_boxes;

  void check(const SystemLayout& layout) const {
    if (a_boxes.empty() || b_boxes.empty()) throw ParameterError("bipartition: both parties need a box");
    std::vector<int> seen(layout.size(), 0);
    for (const auto* side : {&a_boxes, &b_boxes})
      for (auto i : *side) {
        if (i >= layout.size()) throw ParameterError("bipartition: box " + std::to_string(i) + " out of range");
        if (seen[i]++) throw ParameterError("bipartition: box " + std::to_string(i) + " listed twice");
      }
    if (a_boxes.size() + b_boxes.size() != layout.size()) throw ParameterError("bipartition must cover every box");
  }

  /// First `split` boxes against the rest.
  static Bipartition prefix(std::size_t split, std::size_t total) {
    Bipartition p;
    for (std::size_t i = 0; i < total; ++i) (i < split ? p.a_boxes : p.b_boxes).push_back(i);
    return p;
  }
};

struct LocalityBudget {
  std::uint64_t max_strategies_per_side = 20'000;
  std::uint64_t max_tableau_cells = 4'000'000;
};

enum class LocalityStatus { local, nonlocal };

struct WeightedPair {
  DeterministicStrategy a;
  DeterministicStrategy b;
  Rational weight;
};

struct LocalityResult {
  LocalityStatus status = LocalityStatus::nonlocal;
  std::vector<WeightedPair> weights;  ///< positive weights, when local
  std::size_t columns = 0;            ///< strategy pairs in the LP
  std::size_t rows = 0;
  std::size_t pivots = 0;

  bool local() const { return status == LocalityStatus::local; }
};

/// One term w * (pA (x) pB) of a separable decomposition.
struct ProductTerm {
  Rational weight;
  JointState a_side;
  JointState b_side;
};

/// True iff sum_i w_i pA_i(a|x) pB_i(b|y) equals the state's table exactly.
inline bool verify_decomposition(const JointState& state, std::span<const ProductTerm> terms,
                                 const Bipartition& parties) {
  const auto& layout = state.layout();
  parties.check(layout);
  const auto la = layout.select(parties.a_boxes), lb = layout.select(parties.b_boxes);
  Rational total = 0;
  for (const auto& t : terms) {
    if (sgn(t.weight) < 0) throw ParameterError("verify_decomposition: negative weight");
    if (!(t.a_side.layout() == la) || !(t.b_side.layout() == lb))
      throw LayoutMismatchError("verify_decomposition: factor layouts do not match the bipartition");
    total += t.weight;
  }
  if (total != 1) throw ParameterError("verify_decomposition: weights sum to " + to_string(total));

  const auto in_a = detail::digit_sums(layout, detail::scattered_strides(layout, parties.a_boxes, false), false);
  const auto in_b = detail::digit_sums(layout, detail::scattered_strides(layout, parties.b_boxes, false), false);
  const auto out_a = detail::digit_sums(layout, detail::scattered_strides(layout, parties.a_boxes, true), true);
  const auto out_b = detail::digit_sums(layout, detail::scattered_strides(layout, parties.b_boxes, true), true);
  const std::size_t A = layout.output_tuples(), AA = la.output_tuples(), AB = lb.output_tuples();
  const auto target = state.table();
  Rational acc;
  for (std::size_t x = 0; x < layout.input_tuples(); ++x)
    for (std::size_t a = 0; a < A; ++a) {
      acc = 0;
      for (const auto& t : terms) {
        if (sgn(t.weight) == 0) continue;
        const auto& pa = t.a_side.table()[in_a[x] * AA + out_a[a]];
        if (sgn(pa) == 0) continue;
        const auto& pb = t.b_side.table()[in_b[x] * AB + out_b[a]];
        if (sgn(pb) == 0) continue;
        acc += t.weight * pa * pb;
      }
      if (acc != target[x * A + a]) return false;
    }
  return true;
}

inline bool verify_decomposition(const JointState& state, const std::vector<ProductTerm>& terms,
                                 const Bipartition& parties) {
  return verify_decomposition(state, std::span<const ProductTerm>(terms), parties);
}

/// Exact local-hidden-variable test: is the state a convex combination of
/// products of deterministic per-box strategies? Strategy pairs that would
/// put weight on a zero-probability cell are excluded before the LP is
/// built, and the corresponding all-zero rows are dropped.
inline LocalityResult is_local(const JointState& state, const Bipartition& parties, const LocalityBudget& budget = {}) {
  const auto& layout = state.layout();
  parties.check(layout);
  const std::size_t n = layout.size();

  // Classical boxes first so the support prunes non-classical choices early.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return layout.box(a).inputs < layout.box(b).inputs; });
  std::vector<JointState> prefix_marginals;
  for (std::size_t t = 0; t < n; ++t)
    prefix_marginals.push_back(marginalize(state, std::span<const std::size_t>(order.data(), t + 1)));

  std::vector<bool> on_a(n, false);
  for (auto i : parties.a_boxes) on_a[i] = true;

  std::vector<std::vector<std::size_t>> assign(n);  // by original box index
  for (std::size_t i = 0; i < n; ++i) assign[i].assign(layout.box(i).inputs, 0);

  std::map<std::vector<std::vector<std::size_t>>, std::size_t> a_parts, b_parts;
  std::vector<std::pair<std::size_t, std::size_t>> columns;

  auto part_of = [&](bool side_a) {
    std::vector<std::vector<std::size_t>> part;
    for (auto i : side_a ? parties.a_boxes : parties.b_boxes) part.push_back(assign[i]);
    return part;
  };
  auto intern = [&](std::map<std::vector<std::vector<std::size_t>>, std::size_t>& parts, bool side_a) {
    auto [it, inserted] = parts.try_emplace(part_of(side_a), parts.size());
    if (parts.size() > budget.max_strategies_per_side)
      throw ResourceError("is_local: more than " + std::to_string(budget.max_strategies_per_side) +
                          " support-compatible strategies for party " + (side_a ? "A" : "B"));
    return it->second;
  };

  // Is p(d(x_P), o | x_P, input) > 0 on prefix t for every prefix input tuple
  // whose last entry is `input`?
  auto compatible = [&](std::size_t t, std::size_t input, std::size_t o) {
    const auto& marg = prefix_marginals[t];
    const auto& ml = marg.layout();
    const std::size_t stride_count = ml.input_tuples() / ml.box(t).inputs;
    std::vector<std::size_t> xs(t + 1), as(t + 1);
    for (std::size_t r = 0; r < stride_count; ++r) {
      std::size_t rem = r;
      for (std::size_t s = t; s-- > 0;) {
        xs[s] = rem % ml.box(s).inputs;
        rem /= ml.box(s).inputs;
      }
      xs[t] = input;
      for (std::size_t s = 0; s < t; ++s) as[s] = assign[order[s]][xs[s]];
      as[t] = o;
      if (sgn(marg.prob(as, xs)) == 0) return false;
    }
    return true;
  };

  std::function<void(std::size_t, std::size_t)> search = [&](std::size_t t, std::size_t input) {
    if (t == n) {
      const auto ia = intern(a_parts, true);
      const auto ib = intern(b_parts, false);
      columns.emplace_back(ia, ib);
      return;
    }
    const std::size_t box = order[t];
    for (std::size_t o = 0; o < layout.box(box).outputs; ++o) {
      if (!compatible(t, input, o)) continue;
      assign[box][input] = o;
      if (input + 1 < layout.box(box).inputs)
        search(t, input + 1);
      else
        search(t + 1, 0);
    }
    assign[box][input] = 0;
  };
  search(0, 0);

  // Rows: positive cells plus normalization.
  const auto table = state.table();
  std::vector<std::size_t> row_of(table.size(), static_cast<std::size_t>(-1));
  std::size_t rows = 0;
  for (std::size_t f = 0; f < table.size(); ++f)
    if (sgn(table[f]) != 0) row_of[f] = rows++;
  ++rows;

  LocalityResult result;
  result.columns = columns.size();
  result.rows = rows;
  if (columns.empty()) return result;
  if (static_cast<std::uint64_t>(rows) * columns.size() > budget.max_tableau_cells)
    throw ResourceError("is_local: LP with " + std::to_string(rows) + " rows and " + std::to_string(columns.size()) +
                        " columns exceeds the tableau budget");

  std::vector<std::vector<std::vector<std::size_t>>> a_list(a_parts.size()), b_list(b_parts.size());
  for (auto& [part, idx] : a_parts) a_list[idx] = part;
  for (auto& [part, idx] : b_parts) b_list[idx] = part;

  LinearSystem system;
  system.columns = columns.size();
  system.rows.assign(rows, std::vector<Rational>(columns.size()));
  system.rhs.assign(rows, Rational(0));
  for (std::size_t f = 0; f < table.size(); ++f)
    if (row_of[f] != static_cast<std::size_t>(-1)) system.rhs[row_of[f]] = table[f];
  system.rhs.back() = 1;

  std::vector<std::size_t> a(n);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& pa = a_list[columns[c].first];
    const auto& pb = b_list[columns[c].second];
    for (std::size_t j = 0; j < parties.a_boxes.size(); ++j) assign[parties.a_boxes[j]] = pa[j];
    for (std::size_t j = 0; j < parties.b_boxes.size(); ++j) assign[parties.b_boxes[j]] = pb[j];
    for (std::size_t x = 0; x < layout.input_tuples(); ++x) {
      const auto xt = layout.decode_inputs(x);
      for (std::size_t i = 0; i < n; ++i) a[i] = assign[i][xt[i]];
      system.rows[row_of[x * layout.output_tuples() + layout.output_index(a)]][c] = 1;
    }
    system.rows.back()[c] = 1;
  }

  const auto lp = lp_feasibility(system);
  result.pivots = lp.pivots;
  if (!lp.feasible) return result;
  result.status = LocalityStatus::local;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (sgn(lp.point[c]) == 0) continue;
    result.weights.push_back({DeterministicStrategy{parties.a_boxes, a_list[columns[c].first]},
                              DeterministicStrategy{parties.b_boxes, b_list[columns[c].second]}, lp.point[c]});
  }
  return result;
}

/// Product terms induced by the weights of a local verdict.
inline std::vector<ProductTerm> decomposition_terms(const LocalityResult& result, const SystemLayout& layout,
                                                    const Bipartition& parties) {
  const auto la = layout.select(parties.a_boxes), lb = layout.select(parties.b_boxes);
  std::vector<ProductTerm> terms;
  for (const auto& w : result.weights)
    terms.push_back({w.weight, deterministic_state(la, w.a.outputs), deterministic_state(lb, w.b.outputs)});
  return terms;
}

inline json deterministic_to_json(const DeterministicStrategy& d) {
  return {{"boxes", d.boxes}, {"outputs", d.outputs}};
}

inline json locality_to_json(const LocalityResult& r) {
  json weights = json::array();
  for (const auto& w : r.weights)
    weights.push_back({{"a", deterministic_to_json(w.a)}, {"b", deterministic_to_json(w.b)}, {"weight", to_string(w.weight)}});
  return {{"status", r.local() ? "LOCAL" : "NONLOCAL"},
          {"weights", weights},
          {"lp", {{"columns", r.columns}, {"rows", r.rows}, {"pivots", r.pivots}}}};
}

/// Bisection on a one-parameter family that is local at 0 and nonlocal at 1.
/// Returns [lo, hi] with family(lo) local, family(hi) nonlocal and
/// hi - lo <= precision.
inline std::pair<Rational, Rational> locality_threshold(const std::function<JointState(const Rational&)>& family,
                                                        const Bipartition& parties, const Rational& precision,
                                                        const LocalityBudget& budget = {}) {
  Rational lo = 0, hi = 1;
  if (!is_local(family(lo), parties, budget).local()) throw ParameterError("locality_threshold: family(0) is nonlocal");
  if (is_local(family(hi), parties, budget).local()) throw ParameterError("locality_threshold: family(1) is local");
  while (hi - lo > precision) {
    Rational mid = (lo + hi) / 2;
    if (is_local(family(mid), parties, budget).local())
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

/// Probability of winning the CHSH game (a xor b = x y) with uniformly
/// random inputs, for a pair of boxes with two inputs and two outputs each.
inline Rational chsh_win_probability(const JointState& s) {
  if (!(s.layout() == SystemLayout{{2, 2}, {2, 2}})) throw LayoutMismatchError("chsh_win_probability needs two 2x2 boxes");
  Rational win = 0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a) win += s.prob(std::vector<std::size_t>{a, a ^ (x & y)}, std::vector<std::size_t>{x, y});
  return win / 4;
}

struct NoiseThreshold {
  Rational lo, hi;          ///< visibilities: noisy_pr_box(lo) local, noisy_pr_box(hi) nonlocal
  Rational win_lo, win_hi;  ///< CHSH winning probabilities at lo and hi
};

/// Locality boundary of the PR box under white noise, by bisection.
inline NoiseThreshold pr_noise_threshold(const Rational& precision) {
  const auto [lo, hi] = locality_threshold([](const Rational& v) { return noisy_pr_box(v); },
                                           Bipartition::prefix(1, 2), precision);
  return {lo, hi, chsh_win_probability(noisy_pr_box(lo)), chsh_win_probability(noisy_pr_box(hi))};
}

}  // namespace boxworld
