#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

#include "boxworld/state_io.hpp"
#include "boxworld/strategy.hpp"

namespace boxworld {

/// Absolute tolerance for comparing entropies.
inline constexpr double kEntropyTolerance = 1e-9;

/// -sum p log2 p with 0 log 0 = 0.
inline double shannon(std::span<const double> dist) {
  double h = 0;
  for (double p : dist)
    if (p > 0) h -= p * std::log2(p);
  return h;
}

inline double shannon(std::span<const Rational> dist) {
  double h = 0;
  for (const auto& p : dist)
    if (sgn(p) > 0) {
      const double v = to_double(p);
      h -= v * std::log2(v);
    }
  return h;
}

inline double shannon(const OutcomeDistribution& dist) {
  std::vector<Rational> probs;
  probs.reserve(dist.size());
  for (const auto& [label, p] : dist) probs.push_back(p);
  return shannon(std::span<const Rational>(probs));
}

inline double binary_entropy(double q) {
  if (!(q >= 0 && q <= 1)) throw ParameterError("binary_entropy: q must lie in [0,1]");
  const double pair[2] = {q, 1 - q};
  return shannon(std::span<const double>(pair));
}

/// Measurement entropy in bits. `exact` is false when the layout has three or
/// more non-classical boxes: there the minimum over basic strategies is only
/// an upper bound.
struct EntropyValue {
  double bits = 0;
  bool exact = true;
};

/// Minimum outcome entropy over injective basic strategies, by recursion on
/// the first measurement:
///   H(state) = min_{box, input} [ H(p(.|input)) + sum_a p(a|input) H(state | a) ].
/// Sub-results are cached on the exact conditioned table. Boxes that answer
/// every input deterministically are dropped first; they never change the
/// outcome distribution.
class EntropySolver {
public:
  double solve(const JointState& state) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < state.size(); ++i)
      if (!is_deterministic_box(state, i)) keep.push_back(i);
    if (keep.empty()) return 0;
    if (keep.size() < state.size()) return solve_reduced(marginalize(state, keep));
    return solve_reduced(state);
  }

  /// Entropy contributed by first measuring `box` with `input`.
  double move_value(const JointState& state, std::size_t box, std::size_t input) {
    const auto parts = condition_all(state, box, input);
    std::vector<Rational> probs;
    for (const auto& c : parts) probs.push_back(c.probability);
    double h = shannon(std::span<const Rational>(probs));
    for (const auto& c : parts)
      if (c.remainder) h += to_double(c.probability) * solve(*c.remainder);
    return h;
  }

  std::size_t cache_size() const { return memo_.size(); }

private:
  double solve_reduced(const JointState& state) {
    if (state.size() == 1) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t x = 0; x < state.layout().box(0).inputs; ++x) {
        const auto col = box_column(state, 0, x);
        best = std::min(best, shannon(std::span<const Rational>(col)));
      }
      return best;
    }
    auto key = state.canonical_key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.size(); ++i)
      for (std::size_t x = 0; x < state.layout().box(i).inputs; ++x) best = std::min(best, move_value(state, i, x));
    memo_.emplace(std::move(key), best);
    return best;
  }

  std::unordered_map<std::string, double> memo_;
};

inline EntropyValue measurement_entropy(const JointState& state) {
  EntropySolver solver;
  return {solver.solve(state), state.layout().non_classical_count() <= 2};
}

struct OptimalMeasurement {
  EntropyValue value;
  BasicStrategy strategy;
};

/// measurement_entropy plus one strategy attaining it. Branches that occur
/// with probability zero measure the remaining boxes in index order with
/// input 0.
inline OptimalMeasurement optimal_measurement(const JointState& state) {
  EntropySolver solver;
  const double value = solver.solve(state);

  std::function<StrategyNodePtr(const std::vector<std::size_t>&)> fallback =
      [&](const std::vector<std::size_t>& boxes) -> StrategyNodePtr {
    if (boxes.empty()) return make_leaf();
    std::vector<std::size_t> rest(boxes.begin() + 1, boxes.end());
    auto child = fallback(rest);
    return make_branch(boxes.front(), 0,
                       std::vector<StrategyNodePtr>(state.layout().box(boxes.front()).outputs, child));
  };

  // `boxes[j]` is the original index of box j of `s`.
  std::function<StrategyNodePtr(const JointState&, const std::vector<std::size_t>&)> build =
      [&](const JointState& s, const std::vector<std::size_t>& boxes) -> StrategyNodePtr {
    const double target = solver.solve(s);
    std::size_t best_box = 0, best_input = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t x = 0; x < s.layout().box(i).inputs; ++x) {
        const double v = s.size() == 1 ? shannon(std::span<const Rational>(box_column(s, 0, x)))
                                       : solver.move_value(s, i, x);
        if (v < best - 1e-12) {
          best = v;
          best_box = i;
          best_input = x;
        }
        if (best <= target + 1e-12) break;
      }
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < boxes.size(); ++j)
      if (j != best_box) rest.push_back(boxes[j]);
    auto parts = condition_all(s, best_box, best_input);
    std::vector<StrategyNodePtr> children;
    for (auto& c : parts) {
      if (rest.empty()) {
        children.push_back(make_leaf());
      } else if (c.remainder) {
        children.push_back(build(*c.remainder, rest));
      } else {
        children.push_back(fallback(rest));
      }
    }
    return make_branch(boxes[best_box], best_input, std::move(children));
  };

  std::vector<std::size_t> all(state.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return {{value, state.layout().non_classical_count() <= 2}, BasicStrategy(state.layout(), build(state, all))};
}

/// Minimum of shannon(evaluate_strategy(state, s)) over the full strategy
/// stream. Independent of EntropySolver.
inline double measurement_entropy_bruteforce(const JointState& state, std::uint64_t budget = kDefaultStrategyBudget) {
  double best = std::numeric_limits<double>::infinity();
  enumerate_strategies(
      state.layout(), [&](const BasicStrategy& s) { best = std::min(best, shannon(evaluate_strategy(state, s))); },
      budget);
  return best;
}

/// Entropies of every non-empty union of parties, keyed by sorted party
/// indices.
class EntropyVector {
public:
  using Subset = std::vector<std::size_t>;

  EntropyVector(std::vector<std::vector<std::size_t>> parties, std::map<Subset, EntropyValue> entries)
      : parties_(std::move(parties)), entries_(std::move(entries)) {}

  const std::vector<std::vector<std::size_t>>& parties() const { return parties_; }
  const std::map<Subset, EntropyValue>& entries() const { return entries_; }
  const EntropyValue& at(const Subset& s) const { return entries_.at(s); }

  /// (H(A), H(B), H(AB)) for two parties.
  std::array<double, 3> bipartite() const {
    if (parties_.size() != 2) throw ParameterError("bipartite(): entropy vector has " + std::to_string(parties_.size()) + " parties");
    return {at({0}).bits, at({1}).bits, at({0, 1}).bits};
  }

  bool exact() const {
    for (const auto& [s, v] : entries_)
      if (!v.exact) return false;
    return true;
  }

private:
  std::vector<std::vector<std::size_t>> parties_;
  std::map<Subset, EntropyValue> entries_;
};

inline EntropyVector entropy_vector(const JointState& state, const std::vector<std::vector<std::size_t>>& parties) {
  if (parties.empty() || parties.size() > 16) throw ParameterError("entropy_vector: need 1..16 parties");
  std::vector<bool> used(state.size(), false);
  for (const auto& p : parties) {
    if (p.empty()) throw ParameterError("entropy_vector: empty party");
    for (auto b : p) {
      if (b >= state.size()) throw ParameterError("entropy_vector: box out of range");
      if (used[b]) throw ParameterError("entropy_vector: parties overlap at box " + std::to_string(b));
      used[b] = true;
    }
  }
  std::map<EntropyVector::Subset, EntropyValue> entries;
  for (std::size_t mask = 1; mask < (std::size_t{1} << parties.size()); ++mask) {
    EntropyVector::Subset subset;
    std::vector<std::size_t> boxes;
    for (std::size_t j = 0; j < parties.size(); ++j)
      if (mask >> j & 1) {
        subset.push_back(j);
        boxes.insert(boxes.end(), parties[j].begin(), parties[j].end());
      }
    entries[subset] = measurement_entropy(marginalize(state, boxes));
  }
  return EntropyVector(parties, std::move(entries));
}

/// [{"subset": [...], "boxes": [...], "bits": ..., "exact": ...}, ...]
inline json entropy_vector_to_json(const EntropyVector& v) {
  json out = json::array();
  for (const auto& [subset, value] : v.entries()) {
    std::vector<std::size_t> boxes;
    for (auto j : subset) boxes.insert(boxes.end(), v.parties()[j].begin(), v.parties()[j].end());
    out.push_back({{"subset", subset}, {"boxes", boxes}, {"bits", value.bits}, {"exact", value.exact}});
  }
  return out;
}

}  // namespace boxworld
