#pragma once

#include <map>
#include <vector>

#include "boxworld/deterministic.hpp"
#include "boxworld/state_io.hpp"
#include "boxworld/strategy.hpp"

namespace boxworld {

/// Coefficient vector R(a|x) representing a linear effect; entries in [0,1].
class EffectVector {
public:
  EffectVector(SystemLayout layout, std::vector<Rational> coefficients)
      : layout_(std::move(layout)), coefficients_(std::move(coefficients)) {
    if (coefficients_.size() != layout_.table_size()) throw StructuralError("effect size does not match layout");
    for (const auto& r : coefficients_)
      if (sgn(r) < 0 || r > 1) throw ParameterError("effect coefficient " + to_string(r) + " outside [0,1]");
  }

  static EffectVector zero(const SystemLayout& layout) {
    return EffectVector(layout, std::vector<Rational>(layout.table_size()));
  }

  const SystemLayout& layout() const { return layout_; }
  std::span<const Rational> coefficients() const { return coefficients_; }
  const Rational& at(std::span<const std::size_t> a, std::span<const std::size_t> x) const {
    return coefficients_[layout_.flat_index(x, a)];
  }

  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (const auto& r : coefficients_) n += sgn(r) != 0 ? 1 : 0;
    return n;
  }

  friend bool operator==(const EffectVector&, const EffectVector&) = default;

private:
  SystemLayout layout_;
  std::vector<Rational> coefficients_;
};

/// mu(p) = sum_{a,x} p(a|x) R(a|x).
inline Rational effect_apply(const EffectVector& effect, const JointState& state) {
  if (!(effect.layout() == state.layout())) throw LayoutMismatchError("effect_apply");
  Rational sum = 0;
  const auto r = effect.coefficients();
  const auto p = state.table();
  for (std::size_t f = 0; f < r.size(); ++f)
    if (sgn(r[f]) != 0 && sgn(p[f]) != 0) sum += r[f] * p[f];
  return sum;
}

struct OutcomeEffect {
  OutcomeLabel outcome;
  EffectVector effect;
};

/// One 0/1 effect per outcome label, ordered by label: R(a|x) = 1 iff the
/// leaf for a has that label and x = x(a).
inline std::vector<OutcomeEffect> strategy_effects(const BasicStrategy& strategy) {
  const auto& layout = strategy.layout();
  std::map<OutcomeLabel, std::vector<Rational>> tables;
  strategy.for_each_leaf([&](const BasicStrategy::Leaf& leaf) {
    auto [it, inserted] = tables.try_emplace(leaf.label);
    if (inserted) it->second.assign(layout.table_size(), Rational(0));
    it->second[layout.flat_index(leaf.inputs, leaf.outputs)] = 1;
  });
  std::vector<OutcomeEffect> out;
  for (auto& [label, table] : tables) out.push_back({label, EffectVector(layout, std::move(table))});
  return out;
}

inline std::vector<EffectVector> effects_of(const std::vector<OutcomeEffect>& labelled) {
  std::vector<EffectVector> out;
  for (const auto& e : labelled) out.push_back(e.effect);
  return out;
}

namespace detail {

inline void require_multi_output(const SystemLayout& layout, const char* op) {
  if (layout.has_single_output_box())
    throw UnsupportedLayoutError(std::string(op) + " needs every box to have at least two outputs");
}

/// d . p for the deterministic product state given by `assignment`.
inline Rational dot_deterministic(const SystemLayout& layout, std::span<const Rational> d,
                                  const std::vector<std::vector<std::size_t>>& assignment) {
  Rational sum = 0;
  std::vector<std::size_t> a(layout.size());
  for (std::size_t x = 0; x < layout.input_tuples(); ++x) {
    const auto xt = layout.decode_inputs(x);
    for (std::size_t i = 0; i < layout.size(); ++i) a[i] = assignment[i][xt[i]];
    const auto& v = d[x * layout.output_tuples() + layout.output_index(a)];
    if (sgn(v) != 0) sum += v;
  }
  return sum;
}

/// True iff d . p == target for every deterministic product state; these
/// span the affine hull of the no-signalling set.
inline bool constant_on_states(const SystemLayout& layout, std::span<const Rational> d, const Rational& target,
                               std::uint64_t budget) {
  bool ok = true;
  for_each_assignment(layout, budget, [&](const auto& assignment) {
    if (ok && dot_deterministic(layout, d, assignment) != target) ok = false;
  });
  return ok;
}

}  // namespace detail

/// True iff the effects sum to the unit effect on every state.
inline bool is_measurement(std::span<const EffectVector> effects, std::uint64_t budget = kDefaultStrategyBudget) {
  if (effects.empty()) return false;
  const auto& layout = effects.front().layout();
  for (const auto& e : effects)
    if (!(e.layout() == layout)) throw LayoutMismatchError("is_measurement");
  detail::require_multi_output(layout, "is_measurement");
  std::vector<Rational> total(layout.table_size());
  for (const auto& e : effects)
    for (std::size_t f = 0; f < total.size(); ++f) total[f] += e.coefficients()[f];
  return detail::constant_on_states(layout, total, Rational(1), budget);
}

/// True iff R and S agree on every no-signalling state.
inline bool effects_equal(const EffectVector& r, const EffectVector& s, std::uint64_t budget = kDefaultStrategyBudget) {
  if (!(r.layout() == s.layout())) throw LayoutMismatchError("effects_equal");
  detail::require_multi_output(r.layout(), "effects_equal");
  std::vector<Rational> d(r.layout().table_size());
  for (std::size_t f = 0; f < d.size(); ++f) d[f] = r.coefficients()[f] - s.coefficients()[f];
  return detail::constant_on_states(r.layout(), d, Rational(0), budget);
}

/// Fine-grained test. A non-negative representative of an effect that admits
/// a single-entry representative must itself be that representative, so it
/// suffices to count non-zero entries of the given vectors.
inline bool is_maximally_informative(std::span<const EffectVector> effects,
                                     std::uint64_t budget = kDefaultStrategyBudget) {
  if (!is_measurement(effects, budget)) throw ParameterError("is_maximally_informative: effects do not form a measurement");
  for (const auto& e : effects)
    if (e.nonzero_count() > 1) return false;
  return true;
}

/// An output/input pair (a, x) over the whole layout.
struct OutputInput {
  std::vector<std::size_t> outputs;
  std::vector<std::size_t> inputs;
};

/// A state with p(a1|x1) = 0 and p(a2|x2) > 0, built as in the constructive
/// argument: the deterministic state on a2 when a1 != a2, otherwise a state
/// that flips box i's output exactly when its input agrees with x1 (i being
/// the first box where x1 and x2 differ).
inline JointState separating_state(const SystemLayout& layout, const OutputInput& first, const OutputInput& second) {
  detail::require_multi_output(layout, "separating_state");
  for (const auto* p : {&first, &second}) {
    (void)layout.flat_index(p->inputs, p->outputs);  // range check
  }
  if (first.outputs == second.outputs && first.inputs == second.inputs)
    throw ParameterError("separating_state: pairs must differ");

  std::vector<std::vector<std::size_t>> assignment(layout.size());
  if (first.outputs != second.outputs) {
    for (std::size_t i = 0; i < layout.size(); ++i) assignment[i].assign(layout.box(i).inputs, second.outputs[i]);
  } else {
    std::size_t i = 0;
    while (first.inputs[i] == second.inputs[i]) ++i;
    for (std::size_t j = 0; j < layout.size(); ++j) assignment[j].assign(layout.box(j).inputs, first.outputs[j]);
    assignment[i][first.inputs[i]] = (first.outputs[i] + 1) % layout.box(i).outputs;
  }
  auto state = deterministic_state(layout, assignment);
  if (sgn(state.prob(first.outputs, first.inputs)) != 0 || sgn(state.prob(second.outputs, second.inputs)) <= 0)
    throw Error("separating_state: postcondition failed");
  return state;
}

inline json effect_to_json(const EffectVector& e) {
  return {{"layout", layout_to_json(e.layout())}, {"table", detail::table_to_json(e.layout(), e.coefficients(), "r")}};
}

inline EffectVector effect_from_json(const json& j) {
  if (!j.is_object() || !j.contains("layout") || !j.contains("table"))
    throw ParseError("effect must be an object with \"layout\" and \"table\"");
  auto layout = layout_from_json(j["layout"]);
  auto table = detail::table_from_json(layout, j["table"], "r", true);
  try {
    return EffectVector(std::move(layout), std::move(table));
  } catch (const ParameterError& e) {
    throw ParseError(e.what());
  }
}

}  // namespace boxworld
