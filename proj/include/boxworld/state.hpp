#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "boxworld/layout.hpp"
#include "boxworld/rational.hpp"

namespace boxworld {

enum class ViolationKind { range, normalization, no_signalling };

/// One violated constraint. For no-signalling violations `box` names the box
/// whose input change moved the marginal; `inputs` / `alt_inputs` are the two
/// input tuples and `outputs` holds the outputs of the *other* boxes.
struct Violation {
  ViolationKind kind = ViolationKind::range;
  std::optional<std::size_t> box;
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> alt_inputs;
  std::vector<std::size_t> outputs;
  Rational value;

  std::string describe() const {
    auto tuple = [](const std::vector<std::size_t>& t) {
      std::string s = "(";
      for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
      return s + ")";
    };
    switch (kind) {
      case ViolationKind::range:
        return "range: p" + tuple(outputs) + "|" + tuple(inputs) + " = " + to_string(value);
      case ViolationKind::normalization:
        return "normalization: sum over outputs at x=" + tuple(inputs) + " is " + to_string(value);
      case ViolationKind::no_signalling:
        return "no-signalling: box " + std::to_string(*box) + " signals; x=" + tuple(inputs) +
               " vs x=" + tuple(alt_inputs) + " at other outputs " + tuple(outputs);
    }
    return {};
  }
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind k) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; }));
  }
};

namespace detail {

/// For every tuple index of the layout, the weighted sum of its digits.
inline std::vector<std::size_t> digit_sums(const SystemLayout& layout, std::span<const std::size_t> weight,
                                           bool outputs) {
  const std::size_t count = outputs ? layout.output_tuples() : layout.input_tuples();
  std::vector<std::size_t> sums(count, 0);
  std::vector<std::size_t> digits(layout.size(), 0);
  std::size_t acc = 0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    sums[idx] = acc;
    for (std::size_t i = layout.size(); i-- > 0;) {
      const std::size_t radix = outputs ? layout.box(i).outputs : layout.box(i).inputs;
      if (++digits[i] < radix) {
        acc += weight[i];
        break;
      }
      acc -= (radix - 1) * weight[i];
      digits[i] = 0;
    }
  }
  return sums;
}

/// Mixed-radix strides of `keep` (in that order) scattered back onto the
/// full layout; boxes not kept get weight zero.
inline std::vector<std::size_t> scattered_strides(const SystemLayout& layout, std::span<const std::size_t> keep,
                                                  bool outputs) {
  std::vector<std::size_t> w(layout.size(), 0);
  std::size_t stride = 1;
  for (std::size_t j = keep.size(); j-- > 0;) {
    w[keep[j]] = stride;
    stride *= outputs ? layout.box(keep[j]).outputs : layout.box(keep[j]).inputs;
  }
  return w;
}

}  // namespace detail

/// Checks range, normalization, and single-box no-signalling equalities.
/// Throws StructuralError when the table does not cover the layout exactly.
inline ValidationReport validate_state(const SystemLayout& layout, std::span<const Rational> table) {
  if (table.size() != layout.table_size())
    throw StructuralError("table has " + std::to_string(table.size()) + " entries, layout " + layout.describe() +
                          " needs " + std::to_string(layout.table_size()));
  ValidationReport report;
  const std::size_t A = layout.output_tuples();
  const std::size_t X = layout.input_tuples();

  for (std::size_t f = 0; f < table.size(); ++f) {
    if (sgn(table[f]) < 0 || table[f] > 1) {
      Violation v;
      v.kind = ViolationKind::range;
      v.inputs = layout.decode_inputs(f / A);
      v.outputs = layout.decode_outputs(f % A);
      v.value = table[f];
      report.violations.push_back(std::move(v));
    }
  }
  for (std::size_t x = 0; x < X; ++x) {
    Rational sum = 0;
    for (std::size_t a = 0; a < A; ++a) sum += table[x * A + a];
    if (sum != 1) {
      Violation v;
      v.kind = ViolationKind::normalization;
      v.inputs = layout.decode_inputs(x);
      v.value = sum;
      report.violations.push_back(std::move(v));
    }
  }

  // For box i: sum out a_i and compare every x_i against x_i = 0.
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::size_t k = layout.box(i).inputs;
    if (k == 1) continue;
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < layout.size(); ++j)
      if (j != i) rest.push_back(j);
    const auto out_w = detail::scattered_strides(layout, rest, true);
    const auto out_sum = detail::digit_sums(layout, out_w, true);
    const std::size_t rest_outputs = A / layout.box(i).outputs;

    std::vector<Rational> marg(X * rest_outputs);
    for (std::size_t x = 0; x < X; ++x)
      for (std::size_t a = 0; a < A; ++a) marg[x * rest_outputs + out_sum[a]] += table[x * A + a];

    std::size_t in_stride = 1;
    for (std::size_t j = i + 1; j < layout.size(); ++j) in_stride *= layout.box(j).inputs;
    for (std::size_t x = 0; x < X; ++x) {
      const std::size_t xi = (x / in_stride) % k;
      if (xi == 0) continue;
      const std::size_t base = x - xi * in_stride;
      for (std::size_t r = 0; r < rest_outputs; ++r) {
        if (marg[x * rest_outputs + r] == marg[base * rest_outputs + r]) continue;
        Violation v;
        v.kind = ViolationKind::no_signalling;
        v.box = i;
        v.inputs = layout.decode_inputs(base);
        v.alt_inputs = layout.decode_inputs(x);
        v.outputs = layout.select(rest).decode_outputs(r);
        v.value = marg[x * rest_outputs + r] - marg[base * rest_outputs + r];
        report.violations.push_back(std::move(v));
      }
    }
  }
  return report;
}

/// A no-signalling state of a system of boxes: the full table p(a|x).
/// Immutable; copies share the table.
class JointState {
public:
  /// Validates and throws InvalidStateError listing the violations.
  static JointState from_table(SystemLayout layout, std::vector<Rational> table) {
    const auto report = validate_state(layout, table);
    if (!report.ok()) {
      std::string msg = std::to_string(report.violations.size()) + " violation(s); first: " +
                        report.violations.front().describe();
      throw InvalidStateError(msg);
    }
    return JointState(std::move(layout), std::move(table));
  }

  /// For operations that preserve the invariants by construction.
  static JointState unchecked(SystemLayout layout, std::vector<Rational> table) {
    return JointState(std::move(layout), std::move(table));
  }

  const SystemLayout& layout() const { return layout_; }
  std::span<const Rational> table() const { return *table_; }
  std::size_t size() const { return layout_.size(); }

  const Rational& prob(std::span<const std::size_t> a, std::span<const std::size_t> x) const {
    return (*table_)[layout_.flat_index(x, a)];
  }

  /// Exact serialization used as a cache key.
  std::string canonical_key() const {
    std::string key;
    for (const auto& b : layout_.boxes()) key += std::to_string(b.inputs) + "x" + std::to_string(b.outputs) + ";";
    key += "|";
    for (const auto& p : *table_) {
      if (sgn(p) == 0) {
        key += ",";
        continue;
      }
      key += p.get_str();
      key += ",";
    }
    return key;
  }

  friend bool operator==(const JointState& l, const JointState& r) {
    return l.layout_ == r.layout_ && (l.table_ == r.table_ || *l.table_ == *r.table_);
  }

private:
  JointState(SystemLayout layout, std::vector<Rational> table)
      : layout_(std::move(layout)), table_(std::make_shared<const std::vector<Rational>>(std::move(table))) {}

  SystemLayout layout_;
  std::shared_ptr<const std::vector<Rational>> table_;
};

/// Reduced state on `keep`, in the order given. Inputs of dropped boxes are
/// fixed to 0, which is sound by no-signalling.
inline JointState marginalize(const JointState& state, std::span<const std::size_t> keep) {
  const auto& layout = state.layout();
  if (keep.empty()) throw ParameterError("marginalize: empty subset");
  std::vector<bool> seen(layout.size(), false);
  for (auto i : keep) {
    if (i >= layout.size()) throw ParameterError("marginalize: box " + std::to_string(i) + " out of range");
    if (seen[i]) throw ParameterError("marginalize: box " + std::to_string(i) + " listed twice");
    seen[i] = true;
  }
  SystemLayout out_layout = layout.select(keep);
  const auto in_sum = detail::digit_sums(layout, detail::scattered_strides(layout, keep, false), false);
  const auto out_sum = detail::digit_sums(layout, detail::scattered_strides(layout, keep, true), true);
  std::vector<std::size_t> dropped_w(layout.size(), 0);
  for (std::size_t i = 0; i < layout.size(); ++i) dropped_w[i] = seen[i] ? 0 : 1;
  const auto dropped = detail::digit_sums(layout, dropped_w, false);

  const std::size_t A = layout.output_tuples();
  const std::size_t RA = out_layout.output_tuples();
  std::vector<Rational> table(out_layout.table_size());
  const auto src = state.table();
  for (std::size_t x = 0; x < layout.input_tuples(); ++x) {
    if (dropped[x] != 0) continue;
    const std::size_t base = in_sum[x] * RA;
    for (std::size_t a = 0; a < A; ++a) {
      const auto& p = src[x * A + a];
      if (sgn(p) != 0) table[base + out_sum[a]] += p;
    }
  }
  return JointState::unchecked(std::move(out_layout), std::move(table));
}

inline JointState marginalize(const JointState& state, std::initializer_list<std::size_t> keep) {
  return marginalize(state, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Outcome of measuring one box with one input. `remainder` is empty when the
/// outcome has probability zero or when no other boxes remain.
struct Conditioned {
  Rational probability;
  std::optional<JointState> remainder;
};

namespace detail {

inline std::vector<Conditioned> slice(const JointState& state, std::size_t box, std::size_t input,
                                      std::optional<std::size_t> only_output, bool with_remainders = true) {
  const auto& layout = state.layout();
  if (box >= layout.size()) throw ParameterError("condition: box out of range");
  if (input >= layout.box(box).inputs) throw ParameterError("condition: input out of range");
  if (only_output && *only_output >= layout.box(box).outputs) throw ParameterError("condition: output out of range");
  const std::size_t l = layout.box(box).outputs;
  const std::size_t A = layout.output_tuples();

  // Box `box` has input `input` on a contiguous family of x indices.
  std::size_t in_stride = 1, out_stride = 1;
  for (std::size_t j = box + 1; j < layout.size(); ++j) {
    in_stride *= layout.box(j).inputs;
    out_stride *= layout.box(j).outputs;
  }

  std::vector<Conditioned> result(only_output ? 1 : l);
  const auto src = state.table();
  if (layout.size() == 1) {
    for (std::size_t o = 0; o < result.size(); ++o) {
      const std::size_t a = only_output ? *only_output : o;
      result[o].probability = src[input * A + a];
    }
    return result;
  }

  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < layout.size(); ++j)
    if (j != box) rest.push_back(j);
  SystemLayout rest_layout = layout.select(rest);
  const std::size_t RA = rest_layout.output_tuples();
  const std::size_t k = layout.box(box).inputs;

  // Probability of each output: read from rest-input tuple 0.
  std::vector<Rational> marginal(l);
  const std::size_t x0 = input * in_stride;  // other inputs all zero
  for (std::size_t a = 0; a < A; ++a)
    if (sgn(src[x0 * A + a]) != 0) marginal[(a / out_stride) % l] += src[x0 * A + a];
  std::vector<std::vector<Rational>> tables(result.size());
  for (std::size_t o = 0; o < result.size(); ++o) {
    result[o].probability = marginal[only_output ? *only_output : o];
    if (with_remainders && sgn(result[o].probability) != 0) tables[o].assign(rest_layout.table_size(), Rational(0));
  }
  if (!with_remainders) return result;

  for (std::size_t rx = 0; rx < rest_layout.input_tuples(); ++rx) {
    // Insert `input` at position `box` into the rest-input index.
    const std::size_t hi = rx / in_stride, lo = rx % in_stride;
    const std::size_t x = (hi * k + input) * in_stride + lo;
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t a_box = (a / out_stride) % l;
      const std::size_t o = only_output ? (a_box == *only_output ? 0 : result.size()) : a_box;
      if (o >= result.size() || tables[o].empty()) continue;
      const std::size_t ra = (a / (out_stride * l)) * out_stride + a % out_stride;
      tables[o][rx * RA + ra] = src[x * A + a];
    }
  }
  for (std::size_t o = 0; o < result.size(); ++o) {
    if (tables[o].empty()) continue;
    for (auto& v : tables[o])
      if (sgn(v) != 0) v /= result[o].probability;
    result[o].remainder = JointState::unchecked(rest_layout, std::move(tables[o]));
  }
  return result;
}

}  // namespace detail

/// p(output | input) on `box` and the conditional state of the other boxes.
inline Conditioned condition(const JointState& state, std::size_t box, std::size_t input, std::size_t output) {
  return std::move(detail::slice(state, box, input, output).front());
}

/// `condition` for every output of `box` at once, indexed by output.
inline std::vector<Conditioned> condition_all(const JointState& state, std::size_t box, std::size_t input) {
  return detail::slice(state, box, input, std::nullopt);
}

/// Marginal distribution of one box for one input.
inline std::vector<Rational> box_column(const JointState& state, std::size_t box, std::size_t input) {
  std::vector<Rational> col;
  for (auto& c : detail::slice(state, box, input, std::nullopt, false)) col.push_back(std::move(c.probability));
  return col;
}

/// Product state; the boxes of `t` follow those of `s`.
inline JointState tensor(const JointState& s, const JointState& t) {
  SystemLayout layout = s.layout().concat(t.layout());
  const std::size_t Xt = t.layout().input_tuples(), As = s.layout().output_tuples(),
                    At = t.layout().output_tuples();
  const auto ps = s.table();
  const auto pt = t.table();
  std::vector<Rational> table(layout.table_size());
  std::size_t f = 0;
  for (std::size_t xs = 0; xs < s.layout().input_tuples(); ++xs)
    for (std::size_t xt = 0; xt < Xt; ++xt)
      for (std::size_t as = 0; as < As; ++as) {
        const auto& p = ps[xs * As + as];
        if (sgn(p) == 0) {
          f += At;
          continue;
        }
        for (std::size_t at = 0; at < At; ++at, ++f) {
          const auto& q = pt[xt * At + at];
          if (sgn(q) != 0) table[f] = p * q;
        }
      }
  return JointState::unchecked(std::move(layout), std::move(table));
}

/// Exact convex combination; weights must be non-negative and sum to 1.
inline JointState mix(std::span<const JointState> states, std::span<const Rational> weights) {
  if (states.empty() || states.size() != weights.size())
    throw ParameterError("mix: need one weight per state and at least one state");
  Rational total = 0;
  for (const auto& w : weights) {
    if (sgn(w) < 0) throw ParameterError("mix: negative weight " + to_string(w));
    total += w;
  }
  if (total != 1) throw ParameterError("mix: weights sum to " + to_string(total) + ", not 1");
  const auto& layout = states.front().layout();
  for (const auto& s : states)
    if (!(s.layout() == layout)) throw LayoutMismatchError("mix: states have different layouts");
  std::vector<Rational> table(layout.table_size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (sgn(weights[i]) == 0) continue;
    const auto src = states[i].table();
    for (std::size_t f = 0; f < table.size(); ++f)
      if (sgn(src[f]) != 0) table[f] += weights[i] * src[f];
  }
  return JointState::unchecked(layout, std::move(table));
}

inline JointState mix(std::initializer_list<JointState> states, std::initializer_list<Rational> weights) {
  return mix(std::span<const JointState>(states.begin(), states.size()),
             std::span<const Rational>(weights.begin(), weights.size()));
}

/// True when every input of `box` yields a single certain output.
inline bool is_deterministic_box(const JointState& state, std::size_t box) {
  for (std::size_t x = 0; x < state.layout().box(box).inputs; ++x) {
    const auto col = box_column(state, box, x);
    if (std::none_of(col.begin(), col.end(), [](const Rational& p) { return p == 1; })) return false;
  }
  return true;
}

}  // namespace boxworld
