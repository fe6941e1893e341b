#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "boxworld/constructors.hpp"
#include "boxworld/effects.hpp"
#include "boxworld/strategy.hpp"

namespace boxworld {

/// Seeded generator for randomized checks.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  /// Uniform in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin(unsigned percent = 50) { return below(100) < percent; }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

/// Derived seed for an independent stream, so adding cases to one check does
/// not shift another.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct LayoutShape {
  std::size_t min_boxes = 1, max_boxes = 3;
  std::size_t max_inputs = 3;
  std::size_t min_outputs = 1, max_outputs = 3;
};

/// Single-output boxes are drawn rarely; they carry no information.
inline SystemLayout random_layout(Rng& rng, const LayoutShape& shape) {
  std::vector<BoxSpec> boxes(rng.between(shape.min_boxes, shape.max_boxes));
  const std::size_t low = std::max<std::size_t>(shape.min_outputs, 2);
  for (auto& b : boxes) {
    const bool single = shape.min_outputs <= 1 && (low > shape.max_outputs || rng.coin(10));
    b = {rng.between(1, shape.max_inputs), single ? 1 : rng.between(low, shape.max_outputs)};
  }
  return SystemLayout(std::move(boxes));
}

inline std::vector<std::vector<std::size_t>> random_assignment(Rng& rng, const SystemLayout& layout) {
  std::vector<std::vector<std::size_t>> out(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i)
    for (std::size_t x = 0; x < layout.box(i).inputs; ++x) out[i].push_back(rng.below(layout.box(i).outputs));
  return out;
}

/// PR correlations embedded in boxes i and j: each input is mapped to a bit,
/// each box uses two distinct outputs, the other boxes answer
/// deterministically.
inline JointState lifted_pr_box(Rng& rng, const SystemLayout& layout, std::size_t i, std::size_t j) {
  const std::size_t n = layout.size();
  auto bits = [&](std::size_t box) {
    std::vector<std::size_t> f(layout.box(box).inputs);
    for (auto& v : f) v = rng.below(2);
    return f;
  };
  auto two_outputs = [&](std::size_t box) {
    const std::size_t l = layout.box(box).outputs;
    std::size_t o0 = rng.below(l), o1 = rng.below(l - 1);
    if (o1 >= o0) ++o1;
    return std::array<std::size_t, 2>{o0, o1};
  };
  const auto fi = bits(i), fj = bits(j);
  const auto oi = two_outputs(i), oj = two_outputs(j);
  const auto det = random_assignment(rng, layout);

  std::vector<Rational> table(layout.table_size());
  std::vector<std::size_t> a(n);
  for (std::size_t x = 0; x < layout.input_tuples(); ++x) {
    const auto xt = layout.decode_inputs(x);
    for (std::size_t b = 0; b < n; ++b) a[b] = det[b][xt[b]];
    for (std::size_t c = 0; c < 2; ++c) {
      a[i] = oi[c];
      a[j] = oj[c ^ (fi[xt[i]] & fj[xt[j]])];
      table[x * layout.output_tuples() + layout.output_index(a)] = Rational(1, 2);
    }
  }
  return JointState::unchecked(layout, std::move(table));
}

/// Mixture of 1..max_components deterministic product states and lifted PR
/// boxes (when two boxes have k, l >= 2), with integer weights 1..8, plus an
/// occasional uniform component.
inline JointState random_state(Rng& rng, const SystemLayout& layout, std::size_t max_components = 4) {
  std::vector<std::size_t> rich;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout.box(i).inputs >= 2 && layout.box(i).outputs >= 2) rich.push_back(i);
  std::vector<JointState> parts;
  std::vector<Rational> weights;
  const std::size_t count = rng.between(1, max_components);
  for (std::size_t c = 0; c < count; ++c) {
    if (rich.size() >= 2 && rng.coin(60)) {
      const std::size_t p = rng.below(rich.size());
      std::size_t q = rng.below(rich.size() - 1);
      if (q >= p) ++q;
      parts.push_back(lifted_pr_box(rng, layout, rich[p], rich[q]));
    } else {
      parts.push_back(deterministic_state(layout, random_assignment(rng, layout)));
    }
    weights.emplace_back(static_cast<long>(rng.between(1, 8)));
  }
  if (rng.coin(15)) {
    parts.push_back(uniform_state(layout));
    weights.emplace_back(static_cast<long>(rng.between(1, 4)));
  }
  Rational total = 0;
  for (const auto& w : weights) total += w;
  for (auto& w : weights) w /= total;
  return mix(std::span<const JointState>(parts), std::span<const Rational>(weights));
}

/// Random adaptive tree. With `injective` the leaves keep their canonical
/// labels; otherwise labels are drawn from a small alphabet.
inline BasicStrategy random_strategy(Rng& rng, const SystemLayout& layout, bool injective = true,
                                     std::size_t label_alphabet = 3) {
  std::function<StrategyNodePtr(std::vector<std::size_t>)> grow = [&](std::vector<std::size_t> remaining) {
    if (remaining.empty()) {
      if (injective) return make_leaf();
      return make_leaf(OutcomeLabel{rng.below(label_alphabet)});
    }
    const std::size_t pick = rng.below(remaining.size());
    const std::size_t box = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    std::vector<StrategyNodePtr> children;
    for (std::size_t o = 0; o < layout.box(box).outputs; ++o) children.push_back(grow(remaining));
    return make_branch(box, rng.below(layout.box(box).inputs), std::move(children));
  };
  std::vector<std::size_t> all(layout.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return BasicStrategy(layout, grow(all));
}

/// Effect vector with coefficients in {0, 1/4, 1/2, 3/4, 1}.
inline EffectVector random_effect(Rng& rng, const SystemLayout& layout) {
  std::vector<Rational> r(layout.table_size());
  for (auto& v : r) v = make_rational(static_cast<long>(rng.below(5)), 4);
  return EffectVector(layout, std::move(r));
}

/// Adds c * (indicator of input tuple x0 - indicator of x1) for random
/// x0 != x1, with c chosen so coefficients stay in [0,1]. The result agrees
/// with `e` on every state. Returns `e` unchanged when no shift fits.
inline EffectVector null_shift(Rng& rng, const EffectVector& e) {
  const auto& layout = e.layout();
  if (layout.input_tuples() < 2) return e;
  const std::size_t x0 = rng.below(layout.input_tuples());
  std::size_t x1 = rng.below(layout.input_tuples() - 1);
  if (x1 >= x0) ++x1;
  const std::size_t A = layout.output_tuples();
  std::vector<Rational> r(e.coefficients().begin(), e.coefficients().end());
  Rational room = 1;
  for (std::size_t a = 0; a < A; ++a) {
    room = std::min(room, Rational(1 - r[x0 * A + a]));
    room = std::min(room, r[x1 * A + a]);
  }
  if (sgn(room) <= 0) return e;
  const Rational c = room * make_rational(static_cast<long>(rng.between(1, 4)), 4);
  for (std::size_t a = 0; a < A; ++a) {
    r[x0 * A + a] += c;
    r[x1 * A + a] -= c;
  }
  return EffectVector(layout, std::move(r));
}

}  // namespace boxworld
