#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "boxworld/state.hpp"

namespace boxworld {

using OutcomeLabel = std::vector<std::size_t>;

/// Outcome label -> probability.
using OutcomeDistribution = std::map<OutcomeLabel, Rational>;

struct StrategyNode;
using StrategyNodePtr = std::shared_ptr<const StrategyNode>;

/// Leaf of a basic strategy. An empty `outcome` means the canonical label:
/// the full output tuple of the path, in layout order.
struct StrategyLeaf {
  std::optional<OutcomeLabel> outcome;
};

/// Measure `box` with `input`; children are indexed by the observed output.
struct StrategyBranch {
  std::size_t box = 0;
  std::size_t input = 0;
  std::vector<StrategyNodePtr> children;
};

struct StrategyNode {
  std::variant<StrategyLeaf, StrategyBranch> content;
};

inline StrategyNodePtr make_leaf(std::optional<OutcomeLabel> outcome = std::nullopt) {
  return std::make_shared<const StrategyNode>(StrategyNode{StrategyLeaf{std::move(outcome)}});
}

inline StrategyNodePtr make_branch(std::size_t box, std::size_t input, std::vector<StrategyNodePtr> children) {
  return std::make_shared<const StrategyNode>(StrategyNode{StrategyBranch{box, input, std::move(children)}});
}

/// An adaptive sequence of fiducial measurements, one per box on every path,
/// followed by a deterministic labelling of the leaves.
class BasicStrategy {
public:
  struct Leaf {
    const std::vector<std::size_t>& outputs;  ///< full output tuple a
    const std::vector<std::size_t>& inputs;   ///< inputs x(a) used on the path
    const OutcomeLabel& label;
  };

  BasicStrategy(SystemLayout layout, StrategyNodePtr root) : layout_(std::move(layout)), root_(std::move(root)) {
    std::vector<bool> measured(layout_.size(), false);
    check(root_, measured, 0);
  }

  const SystemLayout& layout() const { return layout_; }
  const StrategyNodePtr& root() const { return root_; }

  /// Visits leaves in depth-first order (children by increasing output).
  void for_each_leaf(const std::function<void(const Leaf&)>& fn) const {
    std::vector<std::size_t> a(layout_.size(), 0), x(layout_.size(), 0);
    visit(root_, a, x, fn);
  }

  std::size_t leaf_count() const {
    std::size_t n = 0;
    for_each_leaf([&](const Leaf&) { ++n; });
    return n;
  }

  std::set<OutcomeLabel> outcomes() const {
    std::set<OutcomeLabel> out;
    for_each_leaf([&](const Leaf& l) { out.insert(l.label); });
    return out;
  }

  /// True iff the labelling is injective on leaves.
  bool injective() const {
    std::set<OutcomeLabel> seen;
    bool ok = true;
    for_each_leaf([&](const Leaf& l) { ok = seen.insert(l.label).second && ok; });
    return ok;
  }

private:
  void check(const StrategyNodePtr& node, std::vector<bool>& measured, std::size_t depth) const {
    if (!node) throw ParameterError("strategy: null node");
    if (std::holds_alternative<StrategyLeaf>(node->content)) {
      if (depth != layout_.size()) throw ParameterError("strategy: leaf before every box was measured");
      return;
    }
    const auto& br = std::get<StrategyBranch>(node->content);
    if (br.box >= layout_.size()) throw ParameterError("strategy: box index out of range");
    if (measured[br.box]) throw ParameterError("strategy: box " + std::to_string(br.box) + " measured twice");
    if (br.input >= layout_.box(br.box).inputs) throw ParameterError("strategy: input out of range");
    if (br.children.size() != layout_.box(br.box).outputs)
      throw ParameterError("strategy: need one child per output of box " + std::to_string(br.box));
    measured[br.box] = true;
    for (const auto& c : br.children) check(c, measured, depth + 1);
    measured[br.box] = false;
  }

  void visit(const StrategyNodePtr& node, std::vector<std::size_t>& a, std::vector<std::size_t>& x,
             const std::function<void(const Leaf&)>& fn) const {
    if (const auto* leaf = std::get_if<StrategyLeaf>(&node->content)) {
      if (leaf->outcome) {
        fn(Leaf{a, x, *leaf->outcome});
      } else {
        const OutcomeLabel label = a;
        fn(Leaf{a, x, label});
      }
      return;
    }
    const auto& br = std::get<StrategyBranch>(node->content);
    x[br.box] = br.input;
    for (std::size_t o = 0; o < br.children.size(); ++o) {
      a[br.box] = o;
      visit(br.children[o], a, x, fn);
    }
    a[br.box] = 0;
    x[br.box] = 0;
  }

  SystemLayout layout_;
  StrategyNodePtr root_;
};

/// Outcome distribution: sums p(a | x(a)) over leaves sharing a label.
inline OutcomeDistribution evaluate_strategy(const JointState& state, const BasicStrategy& strategy) {
  if (!(state.layout() == strategy.layout())) throw LayoutMismatchError("evaluate_strategy");
  OutcomeDistribution dist;
  strategy.for_each_leaf([&](const BasicStrategy::Leaf& leaf) { dist[leaf.label] += state.prob(leaf.outputs, leaf.inputs); });
  return dist;
}

/// Measures boxes 0..n-1 in order with the fixed inputs `x`.
inline BasicStrategy fiducial_strategy(const SystemLayout& layout, const std::vector<std::size_t>& x) {
  if (x.size() != layout.size()) throw ParameterError("fiducial_strategy: one input per box");
  std::function<StrategyNodePtr(std::size_t)> build = [&](std::size_t i) -> StrategyNodePtr {
    if (i == layout.size()) return make_leaf();
    auto child = build(i + 1);
    return make_branch(i, x[i], std::vector<StrategyNodePtr>(layout.box(i).outputs, child));
  };
  return BasicStrategy(layout, build(0));
}

/// Replaces every leaf label by `fn(full output tuple)`.
inline BasicStrategy relabel(const BasicStrategy& s, const std::function<OutcomeLabel(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> a(s.layout().size(), 0);
  std::function<StrategyNodePtr(const StrategyNodePtr&)> rebuild = [&](const StrategyNodePtr& node) -> StrategyNodePtr {
    if (std::holds_alternative<StrategyLeaf>(node->content)) return make_leaf(fn(a));
    const auto& br = std::get<StrategyBranch>(node->content);
    std::vector<StrategyNodePtr> children;
    for (std::size_t o = 0; o < br.children.size(); ++o) {
      a[br.box] = o;
      children.push_back(rebuild(br.children[o]));
    }
    a[br.box] = 0;
    return make_branch(br.box, br.input, std::move(children));
  };
  return BasicStrategy(s.layout(), rebuild(s.root()));
}

/// Run `sx` to completion, then `sy` on the boxes that follow. Labels are
/// concatenated; if `sx` labels differ in length, each is prefixed by its
/// length so the pairing stays unambiguous.
inline BasicStrategy product_strategy(const BasicStrategy& sx, const BasicStrategy& sy) {
  const std::size_t offset = sx.layout().size();
  std::set<std::size_t> lengths;
  sx.for_each_leaf([&](const BasicStrategy::Leaf& l) { lengths.insert(l.label.size()); });
  const bool tag = lengths.size() > 1;

  // Rebuild explicitly, tracking both output tuples so every leaf gets a
  // concrete label.
  std::vector<std::size_t> ax(sx.layout().size(), 0), ay(sy.layout().size(), 0);
  std::function<StrategyNodePtr(const StrategyNodePtr&, const OutcomeLabel&)> build_y =
      [&](const StrategyNodePtr& node, const OutcomeLabel& lx) -> StrategyNodePtr {
    if (const auto* leaf = std::get_if<StrategyLeaf>(&node->content)) {
      const OutcomeLabel ly = leaf->outcome ? *leaf->outcome : ay;
      OutcomeLabel label;
      if (tag) label.push_back(lx.size());
      label.insert(label.end(), lx.begin(), lx.end());
      label.insert(label.end(), ly.begin(), ly.end());
      return make_leaf(std::move(label));
    }
    const auto& br = std::get<StrategyBranch>(node->content);
    std::vector<StrategyNodePtr> children;
    for (std::size_t o = 0; o < br.children.size(); ++o) {
      ay[br.box] = o;
      children.push_back(build_y(br.children[o], lx));
    }
    ay[br.box] = 0;
    return make_branch(br.box + offset, br.input, std::move(children));
  };
  std::function<StrategyNodePtr(const StrategyNodePtr&)> build_x = [&](const StrategyNodePtr& node) -> StrategyNodePtr {
    if (const auto* leaf = std::get_if<StrategyLeaf>(&node->content)) {
      const OutcomeLabel lx = leaf->outcome ? *leaf->outcome : ax;
      return build_y(sy.root(), lx);
    }
    const auto& br = std::get<StrategyBranch>(node->content);
    std::vector<StrategyNodePtr> children;
    for (std::size_t o = 0; o < br.children.size(); ++o) {
      ax[br.box] = o;
      children.push_back(build_x(br.children[o]));
    }
    ax[br.box] = 0;
    return make_branch(br.box, br.input, std::move(children));
  };
  return BasicStrategy(sx.layout().concat(sy.layout()), build_x(sx.root()));
}

/// Default cap on enumerated strategies.
inline constexpr std::uint64_t kDefaultStrategyBudget = 1'000'000;

/// Number of basic strategies (canonical labels) on the layout; saturates at
/// uint64 max.
inline std::uint64_t count_strategies(const SystemLayout& layout) {
  const std::size_t n = layout.size();
  if (n > 20) return std::numeric_limits<std::uint64_t>::max();
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  auto mul = [&](std::uint64_t a, std::uint64_t b) { return (a != 0 && b > kMax / a) ? kMax : a * b; };
  std::vector<std::uint64_t> count(std::size_t{1} << n, 0);
  count[0] = 1;
  for (std::size_t mask = 1; mask < count.size(); ++mask) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      std::uint64_t sub = 1;
      for (std::size_t o = 0; o < layout.box(i).outputs; ++o) sub = mul(sub, count[mask & ~(std::size_t{1} << i)]);
      const std::uint64_t term = mul(layout.box(i).inputs, sub);
      total = (term > kMax - total) ? kMax : total + term;
    }
    count[mask] = total;
  }
  return count.back();
}

/// Streams every injective basic strategy exactly once, labelled by the full
/// output tuple. Throws ResourceError before yielding anything if the count
/// exceeds `budget`.
inline void enumerate_strategies(const SystemLayout& layout, const std::function<void(const BasicStrategy&)>& fn,
                                 std::uint64_t budget = kDefaultStrategyBudget) {
  const std::uint64_t total = count_strategies(layout);
  if (total > budget)
    throw ResourceError("layout " + layout.describe() + " has " + std::to_string(total) +
                        " basic strategies, budget is " + std::to_string(budget));
  const std::size_t n = layout.size();
  const std::size_t full = (std::size_t{1} << n) - 1;

  // Subtrees over every proper subset of boxes, materialized bottom-up.
  std::vector<std::vector<StrategyNodePtr>> trees(full + 1);
  trees[0] = {make_leaf()};

  // Calls emit(node) for every tree measuring exactly the boxes in mask.
  auto expand = [&](std::size_t mask, const std::function<void(StrategyNodePtr)>& emit) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      const auto& sub = trees[mask & ~(std::size_t{1} << i)];
      const std::size_t l = layout.box(i).outputs;
      for (std::size_t x = 0; x < layout.box(i).inputs; ++x) {
        std::vector<std::size_t> pick(l, 0);
        while (true) {
          std::vector<StrategyNodePtr> children(l);
          for (std::size_t o = 0; o < l; ++o) children[o] = sub[pick[o]];
          emit(make_branch(i, x, std::move(children)));
          std::size_t o = l;
          while (o-- > 0) {
            if (++pick[o] < sub.size()) break;
            pick[o] = 0;
          }
          if (o == static_cast<std::size_t>(-1)) break;
        }
      }
    }
  };

  // Masks in increasing popcount order so sub-masks are ready.
  std::vector<std::size_t> order;
  for (std::size_t m = 1; m < full; ++m) order.push_back(m);
  std::stable_sort(order.begin(), order.end(),
                   [](std::size_t a, std::size_t b) { return std::popcount(a) < std::popcount(b); });
  for (auto m : order) expand(m, [&](StrategyNodePtr t) { trees[m].push_back(std::move(t)); });
  expand(full, [&](StrategyNodePtr t) { fn(BasicStrategy(layout, std::move(t))); });
}

}  // namespace boxworld
