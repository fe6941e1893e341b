#pragma once

#include <functional>
#include <string>

#include "boxworld/state_io.hpp"
#include "boxworld/strategy.hpp"

namespace boxworld {

/// Nested tree: {"box", "input", "children": {"<output>": subtree}} with
/// leaves {"outcome": [...]}. Canonical leaves are written with their
/// resolved output tuple.
inline json strategy_tree_to_json(const BasicStrategy& s) {
  std::vector<std::size_t> a(s.layout().size(), 0);
  std::function<json(const StrategyNodePtr&)> emit = [&](const StrategyNodePtr& node) -> json {
    if (const auto* leaf = std::get_if<StrategyLeaf>(&node->content))
      return {{"outcome", leaf->outcome ? *leaf->outcome : a}};
    const auto& br = std::get<StrategyBranch>(node->content);
    json children = json::object();
    for (std::size_t o = 0; o < br.children.size(); ++o) {
      a[br.box] = o;
      children[std::to_string(o)] = emit(br.children[o]);
    }
    a[br.box] = 0;
    return {{"box", br.box}, {"input", br.input}, {"children", children}};
  };
  return emit(s.root());
}

inline json strategy_to_json(const BasicStrategy& s) {
  return {{"layout", layout_to_json(s.layout())}, {"tree", strategy_tree_to_json(s)}};
}

/// Indented one-line-per-node rendering of the tree.
inline std::string strategy_to_text(const BasicStrategy& s) {
  std::string out;
  std::vector<std::size_t> a(s.layout().size(), 0);
  std::function<void(const StrategyNodePtr&, const std::string&)> emit = [&](const StrategyNodePtr& node,
                                                                             const std::string& indent) {
    if (const auto* leaf = std::get_if<StrategyLeaf>(&node->content)) {
      const auto& label = leaf->outcome ? *leaf->outcome : a;
      out += "outcome (";
      for (std::size_t i = 0; i < label.size(); ++i) out += (i ? "," : "") + std::to_string(label[i]);
      out += ")\n";
      return;
    }
    const auto& br = std::get<StrategyBranch>(node->content);
    out += "measure box " + std::to_string(br.box) + " with input " + std::to_string(br.input) + "\n";
    for (std::size_t o = 0; o < br.children.size(); ++o) {
      a[br.box] = o;
      out += indent + "  " + std::to_string(o) + ": ";
      emit(br.children[o], indent + "    ");
    }
    a[br.box] = 0;
  };
  emit(s.root(), "");
  return out;
}

inline StrategyNodePtr strategy_tree_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("strategy node must be an object");
  if (j.contains("outcome")) return make_leaf(detail::tuple_from_json(j["outcome"], "outcome"));
  if (!j.contains("box") || !j.contains("input") || !j.contains("children") || !j["box"].is_number_unsigned() ||
      !j["input"].is_number_unsigned() || !j["children"].is_object())
    throw ParseError("strategy node needs \"box\", \"input\" and \"children\"");
  const auto& ch = j["children"];
  std::vector<StrategyNodePtr> children(ch.size());
  for (auto it = ch.begin(); it != ch.end(); ++it) {
    std::size_t o = 0;
    try {
      std::size_t used = 0;
      o = std::stoul(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument(it.key());
    } catch (const std::exception&) {
      throw ParseError("child key '" + it.key() + "' is not an output index");
    }
    if (o >= children.size() || children[o]) throw ParseError("children must be keyed 0..l-1 without gaps");
    children[o] = strategy_tree_from_json(it.value());
  }
  return make_branch(j["box"].get<std::size_t>(), j["input"].get<std::size_t>(), std::move(children));
}

inline BasicStrategy strategy_from_json(const json& j) {
  if (!j.is_object() || !j.contains("layout") || !j.contains("tree"))
    throw ParseError("strategy must be an object with \"layout\" and \"tree\"");
  try {
    return BasicStrategy(layout_from_json(j["layout"]), strategy_tree_from_json(j["tree"]));
  } catch (const ParameterError& e) {
    throw ParseError(e.what());
  }
}

}  // namespace boxworld
