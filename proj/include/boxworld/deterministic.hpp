#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "boxworld/constructors.hpp"

namespace boxworld {

/// A deterministic local strategy for a group of boxes: box `boxes[j]` answers
/// input x with `outputs[j][x]`.
struct DeterministicStrategy {
  std::vector<std::size_t> boxes;
  std::vector<std::vector<std::size_t>> outputs;

  /// Output tuple (in `boxes` order) for an input tuple over the same boxes.
  std::vector<std::size_t> respond(std::span<const std::size_t> x) const {
    std::vector<std::size_t> a(boxes.size());
    for (std::size_t j = 0; j < boxes.size(); ++j) a[j] = outputs[j].at(x[j]);
    return a;
  }

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
  friend auto operator<=>(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

/// Number of deterministic strategies, prod l_i^k_i; saturates.
inline std::uint64_t count_deterministic(const SystemLayout& layout) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = 1;
  for (const auto& b : layout.boxes())
    for (std::size_t x = 0; x < b.inputs; ++x) n = (b.outputs != 0 && n > kMax / b.outputs) ? kMax : n * b.outputs;
  return n;
}

/// Calls fn(outputs) for every per-box assignment, in lexicographic order of
/// (box 0 input 0, box 0 input 1, ..., last box last input).
inline void for_each_assignment(const SystemLayout& layout, std::uint64_t budget,
                                const std::function<void(const std::vector<std::vector<std::size_t>>&)>& fn) {
  const auto total = count_deterministic(layout);
  if (total > budget)
    throw ResourceError("layout " + layout.describe() + " has " + std::to_string(total) +
                        " deterministic strategies, budget is " + std::to_string(budget));
  std::vector<std::vector<std::size_t>> out;
  for (const auto& b : layout.boxes()) out.emplace_back(b.inputs, 0);
  while (true) {
    fn(out);
    std::size_t i = layout.size();
    bool carried = true;
    while (carried && i-- > 0) {
      std::size_t x = out[i].size();
      while (x-- > 0) {
        if (++out[i][x] < layout.box(i).outputs) {
          carried = false;
          break;
        }
        out[i][x] = 0;
      }
    }
    if (carried) return;
  }
}

/// Every deterministic strategy of the layout (party boxes 0..n-1).
inline std::vector<DeterministicStrategy> enumerate_deterministic(const SystemLayout& layout,
                                                                  std::uint64_t budget = 20'000) {
  std::vector<DeterministicStrategy> all;
  std::vector<std::size_t> boxes(layout.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) boxes[i] = i;
  for_each_assignment(layout, budget, [&](const auto& outputs) { all.push_back({boxes, outputs}); });
  return all;
}

}  // namespace boxworld
