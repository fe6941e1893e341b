#pragma once

#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "boxworld/errors.hpp"

namespace boxworld {

/// One box: `inputs` fiducial measurements, each with `outputs` outcomes.
struct BoxSpec {
  std::size_t inputs = 1;
  std::size_t outputs = 1;

  bool classical() const { return inputs == 1; }
  friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

/// Tuples are indexed in mixed radix with box 0 most significant, so flat
/// table order is lexicographic in (inputs, outputs).
class SystemLayout {
public:
  /// Upper bound on dense table entries.
  static constexpr std::size_t kMaxTableSize = std::size_t{1} << 32;

  SystemLayout() = default;

  explicit SystemLayout(std::vector<BoxSpec> boxes) : boxes_(std::move(boxes)) {
    if (boxes_.empty()) throw ParameterError("layout must contain at least one box");
    for (const auto& b : boxes_)
      if (b.inputs == 0 || b.outputs == 0)
        throw ParameterError("every box needs at least one input and one output");
    input_tuples_ = checked_product([](const BoxSpec& b) { return b.inputs; });
    output_tuples_ = checked_product([](const BoxSpec& b) { return b.outputs; });
    if (input_tuples_ > kMaxTableSize / output_tuples_)
      throw ResourceError("table of layout " + describe() + " is too large");
  }

  SystemLayout(std::initializer_list<BoxSpec> boxes) : SystemLayout(std::vector<BoxSpec>(boxes)) {}

  std::size_t size() const { return boxes_.size(); }
  const BoxSpec& box(std::size_t i) const { return boxes_.at(i); }
  const std::vector<BoxSpec>& boxes() const { return boxes_; }

  std::size_t non_classical_count() const {
    std::size_t n = 0;
    for (const auto& b : boxes_) n += b.classical() ? 0 : 1;
    return n;
  }
  bool has_single_output_box() const {
    for (const auto& b : boxes_)
      if (b.outputs == 1) return true;
    return false;
  }

  std::size_t input_tuples() const { return input_tuples_; }
  std::size_t output_tuples() const { return output_tuples_; }
  std::size_t table_size() const { return input_tuples_ * output_tuples_; }

  std::size_t input_index(std::span<const std::size_t> x) const {
    return encode(x, [](const BoxSpec& b) { return b.inputs; });
  }
  std::size_t output_index(std::span<const std::size_t> a) const {
    return encode(a, [](const BoxSpec& b) { return b.outputs; });
  }
  std::size_t flat_index(std::span<const std::size_t> x, std::span<const std::size_t> a) const {
    return input_index(x) * output_tuples_ + output_index(a);
  }

  std::vector<std::size_t> decode_inputs(std::size_t index) const {
    return decode(index, [](const BoxSpec& b) { return b.inputs; });
  }
  std::vector<std::size_t> decode_outputs(std::size_t index) const {
    return decode(index, [](const BoxSpec& b) { return b.outputs; });
  }

  /// Layout of the listed boxes, in the listed order.
  SystemLayout select(std::span<const std::size_t> keep) const {
    std::vector<BoxSpec> out;
    out.reserve(keep.size());
    for (auto i : keep) out.push_back(box(i));
    return SystemLayout(std::move(out));
  }

  SystemLayout concat(const SystemLayout& other) const {
    std::vector<BoxSpec> out = boxes_;
    out.insert(out.end(), other.boxes_.begin(), other.boxes_.end());
    return SystemLayout(std::move(out));
  }

  std::string describe() const {
    std::string s = "[";
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      if (i) s += ",";
      s += "(" + std::to_string(boxes_[i].inputs) + "x" + std::to_string(boxes_[i].outputs) + ")";
    }
    return s + "]";
  }

  friend bool operator==(const SystemLayout& l, const SystemLayout& r) { return l.boxes_ == r.boxes_; }

private:
  template <typename Radix>
  std::size_t checked_product(Radix radix) const {
    std::size_t p = 1;
    for (const auto& b : boxes_) {
      const std::size_t r = radix(b);
      if (p > kMaxTableSize / r) throw ResourceError("tuple space of layout is too large");
      p *= r;
    }
    return p;
  }

  template <typename Radix>
  std::size_t encode(std::span<const std::size_t> t, Radix radix) const {
    if (t.size() != boxes_.size()) throw StructuralError("tuple length does not match layout");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      const std::size_t r = radix(boxes_[i]);
      if (t[i] >= r) throw StructuralError("tuple entry out of range at box " + std::to_string(i));
      idx = idx * r + t[i];
    }
    return idx;
  }

  template <typename Radix>
  std::vector<std::size_t> decode(std::size_t idx, Radix radix) const {
    std::vector<std::size_t> t(boxes_.size());
    for (std::size_t i = boxes_.size(); i-- > 0;) {
      const std::size_t r = radix(boxes_[i]);
      t[i] = idx % r;
      idx /= r;
    }
    return t;
  }

  std::vector<BoxSpec> boxes_;
  std::size_t input_tuples_ = 0;
  std::size_t output_tuples_ = 0;
};

/// Walks every (x, a) pair of a layout in flat table order.
class TableCursor {
public:
  explicit TableCursor(const SystemLayout& layout)
      : layout_(&layout), x_(layout.size(), 0), a_(layout.size(), 0) {}

  const std::vector<std::size_t>& inputs() const { return x_; }
  const std::vector<std::size_t>& outputs() const { return a_; }
  std::size_t flat() const { return flat_; }
  bool done() const { return flat_ >= layout_->table_size(); }

  /// Returns the lowest box index whose input changed, or size() if only
  /// outputs changed.
  std::size_t advance() {
    ++flat_;
    const std::size_t n = layout_->size();
    for (std::size_t i = n; i-- > 0;) {
      if (++a_[i] < layout_->box(i).outputs) return n;
      a_[i] = 0;
    }
    for (std::size_t i = n; i-- > 0;) {
      if (++x_[i] < layout_->box(i).inputs) return i;
      x_[i] = 0;
    }
    return 0;
  }

private:
  const SystemLayout* layout_;
  std::vector<std::size_t> x_;
  std::vector<std::size_t> a_;
  std::size_t flat_ = 0;
};

}  // namespace boxworld
