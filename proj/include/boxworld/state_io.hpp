#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "boxworld/state.hpp"

namespace boxworld {

using json = nlohmann::json;

inline json layout_to_json(const SystemLayout& layout) {
  json out = json::array();
  for (const auto& b : layout.boxes()) out.push_back({{"inputs", b.inputs}, {"outputs", b.outputs}});
  return out;
}

inline SystemLayout layout_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("\"layout\" must be a non-empty array");
  std::vector<BoxSpec> boxes;
  for (const auto& b : j) {
    if (!b.is_object() || !b.contains("inputs") || !b.contains("outputs") || !b["inputs"].is_number_unsigned() ||
        !b["outputs"].is_number_unsigned())
      throw ParseError("each layout entry needs unsigned \"inputs\" and \"outputs\"");
    boxes.push_back({b["inputs"].get<std::size_t>(), b["outputs"].get<std::size_t>()});
  }
  try {
    return SystemLayout(std::move(boxes));
  } catch (const ParameterError& e) {
    throw ParseError(e.what());
  }
}

namespace detail {

inline std::vector<std::size_t> tuple_from_json(const json& j, const char* name) {
  if (!j.is_array()) throw ParseError(std::string("\"") + name + "\" must be an array");
  std::vector<std::size_t> t;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) throw ParseError(std::string("\"") + name + "\" entries must be unsigned");
    t.push_back(v.get<std::size_t>());
  }
  return t;
}

inline json tuple_to_json(const std::vector<std::size_t>& t) { return json(t); }

/// Reads the sparse {"x","a",<value_key>} table. Values are fraction strings;
/// when `allow_numbers` is set, JSON numbers are accepted and converted exactly.
inline std::vector<Rational> table_from_json(const SystemLayout& layout, const json& j, const char* value_key,
                                             bool allow_numbers) {
  if (!j.is_array()) throw ParseError("\"table\" must be an array");
  std::vector<Rational> table(layout.table_size());
  std::set<std::size_t> seen;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("x") || !e.contains("a") || !e.contains(value_key))
      throw ParseError(std::string("table entries need \"x\", \"a\" and \"") + value_key + "\"");
    const auto x = tuple_from_json(e["x"], "x");
    const auto a = tuple_from_json(e["a"], "a");
    std::size_t f = 0;
    try {
      f = layout.flat_index(x, a);
    } catch (const StructuralError& err) {
      throw ParseError(std::string("table entry outside layout: ") + err.what());
    }
    if (!seen.insert(f).second) throw ParseError("duplicate table entry");
    const auto& v = e[value_key];
    if (v.is_string()) {
      table[f] = parse_rational(v.get<std::string>());
    } else if (allow_numbers && v.is_number()) {
      table[f] = from_double(v.get<double>());
    } else {
      throw ParseError(std::string("\"") + value_key + "\" must be a fraction string");
    }
  }
  return table;
}

inline json table_to_json(const SystemLayout& layout, std::span<const Rational> table, const char* value_key) {
  json out = json::array();
  const std::size_t A = layout.output_tuples();
  for (std::size_t f = 0; f < table.size(); ++f) {
    if (sgn(table[f]) == 0) continue;
    out.push_back({{"x", layout.decode_inputs(f / A)}, {"a", layout.decode_outputs(f % A)}, {value_key, to_string(table[f])}});
  }
  return out;
}

}  // namespace detail

inline json state_to_json(const JointState& s) {
  return {{"layout", layout_to_json(s.layout())}, {"table", detail::table_to_json(s.layout(), s.table(), "p")}};
}

/// Raw (unvalidated) layout and table, for callers that want the report.
struct RawState {
  SystemLayout layout;
  std::vector<Rational> table;
};

inline RawState raw_state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("layout") || !j.contains("table"))
    throw ParseError("state must be an object with \"layout\" and \"table\"");
  RawState raw{layout_from_json(j["layout"]), {}};
  raw.table = detail::table_from_json(raw.layout, j["table"], "p", false);
  return raw;
}

inline JointState state_from_json(const json& j) {
  auto raw = raw_state_from_json(j);
  return JointState::from_table(std::move(raw.layout), std::move(raw.table));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace boxworld
