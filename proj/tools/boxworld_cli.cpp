#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "boxworld/boxworld.hpp"
#include "boxworld/property_suite.hpp"

using namespace boxworld;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;
constexpr const char* kSchema = "boxworld/1";

struct Common {
  std::string format = "text";
  std::optional<double> tolerance;
  std::uint64_t budget = 20'000;

  bool json_mode() const { return format == "json"; }
  double tol(double fallback) const { return tolerance.value_or(fallback); }
};

void print_json(json j, const std::string& command) {
  j["schema"] = kSchema;
  j["command"] = command;
  std::cout << j.dump(2) << "\n";
}

std::string vec_text(const ConeVector& v) {
  std::ostringstream o;
  o << std::setprecision(12) << "(" << v.x << ", " << v.y << ", " << v.z << ")";
  return o.str();
}

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(12) << v;
  return o.str();
}

/// "x,y,z" or "0,1|2" style lists.
std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("bad box index '" + item + "' in '" + text + "'");
    out.push_back(std::stoul(item));
  }
  if (out.empty()) throw ParseError("empty box list");
  return out;
}

Bipartition parse_parties(const std::string& text, std::size_t boxes) {
  if (text.empty()) return Bipartition::prefix(1, boxes);
  const auto bar = text.find('|');
  if (bar == std::string::npos) throw ParseError("parties must look like '0,1|2'");
  Bipartition p{parse_index_list(text.substr(0, bar)), parse_index_list(text.substr(bar + 1))};
  return p;
}

// ---- validate ---------------------------------------------------------------

int cmd_validate(const Common& c, const std::string& path) {
  const auto raw = raw_state_from_json(read_json_file(path));
  const auto report = validate_state(raw.layout, raw.table);
  if (c.json_mode()) {
    json violations = json::array();
    for (const auto& v : report.violations) violations.push_back(v.describe());
    print_json({{"file", path},
                {"layout", layout_to_json(raw.layout)},
                {"valid", report.ok()},
                {"counts",
                 {{"range", report.count(ViolationKind::range)},
                  {"normalization", report.count(ViolationKind::normalization)},
                  {"no_signalling", report.count(ViolationKind::no_signalling)}}},
                {"violations", violations}},
               "validate");
  } else {
    std::cout << path << ": layout " << raw.layout.describe() << "\n";
    if (report.ok()) std::cout << "valid\n";
    for (const auto& v : report.violations) std::cout << "violation " << v.describe() << "\n";
  }
  return report.ok() ? kPass : kFail;
}

// ---- reproduce-main ----------------------------------------------------------

int cmd_reproduce_main(const Common& c, std::size_t n) {
  const auto r = reproduce_main(n);
  const bool ok = r.deviation <= c.tol(1e-9) && r.exact;
  if (c.json_mode()) {
    print_json({{"N", n},
                {"achieved", cone_vector_to_json(r.achieved)},
                {"expected", cone_vector_to_json(r.expected)},
                {"deviation", r.deviation},
                {"exact", r.exact},
                {"optimal_strategy", strategy_tree_to_json(r.optimal.strategy)},
                {"passed", ok}},
               "reproduce-main");
  } else {
    std::cout << "example_main(" << n << ")\n"
              << "entropy vector  " << vec_text(r.achieved) << "\n"
              << "expected        " << vec_text(r.expected) << "\n"
              << "deviation       " << num(r.deviation) << "\n"
              << "optimal measurement of XY:\n"
              << strategy_to_text(r.optimal.strategy) << (ok ? "PASS\n" : "FAIL\n");
  }
  return ok ? kPass : kFail;
}

// ---- reproduce-damped --------------------------------------------------------

int cmd_reproduce_damped(const Common& c, const std::vector<std::size_t>& grid, double k) {
  std::vector<DampedReproduction> rows;
  for (auto n : grid) rows.push_back(reproduce_damped(n, k));
  const double tol = c.tol(1e-6);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.deviation <= tol && r.exact;
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    decreasing = decreasing && rows[i].achieved.y < rows[i - 1].achieved.y && rows[i].achieved.z < rows[i - 1].achieved.z;
  ok = ok && decreasing;
  if (c.json_mode()) {
    json items = json::array();
    for (const auto& r : rows)
      items.push_back({{"N", r.n},
                       {"lambda", r.lambda.target},
                       {"lambda_rounded", to_string(r.lambda.rounded)},
                       {"achieved", cone_vector_to_json(r.achieved)},
                       {"closed_form", cone_vector_to_json(r.closed_form)},
                       {"difference", r.deviation},
                       {"exact", r.exact}});
    print_json({{"k", k}, {"rows", items}, {"strictly_decreasing", decreasing}, {"tolerance", tol}, {"passed", ok}},
               "reproduce-damped");
  } else {
    for (const auto& r : rows)
      std::cout << "N=" << r.n << " lambda=" << num(r.lambda.target) << "\n  achieved    " << vec_text(r.achieved)
                << "\n  closed form " << vec_text(r.closed_form) << "\n  difference  " << num(r.deviation) << "\n";
    if (rows.size() > 1) std::cout << "second/third components strictly decreasing: " << (decreasing ? "yes" : "no") << "\n";
    std::cout << (ok ? "PASS\n" : "FAIL\n");
  }
  return ok ? kPass : kFail;
}

// ---- synthesize --------------------------------------------------------------

int cmd_synthesize(const Common& c, const std::vector<double>& target, std::size_t n) {
  const ConeVector v{target.at(0), target.at(1), target.at(2)};
  LocalityBudget budget;
  budget.max_strategies_per_side = c.budget;
  const auto rep = separability_report(v, n, budget);
  const auto& s = rep.synthesis;
  // Targets on the z = x + y face are reached up to the entropy inversion.
  const bool on_face = s.decomposition.lambda[2] == 0 && s.decomposition.lambda[3] == 0;
  const bool close_enough = !on_face || s.error <= c.tol(1e-6);
  const bool ok = rep.local && rep.verified && close_enough && cone_contains(s.achieved);
  if (c.json_mode()) {
    auto j = separability_to_json(rep);
    j["passed"] = ok;
    print_json(j, "synthesize");
  } else {
    std::cout << "target        " << vec_text(v) << "\n"
              << "decomposition " << num(s.decomposition.lambda[0]) << " e1 + " << num(s.decomposition.lambda[1])
              << " e2 + " << num(s.decomposition.lambda[2]) << " e3 + " << num(s.decomposition.lambda[3]) << " e4\n"
              << "N             " << n << "\n"
              << "achieved      " << vec_text(s.achieved) << "\n"
              << "error         " << num(s.error) << "\n"
              << "locality      " << (rep.local ? "LOCAL" : "NONLOCAL") << " (" << certificate_name(rep.certificate)
              << " certificate, " << rep.terms << " terms, " << (rep.verified ? "verified exactly" : "NOT verified")
              << ")\n"
              << (ok ? "PASS\n" : "FAIL\n");
  }
  return ok ? kPass : kFail;
}

// ---- locality ----------------------------------------------------------------

int cmd_locality(const Common& c, const std::string& path, const std::string& parties_text,
                 const std::string& certificate_path) {
  const auto state = state_from_json(read_json_file(path));
  const auto parties = parse_parties(parties_text, state.size());
  LocalityBudget budget;
  budget.max_strategies_per_side = c.budget;
  const auto result = is_local(state, parties, budget);
  bool verified = true;
  if (result.local())
    verified = verify_decomposition(state, decomposition_terms(result, state.layout(), parties), parties);
  const auto cert = locality_to_json(result);
  if (!certificate_path.empty()) write_json_file(certificate_path, cert);
  if (c.json_mode()) {
    json j = cert;
    j["file"] = path;
    j["parties"] = {parties.a_boxes, parties.b_boxes};
    j["verified"] = verified;
    if (!certificate_path.empty()) j["certificate_path"] = certificate_path;
    print_json(j, "locality");
  } else {
    std::cout << (result.local() ? "LOCAL" : "NONLOCAL");
    if (!certificate_path.empty()) std::cout << " " << certificate_path;
    std::cout << "\n";
    if (result.local()) {
      std::cout << result.weights.size() << " deterministic strategy pairs, decomposition "
                << (verified ? "verified exactly" : "FAILED verification") << "\n";
      for (const auto& w : result.weights) {
        std::cout << "  " << to_string(w.weight) << " :";
        for (std::size_t j = 0; j < w.a.boxes.size(); ++j) {
          std::cout << " box" << w.a.boxes[j] << "=[";
          for (std::size_t x = 0; x < w.a.outputs[j].size(); ++x) std::cout << (x ? "," : "") << w.a.outputs[j][x];
          std::cout << "]";
        }
        std::cout << " |";
        for (std::size_t j = 0; j < w.b.boxes.size(); ++j) {
          std::cout << " box" << w.b.boxes[j] << "=[";
          for (std::size_t x = 0; x < w.b.outputs[j].size(); ++x) std::cout << (x ? "," : "") << w.b.outputs[j][x];
          std::cout << "]";
        }
        std::cout << "\n";
      }
    }
  }
  return verified ? kPass : kFail;
}

// ---- classical-comparison ----------------------------------------------------

int cmd_classical_comparison(const Common& c, std::size_t n) {
  const auto r = classical_comparison(n);
  const double tol = c.tol(1e-9);
  const double gap = 0.5 * std::log2(static_cast<double>(n));
  const bool ok = r.classical_deviation <= tol && r.gnst_deviation <= tol && r.classical_monotone &&
                  std::abs(r.gnst_violation - gap) <= tol;
  if (c.json_mode()) {
    print_json({{"N", n},
                {"classical", cone_vector_to_json(r.classical)},
                {"classical_expected", cone_vector_to_json(r.classical_expected)},
                {"gnst", cone_vector_to_json(r.gnst)},
                {"gnst_expected", cone_vector_to_json(r.gnst_expected)},
                {"classical_monotone", r.classical_monotone},
                {"gnst_monotonicity_violation", r.gnst_violation},
                {"passed", ok}},
               "classical-comparison");
  } else {
    std::cout << "N=" << n << "\n"
              << "classical (Shannon)  " << vec_text(r.classical) << "  expected " << vec_text(r.classical_expected)
              << "\n"
              << "box world            " << vec_text(r.gnst) << "  expected " << vec_text(r.gnst_expected) << "\n"
              << "classical S(AB) >= S(A): " << (r.classical_monotone ? "yes" : "no") << "\n"
              << "box world H(A) - H(AB) = " << num(r.gnst_violation) << "\n"
              << (ok ? "PASS\n" : "FAIL\n");
  }
  return ok ? kPass : kFail;
}

// ---- property-suite ----------------------------------------------------------

int cmd_property_suite(const Common& c, SuiteConfig cfg, const std::string& fault,
                       const std::vector<std::string>& counts) {
  if (fault == "non-adaptive")
    cfg.fault = Fault::non_adaptive;
  else if (!fault.empty() && fault != "none")
    throw ParseError("unknown fault '" + fault + "'");
  if (c.tolerance) cfg.tolerance = *c.tolerance;
  for (const auto& item : counts) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("--count expects name=value");
    const std::string name = item.substr(0, eq);
    std::size_t value = 0;
    try {
      value = std::stoul(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ParseError("bad count in '" + item + "'");
    }
    std::size_t* slot = nullptr;
    if (name == "subadditivity") slot = &cfg.subadditivity;
    if (name == "additivity") slot = &cfg.additivity;
    if (name == "dp_vs_bruteforce") slot = &cfg.dp_vs_bruteforce;
    if (name == "grouping") slot = &cfg.grouping;
    if (name == "closure") slot = &cfg.closure;
    if (name == "effects") slot = &cfg.effects;
    if (name == "equivalence") slot = &cfg.equivalence;
    if (name == "locality") slot = &cfg.locality;
    if (name == "cone") slot = &cfg.cone;
    if (name == "synthesis") slot = &cfg.synthesis;
    if (!slot) throw ParseError("unknown count '" + name + "'");
    *slot = value;
  }
  const auto report = run_property_suite(cfg);
  if (c.json_mode()) {
    auto j = suite_report_to_json(report);
    j["fault"] = fault.empty() ? "none" : fault;
    print_json(j, "property-suite");
  } else {
    std::cout << suite_report_text(report);
  }
  return report.passed() ? kPass : kFail;
}

// ---- emit ----------------------------------------------------------------------

int cmd_emit(const Common& c, const std::string& what, std::size_t n, double k, const std::string& visibility,
             const std::string& out) {
  JointState s = pr_box();
  if (what == "pr-box") {
  } else if (what == "noisy-pr-box") {
    s = noisy_pr_box(parse_rational(visibility));
  } else if (what == "main") {
    s = example_main(n);
  } else if (what == "damped") {
    s = example_damped(n, k);
  } else if (what == "classical-realization") {
    s = classical_realization(n);
  } else {
    throw ParseError("unknown state '" + what + "'");
  }
  const auto j = state_to_json(s);
  if (!out.empty()) {
    write_json_file(out, j);
    if (!c.json_mode()) std::cout << "wrote " << out << " (" << s.layout().describe() << ")\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-world states, measurement entropies, locality and entropy cones"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--tolerance", common.tolerance, "Override the command's numeric tolerance");
    sub->add_option("--budget", common.budget, "Strategies per party allowed in locality LPs");
  };

  std::string path, parties, certificate, fault, what = "main", visibility = "1";
  std::size_t n = 4;
  double k = 1;
  std::vector<std::size_t> grid{256, 4096, 65536};
  std::vector<double> target;
  SuiteConfig suite;
  std::vector<std::string> counts;

  auto* validate = app.add_subcommand("validate", "Check range, normalization and no-signalling of a state file");
  validate->add_option("file", path, "State JSON")->required();
  add_common(validate);

  auto* main_cmd = app.add_subcommand("reproduce-main", "Entropy vector and optimal measurement of example_main(N)");
  main_cmd->add_option("--N", n, "Scale N >= 1");
  add_common(main_cmd);

  auto* damped = app.add_subcommand("reproduce-damped", "Damped family against its closed form");
  damped->add_option("--N", grid, "Scales (comma separated)")->delimiter(',');
  damped->add_option("--k", k, "Target first component");
  add_common(damped);

  auto* synth = app.add_subcommand("synthesize", "Synthesize a separable state for a cone target");
  synth->add_option("--target", target, "x,y,z")->delimiter(',')->expected(3)->required();
  synth->add_option("--N", n, "Scale of the damped factors")->default_val(65536);
  add_common(synth);

  auto* loc = app.add_subcommand("locality", "Exact local-hidden-variable test");
  loc->add_option("file", path, "State JSON")->required();
  loc->add_option("--parties", parties, "Bipartition like '0,1|2' (default: box 0 against the rest)");
  loc->add_option("--certificate", certificate, "Write the certificate JSON here");
  add_common(loc);

  auto* cc = app.add_subcommand("classical-comparison", "Classical realization against example_main(N)");
  cc->add_option("--N", n, "Scale N >= 2");
  add_common(cc);

  auto* ps = app.add_subcommand("property-suite", "Randomized and exhaustive invariant checks");
  ps->add_option("--seed", suite.seed, "Seed");
  ps->add_option("--only", suite.only, "Run checks with these name prefixes");
  ps->add_option("--count", counts, "Override a case count, e.g. subadditivity=100");
  ps->add_option("--inject-fault", fault, "Deliberate defect: non-adaptive")->check(CLI::IsMember({"none", "non-adaptive"}));
  add_common(ps);

  auto* emit = app.add_subcommand("emit", "Write a built-in state as JSON");
  emit->add_option("state", what, "pr-box | noisy-pr-box | main | damped | classical-realization")->required();
  emit->add_option("--N", n, "Scale");
  emit->add_option("--k", k, "Damped family target");
  emit->add_option("--visibility", visibility, "Visibility for noisy-pr-box, as a fraction");
  emit->add_option("-o,--output", path, "Output file (default: stdout)");
  add_common(emit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*validate) return cmd_validate(common, path);
    if (*main_cmd) return cmd_reproduce_main(common, n);
    if (*damped) return cmd_reproduce_damped(common, grid, k);
    if (*synth) return cmd_synthesize(common, target, n);
    if (*loc) return cmd_locality(common, path, parties, certificate);
    if (*cc) return cmd_classical_comparison(common, n);
    if (*ps) return cmd_property_suite(common, suite, fault, counts);
    if (*emit) return cmd_emit(common, what, n, k, visibility, path);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const ConeError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const StructuralError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
