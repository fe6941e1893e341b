#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "boxworld/cone.hpp"
#include "boxworld/effects.hpp"
#include "boxworld/entropy.hpp"
#include "boxworld/locality.hpp"
#include "boxworld/random.hpp"

namespace boxworld {

/// Deliberate defects for checking that the suite notices them.
enum class Fault {
  none,
  non_adaptive,  ///< entropy estimate ignores adaptivity: min over input tuples of H(p(.|x))
};

struct SuiteConfig {
  std::uint64_t seed = 20240611;
  std::size_t subadditivity = 500;
  std::size_t additivity = 200;
  std::size_t dp_vs_bruteforce = 200;
  std::size_t grouping = 100;
  std::size_t closure = 100;
  std::size_t effects = 100;
  std::size_t equivalence = 50;
  std::size_t locality = 100;
  std::size_t cone = 1000;
  std::size_t synthesis = 40;
  std::uint64_t strategy_cap = 50'000;  ///< random layouts above this strategy count are redrawn
  double tolerance = kEntropyTolerance;
  Fault fault = Fault::none;
  std::vector<std::string> only;  ///< run only checks whose name starts with one of these
};

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return !checks.empty();
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline json suite_report_to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"cases", c.cases},
                      {"failures", c.failures},
                      {"passed", c.passed()},
                      {"first_failure", c.first_failure}});
  return {{"seed", r.seed}, {"passed", r.passed()}, {"checks", checks}};
}

inline std::string suite_report_text(const SuiteReport& r) {
  std::ostringstream out;
  for (const auto& c : r.checks) {
    out << (c.passed() ? "PASS " : "FAIL ") << c.name << " (" << c.cases << " cases";
    if (c.failures) out << ", " << c.failures << " failed";
    out << ")";
    if (!c.first_failure.empty()) out << ": " << c.first_failure;
    out << "\n";
  }
  out << (r.passed() ? "all checks passed" : "some checks failed") << " (seed " << r.seed << ")\n";
  return out.str();
}

namespace detail {

/// Records cases and the first failure of one check.
class Recorder {
public:
  explicit Recorder(CheckResult& r) : r_(r) {}

  void expect(bool ok, const std::function<std::string()>& describe) {
    ++r_.cases;
    if (ok) return;
    if (r_.failures++ == 0) r_.first_failure = describe();
  }

  void fail(const std::string& what) {
    ++r_.cases;
    if (r_.failures++ == 0) r_.first_failure = what;
  }

private:
  CheckResult& r_;
};

inline double non_adaptive_entropy(const JointState& s) {
  const auto& layout = s.layout();
  const std::size_t A = layout.output_tuples();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < layout.input_tuples(); ++x)
    best = std::min(best, shannon(s.table().subspan(x * A, A)));
  return best;
}

inline std::string fmt(double v) {
  std::ostringstream o;
  o.precision(15);
  o << v;
  return o.str();
}

inline std::vector<std::size_t> all_boxes(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace detail

/// Randomized and exhaustive invariant checks. Every check draws from its own
/// stream of the seed, so reports are reproducible and independent of the
/// case counts of other checks.
class PropertySuite {
public:
  explicit PropertySuite(SuiteConfig config) : cfg_(std::move(config)) {}

  /// Entropy estimate under the configured fault.
  double entropy(const JointState& s) const {
    if (cfg_.fault == Fault::non_adaptive) return detail::non_adaptive_entropy(s);
    return measurement_entropy(s).bits;
  }

  SuiteReport run() const {
    SuiteReport report;
    report.seed = cfg_.seed;
    const std::vector<std::pair<std::string, void (PropertySuite::*)(Rng&, detail::Recorder&) const>> checks{
        {"boxes.closure", &PropertySuite::check_closure},
        {"entropy.subadditivity", &PropertySuite::check_subadditivity},
        {"entropy.additivity", &PropertySuite::check_additivity},
        {"entropy.dp_vs_bruteforce", &PropertySuite::check_dp_vs_bruteforce},
        {"entropy.grouping", &PropertySuite::check_grouping},
        {"entropy.monotonicity_gap", &PropertySuite::check_monotonicity_gap},
        {"measurements.effects_consistency", &PropertySuite::check_effects_consistency},
        {"measurements.effects_equal_equivalence", &PropertySuite::check_equivalence},
        {"measurements.fine_grained_iff_injective", &PropertySuite::check_fine_grained},
        {"measurements.separating_state", &PropertySuite::check_separating_state},
        {"locality.mixtures", &PropertySuite::check_locality_mixtures},
        {"locality.pr_noise_threshold", &PropertySuite::check_pr_threshold},
        {"cone.decomposition", &PropertySuite::check_cone_decomposition},
        {"cone.synthesis", &PropertySuite::check_synthesis},
    };
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& [name, fn] = checks[i];
      if (!selected(name)) continue;
      CheckResult result{name, 0, 0, {}};
      detail::Recorder rec(result);
      Rng rng(stream_seed(cfg_.seed, i));
      try {
        (this->*fn)(rng, rec);
      } catch (const std::exception& e) {
        rec.fail(std::string("exception: ") + e.what());
      }
      report.checks.push_back(std::move(result));
    }
    return report;
  }

private:
  bool selected(const std::string& name) const {
    if (cfg_.only.empty()) return true;
    for (const auto& prefix : cfg_.only)
      if (name.rfind(prefix, 0) == 0) return true;
    return false;
  }

  JointState random_state_on(Rng& rng, const LayoutShape& shape) const {
    return random_state(rng, random_layout(rng, shape));
  }

  // marginal composition, conditioning and re-mixing, mix linearity,
  // tensor associativity, validity of everything produced
  void check_closure(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{1, 3, 3, 1, 3};
    for (std::size_t c = 0; c < cfg_.closure; ++c) {
      const auto s = random_state_on(rng, shape);
      const auto& layout = s.layout();
      const std::size_t n = layout.size();
      rec.expect(validate_state(layout, s.table()).ok(), [&] { return "random state invalid on " + layout.describe(); });

      // T: random ordered subset; U: ordered subset of T's positions.
      auto perm = detail::all_boxes(n);
      std::shuffle(perm.begin(), perm.end(), rng.engine());
      perm.resize(rng.between(1, n));
      std::vector<std::size_t> pos = detail::all_boxes(perm.size());
      std::shuffle(pos.begin(), pos.end(), rng.engine());
      pos.resize(rng.between(1, pos.size()));
      std::vector<std::size_t> direct;
      for (auto p : pos) direct.push_back(perm[p]);
      const auto mt = marginalize(s, perm);
      rec.expect(validate_state(mt.layout(), mt.table()).ok(), [&] { return std::string("marginal not no-signalling"); });
      rec.expect(marginalize(mt, pos) == marginalize(s, direct),
                 [&] { return "marginal of marginal differs on " + layout.describe(); });

      // sum_o p(o|x) q_o reproduces the marginal on the other boxes.
      if (n >= 2) {
        const std::size_t box = rng.below(n), input = rng.below(layout.box(box).inputs);
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < n; ++j)
          if (j != box) rest.push_back(j);
        const auto target = marginalize(s, rest);
        std::vector<Rational> acc(target.table().size());
        Rational total = 0;
        for (const auto& part : condition_all(s, box, input)) {
          total += part.probability;
          if (!part.remainder) continue;
          rec.expect(validate_state(part.remainder->layout(), part.remainder->table()).ok(),
                     [&] { return std::string("conditional state invalid"); });
          for (std::size_t f = 0; f < acc.size(); ++f) acc[f] += part.probability * part.remainder->table()[f];
        }
        rec.expect(total == 1, [&] { return "outcome probabilities sum to " + to_string(total); });
        rec.expect(std::equal(acc.begin(), acc.end(), target.table().begin()),
                   [&] { return "re-mixing conditionals misses the marginal on " + layout.describe(); });
      }

      // mix commutes with marginalization.
      const auto t = random_state(rng, layout);
      const Rational w = make_rational(static_cast<long>(rng.between(0, 8)), 8);
      const auto m = mix({s, t}, {w, Rational(1 - w)});
      rec.expect(validate_state(layout, m.table()).ok(), [&] { return std::string("mixture invalid"); });
      rec.expect(marginalize(m, perm) == mix({marginalize(s, perm), marginalize(t, perm)}, {w, Rational(1 - w)}),
                 [&] { return std::string("mix does not commute with marginalize"); });

      // (s t) u = s (t u)
      const auto u = random_state_on(rng, {1, 1, 2, 1, 2});
      const auto left = tensor(tensor(s, t), u), right = tensor(s, tensor(t, u));
      rec.expect(left == right, [&] { return std::string("tensor is not associative"); });
      rec.expect(validate_state(left.layout(), left.table()).ok(), [&] { return std::string("tensor product invalid"); });
    }
  }

  void check_subadditivity(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{2, 2, 3, 1, 3};
    for (std::size_t c = 0; c < cfg_.subadditivity; ++c) {
      const auto s = random_state_on(rng, shape);
      const double hx = entropy(marginalize(s, {0})), hy = entropy(marginalize(s, {1})), hxy = entropy(s);
      rec.expect(hx >= -cfg_.tolerance && hy >= -cfg_.tolerance && hxy >= -cfg_.tolerance,
                 [&] { return "negative entropy on " + s.layout().describe(); });
      rec.expect(hxy <= hx + hy + cfg_.tolerance, [&] {
        return "H(XY)=" + detail::fmt(hxy) + " > H(X)+H(Y)=" + detail::fmt(hx + hy) + " on " + s.layout().describe();
      });
    }
  }

  void check_additivity(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{1, 2, 3, 1, 3};
    for (std::size_t c = 0; c < cfg_.additivity; ++c) {
      SystemLayout ls, lt;
      do {
        ls = random_layout(rng, shape);
        lt = random_layout(rng, shape);
      } while (ls.non_classical_count() + lt.non_classical_count() > 2);
      const auto s = random_state(rng, ls), t = random_state(rng, lt);
      const double hs = entropy(s), ht = entropy(t), hst = entropy(tensor(s, t));
      rec.expect(std::abs(hst - hs - ht) <= cfg_.tolerance, [&] {
        return "H(s t)=" + detail::fmt(hst) + " vs " + detail::fmt(hs + ht) + " on " + ls.describe() + " (x) " +
               lt.describe();
      });
    }
  }

  void check_dp_vs_bruteforce(Rng& rng, detail::Recorder& rec) const {
    auto compare = [&](const JointState& s, const std::string& what) {
      const double dp = entropy(s), bf = measurement_entropy_bruteforce(s, cfg_.strategy_cap);
      rec.expect(std::abs(dp - bf) <= cfg_.tolerance,
                 [&] { return what + ": dp " + detail::fmt(dp) + " vs brute force " + detail::fmt(bf); });
    };
    compare(pr_box(), "pr_box");
    for (std::size_t n = 1; n <= 4; ++n) compare(example_main(n), "example_main(" + std::to_string(n) + ")");
    const LayoutShape shape{1, 3, 3, 1, 3};
    for (std::size_t c = 0; c < cfg_.dp_vs_bruteforce; ++c) {
      SystemLayout layout;
      do layout = random_layout(rng, shape);
      while (count_strategies(layout) > cfg_.strategy_cap);
      compare(random_state(rng, layout), "random state on " + layout.describe());
    }
  }

  // H = min over first moves of [H(first outcome) + expected remainder], and no
  // first move does better.
  void check_grouping(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{2, 3, 3, 1, 3};
    for (std::size_t c = 0; c < cfg_.grouping; ++c) {
      const auto s = random_state_on(rng, shape);
      EntropySolver solver;
      const double h = solver.solve(s);
      double best = std::numeric_limits<double>::infinity();
      bool below = false;
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t x = 0; x < s.layout().box(i).inputs; ++x) {
          const double v = solver.move_value(s, i, x);
          below = below || v < h - cfg_.tolerance;
          best = std::min(best, v);
        }
      rec.expect(!below && std::abs(best - h) <= cfg_.tolerance,
                 [&] { return "first-move minimum " + detail::fmt(best) + " vs " + detail::fmt(h); });
    }
  }

  void check_monotonicity_gap(Rng&, detail::Recorder& rec) const {
    for (std::size_t n = 2; n <= 16; ++n) {
      const auto s = example_main(n);
      const double gap = entropy(marginalize(s, {0})) - entropy(s);
      rec.expect(std::abs(gap - 0.5 * std::log2(static_cast<double>(n))) <= cfg_.tolerance, [&] {
        return "example_main(" + std::to_string(n) + "): H(X)-H(XY)=" + detail::fmt(gap);
      });
    }
  }

  void check_effects_consistency(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{1, 3, 3, 1, 3};
    for (std::size_t c = 0; c < cfg_.effects; ++c) {
      const auto s = random_state_on(rng, shape);
      const auto strategy = random_strategy(rng, s.layout(), rng.coin());
      const auto dist = evaluate_strategy(s, strategy);
      const auto effects = strategy_effects(strategy);
      Rational total = 0;
      bool agree = effects.size() == dist.size();
      for (const auto& e : effects) {
        const auto p = effect_apply(e.effect, s);
        total += p;
        const auto it = dist.find(e.outcome);
        agree = agree && it != dist.end() && it->second == p;
      }
      rec.expect(agree, [&] { return "effects and evaluate_strategy disagree on " + s.layout().describe(); });
      rec.expect(total == 1, [&] { return "effects sum to " + to_string(total); });
    }
  }

  void check_equivalence(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{1, 2, 2, 2, 3};
    for (std::size_t c = 0; c < cfg_.equivalence; ++c) {
      const auto layout = random_layout(rng, shape);
      const auto r = random_effect(rng, layout);
      const auto s = null_shift(rng, r);
      const auto t = null_shift(rng, s);
      const auto u = rng.coin() ? null_shift(rng, t) : random_effect(rng, layout);
      rec.expect(effects_equal(r, r), [&] { return std::string("not reflexive"); });
      rec.expect(effects_equal(r, s) && effects_equal(s, r), [&] { return std::string("null shift changed the effect"); });
      rec.expect(effects_equal(r, t), [&] { return std::string("not transitive along null shifts"); });
      const bool ru = effects_equal(r, u), ur = effects_equal(u, r), tu = effects_equal(t, u);
      rec.expect(ru == ur, [&] { return std::string("not symmetric"); });
      rec.expect(ru == tu, [&] { return std::string("equivalence classes disagree"); });
    }
  }

  // For every tree on 2-box layouts with k <= 2, l = 2 and every labelling of
  // its four leaves: fine-grained iff injective, where fine-grained is checked
  // independently by searching for an equal single-entry effect.
  void check_fine_grained(Rng&, detail::Recorder& rec) const {
    for (std::size_t k0 = 1; k0 <= 2; ++k0)
      for (std::size_t k1 = 1; k1 <= 2; ++k1) {
        const SystemLayout layout{{k0, 2}, {k1, 2}};
        std::vector<EffectVector> singles;
        for (std::size_t f = 0; f < layout.table_size(); ++f) {
          std::vector<Rational> r(layout.table_size());
          r[f] = 1;
          singles.emplace_back(layout, std::move(r));
        }
        enumerate_strategies(layout, [&](const BasicStrategy& tree) {
          for (std::size_t code = 0; code < 256; ++code) {
            const auto s = relabel(tree, [&](const std::vector<std::size_t>& a) {
              return OutcomeLabel{(code >> (2 * (a[0] * 2 + a[1]))) & 3};
            });
            const auto effects = effects_of(strategy_effects(s));
            bool oracle = true;
            for (const auto& e : effects) {
              bool single = false;
              for (const auto& one : singles)
                if (effects_equal(e, one)) {
                  single = true;
                  break;
                }
              oracle = oracle && single;
            }
            const bool fine = is_maximally_informative(effects);
            rec.expect(fine == s.injective() && oracle == fine, [&] {
              return "labelling " + std::to_string(code) + " on " + layout.describe() +
                     ": fine-grained=" + std::to_string(fine) + " injective=" + std::to_string(s.injective()) +
                     " single-entry=" + std::to_string(oracle);
            });
          }
        });
      }
  }

  void check_separating_state(Rng&, detail::Recorder& rec) const {
    std::vector<SystemLayout> layouts;
    for (std::size_t k0 = 1; k0 <= 3; ++k0)
      for (std::size_t l0 = 2; l0 <= 3; ++l0) {
        layouts.push_back(SystemLayout{{k0, l0}});
        for (std::size_t k1 = 1; k1 <= 3; ++k1)
          for (std::size_t l1 = 2; l1 <= 3; ++l1) layouts.push_back(SystemLayout{{k0, l0}, {k1, l1}});
      }
    for (const auto& layout : layouts) {
      std::vector<OutputInput> cells;
      for (std::size_t x = 0; x < layout.input_tuples(); ++x)
        for (std::size_t a = 0; a < layout.output_tuples(); ++a)
          cells.push_back({layout.decode_outputs(a), layout.decode_inputs(x)});
      for (const auto& first : cells)
        for (const auto& second : cells) {
          if (first.outputs == second.outputs && first.inputs == second.inputs) continue;
          const auto s = separating_state(layout, first, second);
          const bool ok = validate_state(layout, s.table()).ok() && sgn(s.prob(first.outputs, first.inputs)) == 0 &&
                          sgn(s.prob(second.outputs, second.inputs)) > 0;
          rec.expect(ok, [&] { return "postcondition fails on " + layout.describe(); });
        }
    }
  }

  void check_locality_mixtures(Rng& rng, detail::Recorder& rec) const {
    const LayoutShape shape{2, 3, 2, 1, 3};
    for (std::size_t c = 0; c < cfg_.locality; ++c) {
      const auto layout = random_layout(rng, shape);
      auto order = detail::all_boxes(layout.size());
      std::shuffle(order.begin(), order.end(), rng.engine());
      const std::size_t split = rng.between(1, layout.size() - 1);
      const Bipartition parties{{order.begin(), order.begin() + static_cast<std::ptrdiff_t>(split)},
                                {order.begin() + static_cast<std::ptrdiff_t>(split), order.end()}};
      std::vector<JointState> parts;
      std::vector<Rational> weights;
      Rational total = 0;
      for (std::size_t j = rng.between(1, 4); j-- > 0;) {
        parts.push_back(deterministic_state(layout, random_assignment(rng, layout)));
        weights.emplace_back(static_cast<long>(rng.between(1, 8)));
        total += weights.back();
      }
      for (auto& w : weights) w /= total;
      const auto s = mix(std::span<const JointState>(parts), std::span<const Rational>(weights));
      const auto result = is_local(s, parties);
      rec.expect(result.local(), [&] { return "mixture of deterministic states judged nonlocal on " + layout.describe(); });
      if (result.local())
        rec.expect(verify_decomposition(s, decomposition_terms(result, layout, parties), parties),
                   [&] { return "returned weights do not reproduce the state on " + layout.describe(); });

      // Soundness on general random states, local or not.
      const auto g = random_state(rng, layout);
      const auto rg = is_local(g, parties);
      if (rg.local())
        rec.expect(verify_decomposition(g, decomposition_terms(rg, layout, parties), parties),
                   [&] { return "unsound local verdict on " + layout.describe(); });
    }
  }

  // White noise destroys nonlocality once the CHSH winning probability drops
  // to the deterministic bound 3/4, i.e. at visibility 1/2.
  void check_pr_threshold(Rng&, detail::Recorder& rec) const {
    const Rational eps(1, 1 << 20), bound(3, 4), half(1, 2);
    const auto t = pr_noise_threshold(eps);
    rec.expect(t.win_lo <= bound && bound <= t.win_hi && t.win_hi - t.win_lo <= eps, [&] {
      return "CHSH winning probability bracket [" + to_string(t.win_lo) + ", " + to_string(t.win_hi) + "]";
    });
    rec.expect(t.lo <= half && half <= t.hi && t.hi - t.lo <= eps,
               [&] { return "visibility bracket [" + to_string(t.lo) + ", " + to_string(t.hi) + "]"; });
    rec.expect(!is_local(pr_box(), Bipartition::prefix(1, 2)).local(), [] { return std::string("pr_box judged local"); });
  }

  void check_cone_decomposition(Rng& rng, detail::Recorder& rec) const {
    auto draw = [&](long scale) { return make_rational(static_cast<long>(rng.below(8 * scale + 1)), scale); };
    for (std::size_t c = 0; c < cfg_.cone; ++c) {
      const long scale = 1L << rng.below(11);
      const Rational x = draw(scale), y = draw(scale);
      const Rational z = (x + y) * make_rational(static_cast<long>(rng.below(1025)), 1024);
      const auto d = cone_decompose(x, y, z);
      const auto back = d.reconstruct();
      bool nonneg = true;
      for (const auto& l : d.lambda) nonneg = nonneg && sgn(l) >= 0;
      rec.expect(nonneg && back[0] == x && back[1] == y && back[2] == z,
                 [&] { return "(" + to_string(x) + ", " + to_string(y) + ", " + to_string(z) + ") not reproduced"; });
      // Same on doubles: dyadic inputs keep every step exact.
      const ConeVector v{x.get_d(), y.get_d(), z.get_d()};
      const auto dd = cone_decompose(v);
      const auto vb = dd.reconstruct();
      rec.expect(vb[0] == v.x && vb[1] == v.y && vb[2] == v.z &&
                     std::all_of(dd.lambda.begin(), dd.lambda.end(), [](double l) { return l >= 0; }),
                 [&] { return std::string("floating decomposition not exact"); });
      // Points above the z = x + y face are rejected.
      bool rejected = false;
      try {
        cone_decompose(x, y, Rational(x + y + Rational(1, scale)));
      } catch (const ConeError&) {
        rejected = true;
      }
      rec.expect(rejected, [&] { return std::string("point outside the cone accepted"); });
    }
  }

  // Synthesized states are valid, have at most two non-classical boxes, exact
  // entropy vectors inside the cone, and hit targets on the z = x + y face.
  void check_synthesis(Rng& rng, detail::Recorder& rec) const {
    for (std::size_t c = 0; c < cfg_.synthesis; ++c) {
      const double x = static_cast<double>(rng.below(13)) / 4, y = static_cast<double>(rng.below(9)) / 4;
      const bool on_face = rng.coin();
      const double z = on_face ? x + y : (x + y) * static_cast<double>(rng.below(8)) / 8;
      const std::size_t n = 16;
      const ConeVector target{x, y, z};
      const auto d = cone_decompose(target);
      if (d.lambda[2] > 2 || d.lambda[3] > 2) continue;  // damped weight limit at this N
      const auto s = synthesize_state(target, n);
      if (s.sigma) {
        rec.expect(validate_state(s.sigma->layout(), s.sigma->table()).ok() &&
                       s.sigma->layout().non_classical_count() <= 2,
                   [&] { return std::string("synthesized state invalid"); });
      }
      rec.expect(s.exact && cone_contains(s.achieved), [&] {
        return "achieved (" + detail::fmt(s.achieved.x) + ", " + detail::fmt(s.achieved.y) + ", " +
               detail::fmt(s.achieved.z) + ") not an exact cone member";
      });
      if (on_face)
        rec.expect(s.error <= 1e-6, [&] { return "face target missed by " + detail::fmt(s.error); });
    }
  }

  SuiteConfig cfg_;
};

inline SuiteReport run_property_suite(const SuiteConfig& config = {}) { return PropertySuite(config).run(); }

}  // namespace boxworld
