// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fpp/calculus.hpp"
#include "fpp/cli.hpp"
#include "fpp/constructions.hpp"
#include "fpp/estimators.hpp"
#include "fpp/fourier.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/tables.hpp"
#include "fpp/verify.hpp"
#include "support/oracles.hpp"

using namespace fpp;

namespace {

constexpr double kVarianceRel = 1e-10;
constexpr double kIbpRel = 1e-10;
constexpr double kTiltGap = 1e-12;
constexpr double kTransformAbs = 1e-11;
constexpr double kMcBand = 4.0;
constexpr double kScanBand = 3.0;
constexpr double kVarianceSeconds = 300;
constexpr double kInclusionSeconds = 600;
constexpr std::uint64_t kMcSamples = 100000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Instance {
  std::string name;
  LatticeSpec spec;
};

std::vector<Instance> instances(Rational a, Rational b) {
  return {{"parallel pair", LatticeSpec::parallel_pair(a, b)},
          {"series pair", LatticeSpec::series_pair(a, b)},
          {"box12", LatticeSpec::box({2, 2}, {0, 0}, {2, 2}, a, b)},
          {"torus3", LatticeSpec::torus(2, 3, a, b)}};
}

// The two enumerated instances the inclusion and bound criteria refer to.
std::vector<Instance> enumerated(Rational a, Rational b) {
  auto all = instances(a, b);
  return {all[2], all[3]};
}

std::vector<double> real_values(const LatticeSpec& spec) {
  const Lattice lat(spec);
  return to_real(passage_table(lat), lat.weights());
}

// Collects failure notes; the first few are printed after the verdict.
struct Verdict {
  int checks = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  bool pass() const { return failures.empty(); }
};

void report(int id, const Verdict& v, const std::string& summary) {
  std::printf("criterion %2d: %s  %s (%d checks, %zu failed)\n", id, v.pass() ? "PASS" : "FAIL", summary.c_str(),
              v.checks, v.failures.size());
  for (std::size_t k = 0; k < std::min<std::size_t>(v.failures.size(), 5); ++k) {
    std::printf("    %s\n", v.failures[k].c_str());
  }
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const std::array<std::pair<Rational, Rational>, 2> kWeights{{{{1, 1}, {2, 1}}, {{3, 1}, {5, 1}}}};
const std::array<double, 3> kPs{0.3, 0.5, 0.8};

// ---------------------------------------------------------------------------

bool criterion_1() {
  Verdict v;
  const auto t0 = Clock::now();
  double worst = 0;
  for (const auto& [a, b] : kWeights) {
    for (const auto& inst : instances(a, b)) {
      const auto f = real_values(inst.spec);
      for (double p : kPs) {
        const auto r = variance_check(f, p);
        const double direct = oracle::direct_variance(f, p);
        const double scale = std::max(std::abs(direct), 1e-300);
        const double rel = std::abs(direct - r.rhs) / scale;
        worst = std::max(worst, rel);
        const std::string tag = inst.name + " a=" + a.str() + " b=" + b.str() + " p=" + fmt(p);
        v.expect(rel <= kVarianceRel, tag + ": relative gap " + fmt(rel));
        v.expect(std::abs(r.lhs - direct) <= kVarianceRel * scale, tag + ": library var " + fmt(r.lhs) +
                                                                        " against direct " + fmt(direct));
      }
    }
  }
  const double secs = seconds_since(t0);
  v.expect(secs <= kVarianceSeconds, "runtime " + fmt(secs) + " s");
  report(1, v, "variance identity, worst relative gap " + fmt(worst) + ", " + fmt(secs) + " s");
  return v.pass();
}

bool criterion_2() {
  Verdict v;
  std::mt19937_64 rng(2024);
  double worst = 0;
  for (const auto& inst : instances({1, 1}, {2, 1})) {
    const auto f = real_values(inst.spec);
    const auto m = table_edges(f.size());
    const std::uint64_t full = (std::uint64_t{1} << m) - 1;
    double norm = 0;
    for (double p : kPs) {
      norm = 0;
      for (std::uint64_t w = 0; w < f.size(); ++w) norm += oracle::probability(w, m, p) * f[w] * f[w];
      norm = std::sqrt(norm);
      for (int k = 0; k < 50; ++k) {
        std::uint64_t s = 0;
        while (s == 0) s = rng() & full;
        const std::uint64_t t = rng() & s;
        const auto r = integration_by_parts_check(f, p, t, s);
        const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), norm});
        const double rel = std::abs(r.lhs - r.rhs) / scale;
        worst = std::max(worst, rel);
        const std::string tag = inst.name + " p=" + fmt(p) + " S=" + std::to_string(s) + " T=" + std::to_string(t);
        v.expect(rel <= kIbpRel, tag + ": gap " + fmt(rel));
        const double naive = oracle::naive_coefficient(f, p, s);
        v.expect(std::abs(naive - r.lhs) <= kIbpRel * scale, tag + ": coefficient " + fmt(r.lhs) + " naive " +
                                                                 fmt(naive));
      }
    }
  }
  report(2, v, "integration by parts, 50 pairs x 3 p per instance, worst gap " + fmt(worst));
  return v.pass();
}

bool criterion_3() {
  Verdict v;
  const auto t0 = Clock::now();
  for (const auto& [a, b] : kWeights) {
    for (const auto& inst : enumerated(a, b)) {
      const Lattice lat(inst.spec);
      const auto table = class_table(lat);
      const auto reports = inclusion_suite(table, lat.weights());
      for (const auto& r : reports) {
        v.expect(r.pass && r.lhs == 0, inst.name + " a=" + a.str() + " b=" + b.str() + " " + r.identity + ": " +
                                           fmt(r.lhs) + " violations");
      }
      if (a == Rational{1, 1} && b == Rational{2, 1}) {
        const bool has_equivalence = std::any_of(reports.begin(), reports.end(), [](const IdentityReport& r) {
          return r.identity.ends_with("A_j = hatA_j");
        });
        v.expect(has_equivalence, inst.name + ": influence/semi-essential equivalence not checked at a=1,b=2");
      }
    }
  }
  const double secs = seconds_since(t0);
  v.expect(secs <= kInclusionSeconds, "runtime " + fmt(secs) + " s");
  report(3, v, "inclusion suite on box12 and torus3, " + fmt(secs) + " s");
  return v.pass();
}

bool criterion_4() {
  Verdict v;
  std::string summary;
  for (const auto& inst : enumerated({1, 1}, {2, 1})) {
    const Lattice lat(inst.spec);
    const auto table = class_table(lat);
    const auto m = static_cast<EdgeId>(table.m);
    for (double p : kPs) {
      for (EdgeId j = 0; j < m; ++j) {
        // Independent tally straight from the class masks.
        double pa = 0, pe = 0;
        for (std::uint64_t w = 0; w < table.f.size(); ++w) {
          const double pw = oracle::probability(w, table.m, p);
          if (table.has(table.influential, w, j)) pa += pw;
          if (table.has(table.essential, w, j)) pe += pw;
        }
        const auto r = check_influence_bound(table, p, j);
        v.expect(pa <= pe / p + 1e-12 && r.ratio_ok,
                 inst.name + " p=" + fmt(p) + " edge " + std::to_string(j) + ": P(A)=" + fmt(pa) + " P(E)/p=" +
                     fmt(pe / p));
      }
      if (inst.spec.mode != LatticeMode::torus) continue;
      const auto t = check_torus_bound(lat, table, p);
      v.expect(t.chain_ok, "torus p=" + fmt(p) + ": chain P(A) <= P(E)/p <= " + fmt(t.reference) + " fails");
      v.expect(t.essential_bound_ok, "torus p=" + fmt(p) + ": essential bound fails");
      double lo = 1, hi = 0;
      for (double x : t.p_essential) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      v.expect(t.symmetric_all, "torus p=" + fmt(p) + ": P(E_j) ranges over [" + fmt(lo) + ", " + fmt(hi) +
                                    "]; equal only within each axis = " + (t.symmetric_by_axis ? "yes" : "no"));
      if (p == 0.5) summary = "torus reference b/(a p n^(d-1)) = " + fmt(t.reference);
    }
  }
  report(4, v, "influence bounds and torus chain, " + summary);
  return v.pass();
}

std::vector<Letter> letters_of(unsigned bits, std::size_t k) {
  std::vector<Letter> out(k);
  for (std::size_t q = 0; q < k; ++q) out[q] = ((bits >> q) & 1U) ? Letter::b : Letter::a;
  return out;
}

std::vector<EdgeId> pick_edges(std::mt19937_64& rng, std::size_t m, std::size_t k, EdgeId avoid) {
  std::vector<EdgeId> pool;
  for (EdgeId e = 0; e < static_cast<EdgeId>(m); ++e) {
    if (e != avoid) pool.push_back(e);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(k);
  return pool;
}

bool criterion_5() {
  Verdict v;
  std::mt19937_64 rng(5);
  double worst = 0;
  int tilts = 0, flips = 0;
  for (const auto& inst : enumerated({1, 1}, {2, 1})) {
    const Lattice lat(inst.spec);
    const auto table = passage_table(lat);
    const auto m = static_cast<std::size_t>(lat.edge_count());
    const double p = 0.4;
    for (int k = 0; k < 50; ++k) {
      EventSet event(table.size());
      const unsigned density = 1 + rng() % 7;
      for (auto& x : event) x = (rng() % 8) < density;
      const auto size = 1 + rng() % 2;
      const auto edges = pick_edges(rng, m, size, -1);
      for (unsigned beta = 0; beta < (1U << size); ++beta) {
        for (unsigned alpha = 0; alpha < (1U << size); ++alpha) {
          const auto al = letters_of(alpha, size);
          const auto r = tilting_check(m, p, event, EdgeAssignment{edges, letters_of(beta, size)}, al);
          worst = std::max(worst, r.abs_gap);
          ++tilts;
          v.expect(r.abs_gap <= kTiltGap, inst.name + " tilting event " + std::to_string(k) + ": gap " +
                                              fmt(r.abs_gap));
        }
      }
    }
    for (EdgeId j = 0; j < static_cast<EdgeId>(m); ++j) {
      for (std::size_t size : {1U, 2U}) {
        const auto edges = pick_edges(rng, m, size, j);
        for (unsigned gamma = 0; gamma < (1U << size); ++gamma) {
          for (unsigned delta = 0; delta < (1U << size); ++delta) {
            const auto de = letters_of(delta, size);
            const auto r = multiple_flips_check(table, p, j, EdgeAssignment{edges, letters_of(gamma, size)}, de);
            ++flips;
            v.expect(r.lhs <= r.rhs + kTiltGap, inst.name + " flips j=" + std::to_string(j) + ": " + fmt(r.lhs) +
                                                    " > " + fmt(r.rhs));
          }
        }
      }
    }
  }
  report(5, v, std::to_string(tilts) + " tilting checks (worst gap " + fmt(worst) + "), " + std::to_string(flips) +
                   " flip inequalities");
  return v.pass();
}

// ---------------------------------------------------------------------------

ConstructionParams params_for(std::int64_t a, std::int64_t b) {
  ConstructionParams p;
  p.a = {a, 1};
  p.b = {b, 1};
  p.samples = 2000;
  return p;
}

Units f_at(const Lattice& lat, const Environment& env) { return evaluate_passage(lat, env).units; }

Environment forced(Environment env, EdgeId i, Letter li, EdgeId j, Letter lj) {
  env.set(i, li);
  env.set(j, lj);
  return env;
}

// f on sigma^{aa}, sigma^{ab}, sigma^{ba}, sigma^{bb} at (i, j).
std::array<Units, 4> quad(const Lattice& lat, const Environment& env, EdgeId i, EdgeId j) {
  return {f_at(lat, forced(env, i, Letter::a, j, Letter::a)), f_at(lat, forced(env, i, Letter::a, j, Letter::b)),
          f_at(lat, forced(env, i, Letter::b, j, Letter::a)), f_at(lat, forced(env, i, Letter::b, j, Letter::b))};
}

Units second(const std::array<Units, 4>& q) { return q[3] - q[2] - q[1] + q[0]; }

std::string quad_str(const std::array<Units, 4>& q) {
  return std::to_string(q[0]) + "," + std::to_string(q[1]) + "," + std::to_string(q[2]) + "," + std::to_string(q[3]);
}

void check_manifest_claims(Verdict& v, const ConstructionManifest& man) {
  const auto checked = check_manifest(man);
  for (std::size_t k = 0; k < checked.results.size(); ++k) {
    v.expect(checked.results[k].pass, man.name + " claim '" + man.claims[k].label + "' observed " +
                                          checked.results[k].observed);
  }
}

bool criterion_6() {
  Verdict v;
  for (const auto& [a, b] : std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 2}, {3, 5}}) {
    const Units gap = b - a;  // weights are integers, so one unit is one
    const std::string tag = " (a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
    for (const auto& name : construction_names()) {
      if (name == "ab_general" && a == 1) continue;
      if (name == "constant") {
        for (Letter value : {Letter::a, Letter::b}) {
          auto p = params_for(a, b);
          p.value = value;
          check_manifest_claims(v, build_constant_env(p));
        }
        continue;
      }
      check_manifest_claims(v, build_construction(name, params_for(a, b)));
    }

    {  // parasite
      const auto man = build_parasite(params_for(a, b));
      const Lattice lat(man.spec);
      const Units n = man.spec.box_dims[0];
      const auto q = quad(lat, man.env, man.edge("i"), man.edge("j"));
      const std::array<Units, 4> want{(n + 20) * a, (n + 19) * a + b, (n + 19) * a + b, (n + 19) * a + b};
      v.expect(q == want, "parasite" + tag + " f-values " + quad_str(q));
      v.expect(second(q) == -gap, "parasite" + tag + " derivative " + std::to_string(second(q)));
      v.expect(n * gap > 17 * a + 3 * b, "parasite" + tag + " n below the straight-line threshold");
    }
    {  // nonparasite
      const auto man = build_nonparasite(params_for(a, b));
      const Lattice lat(man.spec);
      const Units n = man.spec.box_dims[0];
      const auto q = quad(lat, man.env, man.edge("i"), man.edge("j"));
      const std::array<Units, 4> want{(n + 4) * a, (n + 4) * a, (n + 4) * a, (n + 3) * a + b};
      v.expect(q == want, "nonparasite" + tag + " f-values " + quad_str(q));
      v.expect(second(q) == gap, "nonparasite" + tag + " derivative " + std::to_string(second(q)));
    }
    {  // entangled
      const auto man = build_entangled(params_for(a, b));
      const Lattice lat(man.spec);
      const EdgeId v1 = man.edge("v1"), v2 = man.edge("v2");
      const auto q = quad(lat, man.env, v1, v2);
      v.expect(second(q) == -gap, "entangled" + tag + " derivative " + std::to_string(second(q)));
      v.expect(!classify_edge(lat, man.env, v1).influential, "entangled" + tag + " v1 influential");
      v.expect(!classify_edge(lat, man.env, v2).influential, "entangled" + tag + " v2 influential");
    }
    {  // straight line with two marks
      auto p = params_for(a, b);
      p.marks = 2;
      const auto man = build_straight_line(p);
      const Lattice lat(man.spec);
      const Units len = p.length;
      const auto q = quad(lat, man.env, man.edge("v1"), man.edge("v2"));
      const std::array<Units, 4> want{len * a, (len - 1) * a + b, (len - 1) * a + b, (len - 2) * a + 2 * b};
      v.expect(q == want, "straight" + tag + " f-values " + quad_str(q));
      v.expect(second(q) == 0, "straight" + tag + " derivative " + std::to_string(second(q)));
    }
    {  // reflected pair
      const auto man = build_reflected_paths(params_for(a, b));
      const Lattice lat(man.spec);
      for (const char* role : {"i1", "i2"}) {
        const auto c = classify_edge(lat, man.env, man.edge(role));
        v.expect(c.influential && !c.essential, std::string("reflected") + tag + " " + role + " not in A\\E");
      }
    }
    {  // constant environments
      auto p = params_for(a, b);
      p.value = Letter::a;
      const auto ma = build_constant_env(p);
      const Lattice lat(ma.spec);
      const auto ca = classify_edge(lat, ma.env, ma.edge("j"));
      v.expect(ca.semi_essential && !ca.influential, "constant a" + tag + " edge not in hatE\\A");
      p.value = Letter::b;
      const auto mb = build_constant_env(p);
      const auto cb = classify_edge(lat, mb.env, mb.edge("j"));
      v.expect(cb.very_influential && !cb.essential, "constant b" + tag + " edge not in hatA\\E");
    }
    if (a == 3) {  // ab_general
      const auto man = build_ab_general(params_for(a, b));
      const Lattice lat(man.spec);
      const auto cj = classify_edge(lat, man.env, man.edge("j"));
      v.expect(cj.influential && !cj.semi_essential, "ab_general j not in A\\hatE");
      const auto cjp = classify_edge(lat, man.env, man.edge("j_prime"));
      v.expect(cjp.essential && !cjp.very_influential, "ab_general j' not in E\\hatA");
    }
  }
  report(6, v, "construction manifests at (1,2) and (3,5), values re-evaluated independently of the builders");
  return v.pass();
}

// Brute max/min of d_S f over |S| = k straight from the alternating sum.
std::pair<Units, Units> brute_extremes(const std::vector<Units>& f, int k) {
  const auto m = table_edges(f.size());
  Units hi = std::numeric_limits<Units>::min(), lo = std::numeric_limits<Units>::max();
  for (std::uint64_t s = 1; s < f.size(); ++s) {
    if (std::popcount(s) != k) continue;
    for (std::uint64_t w = 0; w < f.size(); ++w) {
      if (w & s) continue;
      const Units d = oracle::brute_derivative<Units>(f, w, s);
      hi = std::max(hi, d);
      lo = std::min(lo, d);
    }
  }
  (void)m;
  return {hi, lo};
}

bool criterion_7() {
  Verdict v;
  std::string summary;
  for (const auto& inst : enumerated({1, 1}, {2, 1})) {
    const Lattice lat(inst.spec);
    const auto table = passage_table(lat);
    const Units gap = lat.weights().gap();
    summary += inst.name + ":";
    for (int k = 2; k <= 4; ++k) {
      const auto r = extremal_search(table, k);
      const Units bound = k == 4 ? 2 * gap : gap;
      v.expect(r.max_value <= bound && -r.min_value <= bound,
               inst.name + " |S|=" + std::to_string(k) + ": range [" + std::to_string(r.min_value) + ", " +
                   std::to_string(r.max_value) + "]");
      if (k == 2) v.expect(r.max_value == gap, inst.name + " max over |S|=2 is " + std::to_string(r.max_value));
      if (inst.spec.mode != LatticeMode::torus) {
        const auto [hi, lo] = brute_extremes(table, k);
        v.expect(hi == r.max_value && lo == r.min_value, inst.name + " |S|=" + std::to_string(k) +
                                                             " search disagrees with brute force");
      }
      summary += " k=" + std::to_string(k) + " [" + std::to_string(r.min_value) + "," + std::to_string(r.max_value) +
                 "]";
    }
    summary += "; ";
  }
  report(7, v, "extremal derivatives, " + summary);
  return v.pass();
}

bool criterion_8() {
  Verdict v;
  for (const auto& inst : enumerated({1, 1}, {2, 1})) {
    const Lattice lat(inst.spec);
    const auto m = static_cast<std::size_t>(lat.edge_count());
    const auto paths = oracle::simple_paths(lat);
    const Units a = lat.weights().a_units(), b = lat.weights().b_units();
    const auto brute = oracle::brute_class_masks(paths, m, a, b);
    if (inst.spec.mode != LatticeMode::torus) {
      int bad = 0;
      for (std::uint64_t w = 0; w < brute.f.size(); ++w) {
        bad += passage_time(lat, Environment::from_mask(m, w)).units != brute.f[w];
      }
      v.expect(bad == 0, inst.name + ": passage_time differs from path enumeration on " + std::to_string(bad) +
                             " environments");
    }
    // classify_edge itself, then the class table, on every environment.
    int bad = 0;
    for (std::uint64_t w = 0; w < brute.f.size(); ++w) {
      const auto env = Environment::from_mask(m, w);
      for (EdgeId j = 0; j < static_cast<EdgeId>(m); ++j) {
        const auto c = classify_edge(lat, env, j);
        const auto bit = std::uint64_t{1} << j;
        bad += c.essential != bool(brute.essential[w] & bit) ||
               c.semi_essential != bool(brute.semi_essential[w] & bit) ||
               c.influential != bool(brute.influential[w] & bit) ||
               c.very_influential != bool(brute.very_influential[w] & bit);
      }
    }
    v.expect(bad == 0, inst.name + ": classify_edge differs on " + std::to_string(bad) + " pairs");
    const auto table = class_table(lat);
    bad = 0;
    for (std::uint64_t w = 0; w < brute.f.size(); ++w) {
      bad += table.f[w] != brute.f[w] || table.essential[w] != brute.essential[w] ||
             table.semi_essential[w] != brute.semi_essential[w] || table.influential[w] != brute.influential[w] ||
             table.very_influential[w] != brute.very_influential[w];
    }
    v.expect(bad == 0, inst.name + ": class table differs on " + std::to_string(bad) + " environments");
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-4, 4);
  double worst = 0;
  for (std::size_t m = 1; m <= 10; ++m) {
    std::vector<double> f(std::size_t{1} << m);
    for (auto& x : f) x = u(rng);
    for (double p : kPs) {
      const auto fast = biased_transform(f, p);
      const auto slow = oracle::naive_transform(f, p);
      for (std::size_t s = 0; s < f.size(); ++s) worst = std::max(worst, std::abs(fast.at(s) - slow[s]));
    }
  }
  {
    const auto f = real_values(LatticeSpec::box({3, 1}, {0, 0}, {3, 1}));
    for (double p : kPs) {
      const auto fast = biased_transform(f, p);
      const auto slow = oracle::naive_transform(f, p);
      for (std::size_t s = 0; s < f.size(); ++s) worst = std::max(worst, std::abs(fast.at(s) - slow[s]));
    }
  }
  v.expect(worst <= kTransformAbs, "transform gap " + fmt(worst));
  report(8, v, "oracle equivalence, transform worst gap " + fmt(worst));
  return v.pass();
}

bool criterion_9() {
  Verdict v;
  const Lattice lat(LatticeSpec::torus(2, 3));
  QuantityRequest base;
  base.edge = 0;
  base.set = {0, 2};
  double worst_z = 0;
  for (const auto& q : quantity_names()) {
    auto req = base;
    req.quantity = q;
    const auto exact = estimate_quantity(lat, 0.5, req, Mode::exact);
    const auto mc = estimate_quantity(lat, 0.5, req, Mode::monte_carlo, {kMcSamples, 11, 0});
    const double diff = std::abs(mc.estimate - exact.estimate);
    const bool ok = diff <= kMcBand * mc.std_error + 1e-12;
    if (mc.std_error > 0) worst_z = std::max(worst_z, diff / mc.std_error);
    v.expect(ok, q + ": exact " + fmt(exact.estimate) + " mc " + fmt(mc.estimate) + " se " + fmt(mc.std_error));
  }
  const std::vector<std::string> names{"P_Aj"};
  const auto rows = scan_rows(LatticeSpec::torus(2, 3), 3, 6, names, Mode::monte_carlo, {kMcSamples, 12, 0});
  std::string curve;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    curve += " " + fmt(rows[k].report.estimate);
    if (k == 0) continue;
    const auto& prev = rows[k - 1].report;
    const auto& cur = rows[k].report;
    const double band = kScanBand * std::hypot(prev.std_error, cur.std_error);
    v.expect(cur.estimate <= prev.estimate + band, "P_Aj rises from n=" + std::to_string(rows[k - 1].n) + " (" +
                                                       fmt(prev.estimate) + ") to n=" + std::to_string(rows[k].n) +
                                                       " (" + fmt(cur.estimate) + ")");
  }
  report(9, v, "Monte Carlo vs exact, worst |z| " + fmt(worst_z) + "; P_Aj for n=3..6:" + curve);
  return v.pass();
}

std::string run_cli_text(std::vector<std::string> args, int& code) {
  std::ostringstream out, err;
  code = run_cli(args, out, err);
  return out.str() + err.str();
}

bool criterion_10() {
  Verdict v;
  const std::vector<std::vector<std::string>> configs{
      {"estimate", "--quantity", "P_Aj,P_Ej,N2,var", "--samples", "20000", "--seed", "3"},
      {"estimate", "--scan-n", "3:5", "--quantity", "P_Aj", "--samples", "5000", "--seed", "4"},
      {"construct", "--name", "parasite", "--samples", "3000", "--seed", "5"},
      {"construct", "--name", "nonparasite", "--a", "3", "--b", "5", "--samples", "3000"},
      {"verify", "--suite", "tilting", "--n", "3", "--seed", "6"},
      {"fourier", "--n", "3", "--p", "0.3"},
  };
  for (const auto& cfg : configs) {
    std::string joined;
    for (const auto& s : cfg) joined += s + " ";
    std::string reference;
    for (const char* workers : {"1", "1", "4", "8", "4", "8"}) {
      auto args = cfg;
      args.push_back("--workers");
      args.push_back(workers);
      int code = 0;
      const auto text = run_cli_text(args, code);
      v.expect(code == 0, joined + "exit code " + std::to_string(code));
      if (reference.empty()) {
        reference = text;
      } else {
        v.expect(text == reference, joined + "differs at workers " + workers);
      }
    }
  }
  report(10, v, "byte-identical CLI output at workers 1, 4, 8 across " + std::to_string(configs.size()) + " configs");
  return v.pass();
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<bool()>> criteria{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
      {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}};
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.empty() && !wanted.contains(id)) continue;
    try {
      failed += fn() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("criterion %2d: FAIL  exception: %s\n", id, e.what());
      ++failed;
    }
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
