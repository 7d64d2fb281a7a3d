#include "fpp/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <random>

#include "fpp/calculus.hpp"
#include "fpp/constructions.hpp"
#include "fpp/estimators.hpp"

namespace fpp {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"variance", "ibp", "bayes", "inclusion", "tilting", "bounds", "all"};
  return names;
}

IdentityReport summarize(std::string identity, const std::vector<IdentityReport>& reports) {
  IdentityReport out;
  out.identity = std::move(identity);
  out.pass = true;
  double worst = -1;
  for (const auto& r : reports) {
    // Failing reports take precedence; among equals keep the largest
    // gap relative to its tolerance.
    const double score = (r.pass ? 0.0 : 1e300) + (r.tolerance > 0 ? r.abs_gap / r.tolerance : r.abs_gap);
    if (score > worst) {
      worst = score;
      out.lhs = r.lhs;
      out.rhs = r.rhs;
      out.abs_gap = r.abs_gap;
      out.tolerance = r.tolerance;
    }
    out.pass = out.pass && r.pass;
  }
  return out;
}

std::vector<IdentityReport> inclusion_suite(const ClassTable& t, const Weights& w) {
  enum : std::size_t {
    e_in_a,
    hat_a_in_hat_e,
    hat_a_in_a,
    e_in_hat_e,
    a_is_flipped_e,
    hat_a_is_flipped_hat_e,
    non_essential_flat,
    semi_essential_steep,
    influential_is_very,
    kCount
  };
  std::vector<std::uint64_t> bad(kCount, 0);
  const auto gap = w.gap();
  for (std::uint64_t x = 0; x < t.f.size(); ++x) {
    const auto ess = t.essential[x];
    const auto semi = t.semi_essential[x];
    const auto infl = t.influential[x];
    const auto very = t.very_influential[x];
    bad[e_in_a] += std::popcount(ess & ~infl);
    bad[hat_a_in_hat_e] += std::popcount(very & ~semi);
    bad[hat_a_in_a] += std::popcount(very & ~infl);
    bad[e_in_hat_e] += std::popcount(ess & ~semi);
    bad[influential_is_very] += std::popcount(infl ^ very);
    for (std::size_t j = 0; j < t.m; ++j) {
      const auto bit = std::uint64_t{1} << j;
      const auto xa = x & ~bit;
      const auto xb = x | bit;
      if (((infl >> j) & 1U) != ((t.essential[xa] >> j) & 1U)) ++bad[a_is_flipped_e];
      if (((very >> j) & 1U) != ((t.semi_essential[xb] >> j) & 1U)) ++bad[hat_a_is_flipped_hat_e];
      if (!((t.essential[xa] >> j) & 1U) && t.f[xb] != t.f[xa]) ++bad[non_essential_flat];
      if (((t.semi_essential[xb] >> j) & 1U) && t.f[xb] != t.f[xa] + gap) ++bad[semi_essential_steep];
    }
  }
  const std::vector<std::string> names{"E_j subset A_j",
                                       "hatA_j subset hatE_j",
                                       "hatA_j subset A_j",
                                       "E_j subset hatE_j",
                                       "A_j = preimage of E_j under sigma_j^a",
                                       "hatA_j = preimage of hatE_j under sigma_j^b",
                                       "not E_j(sigma_j^a w) implies d_j f = 0",
                                       "hatE_j(sigma_j^b w) implies d_j f = b - a",
                                       "A_j = hatA_j"};
  int ka = 0, kb = 0;
  const bool degenerate = !find_gap_combination(w, ka, kb);
  std::vector<IdentityReport> out;
  for (std::size_t k = 0; k < kCount; ++k) {
    if (k == influential_is_very && !degenerate) continue;
    out.push_back(make_report("violations: " + names[k], static_cast<double>(bad[k]), 0.0, 0.0));
  }
  return out;
}

namespace {

std::vector<Letter> random_letters(std::mt19937_64& rng, std::size_t k) {
  std::vector<Letter> out(k);
  for (auto& l : out) l = (rng() & 1U) ? Letter::b : Letter::a;
  return out;
}

std::vector<EdgeId> random_edges(std::mt19937_64& rng, std::size_t m, std::size_t k, EdgeId avoid = -1) {
  std::vector<EdgeId> pool;
  for (EdgeId e = 0; e < static_cast<EdgeId>(m); ++e) {
    if (e != avoid) pool.push_back(e);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(k, pool.size()));
  return pool;
}

struct Context {
  const Lattice& lat;
  const VerifyOptions& opts;
  double p;
  std::size_t m;
  std::vector<Units> table;
  std::vector<double> real;
  std::optional<ClassTable> classes;

  Context(const Lattice& l, const VerifyOptions& o)
      : lat(l), opts(o), p(l.spec().p), m(static_cast<std::size_t>(l.edge_count())) {}

  const std::vector<Units>& f() {
    if (table.empty()) table = classes ? classes->f : passage_table(lat, opts.workers);
    return table;
  }
  const std::vector<double>& f_real() {
    if (real.empty()) real = to_real(f(), lat.weights());
    return real;
  }
  const ClassTable& cls() {
    if (!classes) classes = class_table(lat, opts.workers);
    return *classes;
  }
};

void variance_suite(Context& c, std::vector<IdentityReport>& out) {
  auto r = variance_check(c.f_real(), c.p);
  out.push_back(r);
}

void ibp_suite(Context& c, std::vector<IdentityReport>& out) {
  std::mt19937_64 rng(c.opts.seed);
  const auto full = (std::uint64_t{1} << c.m) - 1;
  std::vector<IdentityReport> reports;
  for (int k = 0; k < c.opts.ibp_pairs; ++k) {
    // S has at most 4 edges so the pairs stay cheap on the larger instances.
    std::uint64_t s = 0;
    const auto picks = random_edges(rng, c.m, 1 + rng() % std::min<std::size_t>(4, c.m));
    for (auto e : picks) s |= std::uint64_t{1} << e;
    const std::uint64_t t = rng() & s & full;
    reports.push_back(integration_by_parts_check(c.f_real(), c.p, t, s));
  }
  out.push_back(summarize("integration_by_parts (" + std::to_string(c.opts.ibp_pairs) + " random T subset S)", reports));
}

void bayes_suite(Context& c, std::vector<IdentityReport>& out) {
  std::vector<IdentityReport> reports;
  for (EdgeId i = 0; i < static_cast<EdgeId>(c.m); ++i) reports.push_back(bayes_check(c.f_real(), c.p, i));
  out.push_back(summarize("bayes (every edge)", reports));
}

void tilting_suite(Context& c, std::vector<IdentityReport>& out) {
  std::mt19937_64 rng(c.opts.seed + 1);
  const std::uint64_t states = std::uint64_t{1} << c.m;
  std::vector<IdentityReport> tilt;
  for (int k = 0; k < c.opts.random_events; ++k) {
    EventSet event(states);
    const std::uint64_t density = 1 + rng() % 7;
    for (auto& x : event) x = (rng() % 8) < density;
    const auto v = random_edges(rng, c.m, 1 + rng() % 2);
    const EdgeAssignment beta{v, random_letters(rng, v.size())};
    const auto alpha = random_letters(rng, v.size());
    tilt.push_back(tilting_check(c.m, c.p, event, beta, alpha));
  }
  out.push_back(summarize("tilting (" + std::to_string(c.opts.random_events) + " random events)", tilt));

  std::vector<IdentityReport> flips;
  for (EdgeId j = 0; j < static_cast<EdgeId>(c.m); ++j) {
    for (std::size_t size = 1; size <= 2; ++size) {
      const auto v = random_edges(rng, c.m, size, j);
      if (v.size() < size) continue;
      for (std::uint64_t g = 0; g < (std::uint64_t{1} << size); ++g) {
        for (std::uint64_t d = 0; d < (std::uint64_t{1} << size); ++d) {
          std::vector<Letter> gamma(size), delta(size);
          for (std::size_t q = 0; q < size; ++q) {
            gamma[q] = ((g >> q) & 1U) ? Letter::b : Letter::a;
            delta[q] = ((d >> q) & 1U) ? Letter::b : Letter::a;
          }
          flips.push_back(multiple_flips_check(c.f(), c.p, j, EdgeAssignment{v, gamma}, delta));
        }
      }
    }
  }
  out.push_back(summarize("multiple_flips (every j, |v| <= 2, all gamma and delta)", flips));
}

void bounds_suite(Context& c, std::vector<IdentityReport>& out) {
  const auto& t = c.cls();
  std::vector<IdentityReport> reports;
  for (EdgeId j = 0; j < static_cast<EdgeId>(c.m); ++j) {
    const auto r = check_influence_bound(t, c.p, j);
    auto rep = make_report("", r.p_influential, r.bound, 1e-12);
    rep.pass = r.ratio_ok;
    reports.push_back(rep);
  }
  out.push_back(summarize("P(A_j) <= P(E_j)/p (every edge)", reports));
  if (c.lat.mode() != LatticeMode::torus) return;
  const auto tb = check_torus_bound(c.lat, t, c.p);
  const double worst_e = *std::max_element(tb.p_essential.begin(), tb.p_essential.end());
  auto chain = make_report("P(A_j) <= P(E_j)/p <= b/(a p n^(d-1)) (every edge)", worst_e / c.p, tb.reference / c.p,
                           1e-12);
  chain.pass = tb.chain_ok && tb.essential_bound_ok;
  out.push_back(chain);
}

}  // namespace

std::vector<IdentityReport> run_suite(const Lattice& lat, std::string_view suite, const VerifyOptions& opts) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown suite '" + std::string(suite) + "' (valid: " + valid + ")");
  }
  checked_state_count(lat);
  Context c(lat, opts);
  std::vector<IdentityReport> out;
  const bool all = suite == "all";
  if (all || suite == "inclusion" || suite == "bounds") c.cls();
  if (all || suite == "variance") variance_suite(c, out);
  if (all || suite == "ibp") ibp_suite(c, out);
  if (all || suite == "bayes") bayes_suite(c, out);
  if (all || suite == "inclusion") {
    for (auto& r : inclusion_suite(c.cls(), lat.weights())) out.push_back(std::move(r));
  }
  if (all || suite == "tilting") tilting_suite(c, out);
  if (all || suite == "bounds") bounds_suite(c, out);
  return out;
}

}  // namespace fpp
