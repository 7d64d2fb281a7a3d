#include "fpp/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "fpp/parallel.hpp"
#include "fpp/tables.hpp"

namespace fpp {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kEnumChunk = 4096;
constexpr std::uint64_t kSampleChunk = 256;

std::vector<double> weight_by_count(std::size_t m, double p) {
  std::vector<double> w(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    w[k] = std::pow(p, static_cast<double>(m - k)) * std::pow(1.0 - p, static_cast<double>(k));
  }
  return w;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0,1)");
}

double letter_probability(std::span<const Letter> letters, double p) {
  double out = 1.0;
  for (auto l : letters) out *= l == Letter::a ? p : 1.0 - p;
  return out;
}

Units forced_passage(PathEngine& engine, const Environment& env, EdgeId e, Letter value) {
  engine.load(sigma(env, e, value));
  return engine.passage().units;
}

Units derivative_with(PathEngine& engine, const Environment& env, std::span<const EdgeId> set) {
  const EnvFunction f = [&engine](const Environment& w) {
    engine.load(w);
    return engine.passage().units;
  };
  return derivative(f, env, set);
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::exact ? "exact" : "monte_carlo"; }

Mode parse_mode(std::string_view text) {
  if (text == "exact") return Mode::exact;
  if (text == "monte_carlo" || text == "mc") return Mode::monte_carlo;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected exact or monte_carlo)");
}

std::string EstimateReport::json() const {
  ojson j;
  j["quantity"] = quantity;
  j["mode"] = to_string(mode);
  j["estimate"] = estimate;
  j["stderr"] = std_error;
  j["samples"] = samples;
  j["seed"] = seed;
  j["spec_hash"] = hex64(spec_hash);
  return j.dump();
}

EstimateReport expectation(const Lattice& lat, double p, const EnvStatistic& stat, Mode mode,
                           const SamplingOptions& opts, std::string name, double scale) {
  check_p(p);
  EstimateReport r;
  r.quantity = std::move(name);
  r.mode = mode;
  r.spec_hash = spec_hash(lat.spec());
  const auto m = static_cast<std::size_t>(lat.edge_count());
  if (mode == Mode::exact) {
    const auto states = checked_state_count(lat);
    const auto w = weight_by_count(m, p);
    std::vector<double> partial((states + kEnumChunk - 1) / kEnumChunk, 0.0);
    for_each_chunk(states, kEnumChunk, opts.workers, [&](std::uint64_t c, std::uint64_t first, std::uint64_t last) {
      PathEngine engine(lat);
      double sum = 0;
      for (std::uint64_t x = first; x < last; ++x) {
        const auto env = Environment::from_mask(m, x);
        sum += w[static_cast<std::size_t>(std::popcount(x))] * static_cast<double>(stat(engine, env));
      }
      partial[c] = sum;
    });
    double total = 0;
    for (double s : partial) total += s;
    r.estimate = total / scale;
    r.samples = states;
    return r;
  }
  if (opts.samples == 0) throw ConfigError("Monte Carlo needs at least one sample");
  struct Acc {
    __int128 sum = 0;
    __int128 sum_sq = 0;
  };
  std::vector<Acc> partial((opts.samples + kSampleChunk - 1) / kSampleChunk);
  for_each_chunk(opts.samples, kSampleChunk, opts.workers,
                 [&](std::uint64_t c, std::uint64_t first, std::uint64_t last) {
                   PathEngine engine(lat);
                   Acc acc;
                   for (std::uint64_t i = first; i < last; ++i) {
                     const auto x = static_cast<__int128>(stat(engine, sample_environment(lat, p, opts.seed, i)));
                     acc.sum += x;
                     acc.sum_sq += x * x;
                   }
                   partial[c] = acc;
                 });
  Acc total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
  }
  const auto n = static_cast<__int128>(opts.samples);
  const double nd = static_cast<double>(opts.samples);
  const double spread = static_cast<double>(n * total.sum_sq - total.sum * total.sum) / (nd * nd);
  r.estimate = static_cast<double>(total.sum) / nd / scale;
  r.std_error = std::sqrt(std::max(0.0, spread) / nd) / scale;
  r.samples = opts.samples;
  r.seed = opts.seed;
  return r;
}

EstimateReport event_probability(const Lattice& lat, double p, const EnvEvent& event, Mode mode,
                                 const SamplingOptions& opts, std::string name) {
  const EnvStatistic stat = [&event](PathEngine& engine, const Environment& env) -> Units {
    return event(engine, env) ? 1 : 0;
  };
  return expectation(lat, p, stat, mode, opts, std::move(name), 1.0);
}

const std::vector<std::string>& quantity_names() {
  static const std::vector<std::string> names{"P_Aj",         "P_Ej",   "P_hatAj",  "P_hatEj", "P_dM_nonzero",
                                              "L1_dM",        "L2sq_dM", "N2",      "var"};
  return names;
}

int convoluted_pairs(PathEngine& engine, const Environment& env) {
  const auto m = static_cast<int>(env.size());
  engine.load(env);
  const Units f0 = engine.passage().units;
  std::vector<Units> single(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto w = env;
    w.set(i, env.is_b(i) ? Letter::a : Letter::b);
    engine.load(w);
    single[static_cast<std::size_t>(i)] = engine.passage().units;
  }
  int count = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      auto w = env;
      w.set(i, env.is_b(i) ? Letter::a : Letter::b);
      w.set(j, env.is_b(j) ? Letter::a : Letter::b);
      engine.load(w);
      const Units both = engine.passage().units;
      // value(flip_i, flip_j)
      const auto value = [&](bool fi, bool fj) {
        if (fi && fj) return both;
        if (fi) return single[static_cast<std::size_t>(i)];
        if (fj) return single[static_cast<std::size_t>(j)];
        return f0;
      };
      const bool bi = env.is_b(i);
      const bool bj = env.is_b(j);
      const Units d = value(!bi, !bj) - value(bi, !bj) - value(!bi, bj) + value(bi, bj);
      if (d != 0) ++count;
    }
  }
  return count;
}

int convoluted_pairs(std::span<const Units> f_table, std::uint64_t w) {
  const auto m = static_cast<int>(std::countr_zero(f_table.size()));
  int count = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const auto mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
      if (derivative_at<Units>(f_table, w, mask) != 0) ++count;
    }
  }
  return count;
}

namespace {

EstimateReport variance_report(const Lattice& lat, double p, Mode mode, const SamplingOptions& opts) {
  check_p(p);
  const auto& wts = lat.weights();
  EstimateReport r;
  r.quantity = "var";
  r.mode = mode;
  r.spec_hash = spec_hash(lat.spec());
  if (mode == Mode::exact) {
    const auto table = passage_table(lat, opts.workers);
    const auto values = to_real(table, wts);
    r.estimate = variance_check(values, p).lhs;
    r.samples = table.size();
    return r;
  }
  if (opts.samples < 2) throw ConfigError("variance estimation needs at least two samples");
  std::vector<Units> values(opts.samples);
  for_each_chunk(opts.samples, kSampleChunk, opts.workers,
                 [&](std::uint64_t, std::uint64_t first, std::uint64_t last) {
                   PathEngine engine(lat);
                   for (std::uint64_t i = first; i < last; ++i) {
                     engine.load(sample_environment(lat, p, opts.seed, i));
                     values[i] = engine.passage().units;
                   }
                 });
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (auto v : values) mean += wts.to_double(v);
  mean /= n;
  double m2 = 0, m4 = 0;
  for (auto v : values) {
    const double d = wts.to_double(v) - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  r.estimate = m2;
  r.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  r.samples = opts.samples;
  r.seed = opts.seed;
  return r;
}

}  // namespace

EstimateReport estimate_quantity(const Lattice& lat, double p, const QuantityRequest& req, Mode mode,
                                 const SamplingOptions& opts) {
  const auto& names = quantity_names();
  if (std::find(names.begin(), names.end(), req.quantity) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown quantity '" + req.quantity + "' (valid: " + valid + ")");
  }
  const auto m = lat.edge_count();
  const bool edge_quantity = req.quantity.starts_with("P_") && req.quantity != "P_dM_nonzero";
  if (edge_quantity && (req.edge < 0 || req.edge >= m)) {
    throw ConfigError("edge " + std::to_string(req.edge) + " out of range for a lattice with " + std::to_string(m) +
                      " edges");
  }
  const bool set_quantity = req.quantity.ends_with("_dM");
  if (set_quantity) {
    if (req.set.empty() || req.set.size() > 6) throw ConfigError("derivative set M must have 1..6 edges");
    for (auto e : req.set) {
      if (e < 0 || e >= m) throw ConfigError("edge " + std::to_string(e) + " in M is out of range");
    }
    EdgeAssignment probe{req.set, std::vector<Letter>(req.set.size(), Letter::a)};
    try {
      probe.validate(static_cast<std::size_t>(m));
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("invalid derivative set: ") + e.what());
    }
  }
  const EdgeId j = req.edge;
  const Units gap = lat.weights().gap();
  const double scale = static_cast<double>(lat.weights().scale());
  const std::vector<EdgeId> set = req.set;
  const auto& q = req.quantity;

  if (q == "var") return variance_report(lat, p, mode, opts);
  if (q == "N2" && mode == Mode::exact) {
    const auto table = passage_table(lat, opts.workers);
    const EnvStatistic stat = [&table](PathEngine&, const Environment& env) -> Units {
      return convoluted_pairs(table, env.mask());
    };
    return expectation(lat, p, stat, mode, opts, q, 1.0);
  }
  if (q == "N2") {
    const EnvStatistic stat = [](PathEngine& engine, const Environment& env) -> Units {
      return convoluted_pairs(engine, env);
    };
    return expectation(lat, p, stat, mode, opts, q, 1.0);
  }

  EnvEvent event;
  if (q == "P_Aj") {
    event = [j](PathEngine& e, const Environment& env) {
      return forced_passage(e, env, j, Letter::b) != forced_passage(e, env, j, Letter::a);
    };
  } else if (q == "P_hatAj") {
    event = [j, gap](PathEngine& e, const Environment& env) {
      return forced_passage(e, env, j, Letter::b) - forced_passage(e, env, j, Letter::a) == gap;
    };
  } else if (q == "P_Ej") {
    event = [j](PathEngine& e, const Environment& env) {
      e.load(env);
      return e.classify(j).essential;
    };
  } else if (q == "P_hatEj") {
    event = [j](PathEngine& e, const Environment& env) {
      e.load(env);
      return e.classify(j).semi_essential;
    };
  } else if (q == "P_dM_nonzero") {
    event = [set](PathEngine& e, const Environment& env) { return derivative_with(e, env, set) != 0; };
  }
  if (event) return event_probability(lat, p, event, mode, opts, q);

  if (q == "L1_dM") {
    const EnvStatistic stat = [set](PathEngine& e, const Environment& env) -> Units {
      const Units d = derivative_with(e, env, set);
      return d < 0 ? -d : d;
    };
    return expectation(lat, p, stat, mode, opts, q, scale);
  }
  // L2sq_dM
  const EnvStatistic stat = [set](PathEngine& e, const Environment& env) -> Units {
    const Units d = derivative_with(e, env, set);
    return d * d;
  };
  return expectation(lat, p, stat, mode, opts, q, scale * scale);
}

std::string N2Report::json() const {
  ojson j;
  j["n2"] = ojson::parse(n2.json());
  j["variance"] = ojson::parse(variance.json());
  j["scaled_ratio"] = scaled_ratio;
  return j.dump();
}

N2Report expected_N2(const Lattice& lat, double p, Mode mode, const SamplingOptions& opts) {
  N2Report r;
  r.n2 = estimate_quantity(lat, p, {"N2"}, mode, opts);
  r.variance = estimate_quantity(lat, p, {"var"}, mode, opts);
  if (lat.mode() == LatticeMode::torus && r.n2.estimate > 0) {
    const double lg = std::log(static_cast<double>(lat.spec().n));
    r.scaled_ratio = r.variance.estimate * lg * lg / r.n2.estimate;
  }
  return r;
}

std::string NormsReport::json() const {
  ojson j;
  j["set"] = set;
  j["l1"] = ojson::parse(l1.json());
  j["l2_squared"] = ojson::parse(l2_squared.json());
  j["p_nonzero"] = ojson::parse(p_nonzero.json());
  j["l2"] = l2;
  j["cauchy_schwarz_ok"] = cauchy_schwarz_ok;
  return j.dump();
}

NormsReport derivative_norms(const Lattice& lat, double p, std::span<const EdgeId> set, Mode mode,
                             const SamplingOptions& opts) {
  if (set.empty() || set.size() > 6) throw ConfigError("derivative norms need 1 <= |M| <= 6");
  NormsReport r;
  r.set.assign(set.begin(), set.end());
  QuantityRequest req;
  req.set = r.set;
  req.quantity = "L1_dM";
  r.l1 = estimate_quantity(lat, p, req, mode, opts);
  req.quantity = "L2sq_dM";
  r.l2_squared = estimate_quantity(lat, p, req, mode, opts);
  req.quantity = "P_dM_nonzero";
  r.p_nonzero = estimate_quantity(lat, p, req, mode, opts);
  r.l2 = std::sqrt(r.l2_squared.estimate);
  r.cauchy_schwarz_ok = r.l1.estimate * r.l1.estimate <= r.l2_squared.estimate * r.p_nonzero.estimate + 1e-10;
  return r;
}

std::string InfluenceBoundReport::json() const {
  ojson j;
  j["edge"] = edge;
  j["P_Aj"] = p_influential;
  j["P_Ej"] = p_essential;
  j["bound"] = bound;
  j["ratio_ok"] = ratio_ok;
  return j.dump();
}

InfluenceBoundReport check_influence_bound(const ClassTable& t, double p, EdgeId edge) {
  check_p(p);
  if (edge < 0 || static_cast<std::size_t>(edge) >= t.m) throw ContractViolation("edge id out of range");
  const auto w = weight_by_count(t.m, p);
  InfluenceBoundReport r;
  r.edge = edge;
  for (std::uint64_t x = 0; x < t.f.size(); ++x) {
    const double pw = w[static_cast<std::size_t>(std::popcount(x))];
    if (t.has(t.influential, x, edge)) r.p_influential += pw;
    if (t.has(t.essential, x, edge)) r.p_essential += pw;
  }
  r.bound = r.p_essential / p;
  r.ratio_ok = r.p_influential <= r.bound + 1e-12;
  return r;
}

InfluenceBoundReport check_influence_bound(const Lattice& lat, double p, EdgeId edge) {
  SamplingOptions opts;
  QuantityRequest req;
  req.edge = edge;
  req.quantity = "P_Aj";
  InfluenceBoundReport r;
  r.edge = edge;
  r.p_influential = estimate_quantity(lat, p, req, Mode::exact, opts).estimate;
  req.quantity = "P_Ej";
  r.p_essential = estimate_quantity(lat, p, req, Mode::exact, opts).estimate;
  r.bound = r.p_essential / p;
  r.ratio_ok = r.p_influential <= r.bound + 1e-12;
  return r;
}

std::string TorusBoundReport::json() const {
  ojson j;
  j["mode"] = to_string(mode);
  j["P_Ej"] = p_essential;
  j["P_Aj"] = p_influential;
  j["se_P_Ej"] = se_essential;
  j["se_P_Aj"] = se_influential;
  j["reference"] = reference;
  j["max_spread"] = max_spread;
  j["symmetric_all"] = symmetric_all;
  j["symmetric_by_axis"] = symmetric_by_axis;
  j["essential_bound_ok"] = essential_bound_ok;
  j["chain_ok"] = chain_ok;
  j["pass"] = pass();
  return j.dump();
}

namespace {

void finish_torus_report(TorusBoundReport& r, const Lattice& lat, double p) {
  const auto& spec = lat.spec();
  const auto m = r.p_essential.size();
  r.reference = spec.b.to_double() / spec.a.to_double() / std::pow(static_cast<double>(spec.n), spec.d - 1);
  const bool exact = r.mode == Mode::exact;
  const auto band = [&](std::size_t i, std::size_t k) {
    return exact ? 1e-12 : 3.0 * std::hypot(r.se_essential[i], r.se_essential[k]);
  };
  r.symmetric_all = true;
  r.symmetric_by_axis = true;
  r.max_spread = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      const double gap = std::abs(r.p_essential[i] - r.p_essential[k]);
      r.max_spread = std::max(r.max_spread, gap);
      const bool agree = gap <= band(i, k);
      if (!agree) {
        r.symmetric_all = false;
        if (lat.edge(static_cast<EdgeId>(i)).axis == lat.edge(static_cast<EdgeId>(k)).axis) {
          r.symmetric_by_axis = false;
        }
      }
    }
  }
  r.essential_bound_ok = true;
  r.chain_ok = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double slack_e = exact ? 1e-12 : 3.0 * r.se_essential[i];
    const double slack_a = exact ? 1e-12 : 3.0 * std::hypot(r.se_influential[i], r.se_essential[i] / p);
    if (r.p_essential[i] > r.reference + slack_e) r.essential_bound_ok = false;
    if (r.p_influential[i] > r.p_essential[i] / p + slack_a) r.chain_ok = false;
    if (r.p_essential[i] / p > r.reference / p + slack_e / p) r.chain_ok = false;
  }
}

}  // namespace

TorusBoundReport check_torus_bound(const Lattice& lat, const ClassTable& t, double p) {
  if (lat.mode() != LatticeMode::torus) throw ContractViolation("the torus bound applies to torus lattices only");
  check_p(p);
  TorusBoundReport r;
  r.mode = Mode::exact;
  const auto w = weight_by_count(t.m, p);
  r.p_essential.assign(t.m, 0.0);
  r.p_influential.assign(t.m, 0.0);
  r.se_essential.assign(t.m, 0.0);
  r.se_influential.assign(t.m, 0.0);
  for (std::uint64_t x = 0; x < t.f.size(); ++x) {
    const double pw = w[static_cast<std::size_t>(std::popcount(x))];
    for (std::size_t j = 0; j < t.m; ++j) {
      if ((t.essential[x] >> j) & 1U) r.p_essential[j] += pw;
      if ((t.influential[x] >> j) & 1U) r.p_influential[j] += pw;
    }
  }
  finish_torus_report(r, lat, p);
  return r;
}

TorusBoundReport check_torus_bound(const Lattice& lat, double p, Mode mode, const SamplingOptions& opts) {
  if (lat.mode() != LatticeMode::torus) throw ContractViolation("the torus bound applies to torus lattices only");
  if (mode == Mode::exact) return check_torus_bound(lat, class_table(lat, opts.workers), p);
  check_p(p);
  if (opts.samples == 0) throw ConfigError("Monte Carlo needs at least one sample");
  const auto m = static_cast<std::size_t>(lat.edge_count());
  struct Counts {
    std::vector<std::uint64_t> ess, infl;
  };
  std::vector<Counts> partial((opts.samples + kSampleChunk - 1) / kSampleChunk);
  for_each_chunk(opts.samples, kSampleChunk, opts.workers,
                 [&](std::uint64_t c, std::uint64_t first, std::uint64_t last) {
                   PathEngine engine(lat);
                   Counts acc{std::vector<std::uint64_t>(m, 0), std::vector<std::uint64_t>(m, 0)};
                   for (std::uint64_t i = first; i < last; ++i) {
                     engine.load(sample_environment(lat, p, opts.seed, i));
                     for (EdgeId j = 0; j < static_cast<EdgeId>(m); ++j) {
                       const auto cls = engine.classify(j);
                       acc.ess[static_cast<std::size_t>(j)] += cls.essential;
                       acc.infl[static_cast<std::size_t>(j)] += cls.influential;
                     }
                   }
                   partial[c] = std::move(acc);
                 });
  std::vector<std::uint64_t> ess(m, 0), infl(m, 0);
  for (const auto& c : partial) {
    for (std::size_t j = 0; j < m; ++j) {
      ess[j] += c.ess[j];
      infl[j] += c.infl[j];
    }
  }
  TorusBoundReport r;
  r.mode = Mode::monte_carlo;
  const double n = static_cast<double>(opts.samples);
  for (std::size_t j = 0; j < m; ++j) {
    const double pe = static_cast<double>(ess[j]) / n;
    const double pa = static_cast<double>(infl[j]) / n;
    r.p_essential.push_back(pe);
    r.p_influential.push_back(pa);
    r.se_essential.push_back(std::sqrt(pe * (1 - pe) / n));
    r.se_influential.push_back(std::sqrt(pa * (1 - pa) / n));
  }
  finish_torus_report(r, lat, p);
  return r;
}

double set_probability(const EventSet& set, std::size_t m, double p) {
  if (set.size() != (std::uint64_t{1} << m)) throw ContractViolation("event table size mismatch");
  const auto w = weight_by_count(m, p);
  double total = 0;
  for (std::uint64_t x = 0; x < set.size(); ++x) {
    if (set[x]) total += w[static_cast<std::size_t>(std::popcount(x))];
  }
  return total;
}

IdentityReport tilting_check(std::size_t m, double p, const EventSet& event, const EdgeAssignment& v_beta,
                             std::span<const Letter> alpha) {
  check_p(p);
  v_beta.validate(m);
  if (alpha.size() != v_beta.edges.size()) throw ContractViolation("target letters differ in length from v");
  if (event.size() != (std::uint64_t{1} << m)) throw ContractViolation("event table size mismatch");
  const EdgeAssignment v_alpha{v_beta.edges, {alpha.begin(), alpha.end()}};
  const auto vmask = v_beta.edge_mask();
  const auto beta_bits = v_beta.value_mask();
  const auto alpha_bits = v_alpha.value_mask();
  EventSet restricted(event.size(), 0);
  EventSet image(event.size(), 0);
  for (std::uint64_t x = 0; x < event.size(); ++x) {
    if (!event[x] || (x & vmask) != beta_bits) continue;
    restricted[x] = 1;
    image[(x & ~vmask) | alpha_bits] = 1;
  }
  const double lhs = set_probability(restricted, m, p);
  const double rhs =
      letter_probability(v_beta.values, p) / letter_probability(alpha, p) * set_probability(image, m, p);
  return make_report("tilting", lhs, rhs, 1e-12);
}

IdentityReport multiple_flips_check(std::span<const Units> f_table, double p, EdgeId j, const EdgeAssignment& v_gamma,
                                    std::span<const Letter> delta) {
  check_p(p);
  const auto m = table_edges(f_table.size());
  v_gamma.validate(m);
  if (std::find(v_gamma.edges.begin(), v_gamma.edges.end(), j) != v_gamma.edges.end()) {
    throw ContractViolation("edge j must not belong to v");
  }
  if (j < 0 || static_cast<std::size_t>(j) >= m) throw ContractViolation("edge id out of range");
  if (delta.size() != v_gamma.edges.size()) throw ContractViolation("delta differs in length from v");
  const EdgeAssignment v_delta{v_gamma.edges, {delta.begin(), delta.end()}};
  const auto vmask = v_gamma.edge_mask();
  const auto gamma_bits = v_gamma.value_mask();
  const auto delta_bits = v_delta.value_mask();
  const auto jbit = std::uint64_t{1} << j;
  const auto w = weight_by_count(m, p);
  const auto influential = [&](std::uint64_t x) { return f_table[x | jbit] != f_table[x & ~jbit]; };
  double lhs = 0;
  double tail = 0;
  for (std::uint64_t x = 0; x < f_table.size(); ++x) {
    const double pw = w[static_cast<std::size_t>(std::popcount(x))];
    if ((x & vmask) == delta_bits && influential((x & ~vmask) | gamma_bits)) lhs += pw;
    if ((x & vmask) == gamma_bits && influential(x)) tail += pw;
  }
  const double rhs = letter_probability(delta, p) / letter_probability(v_gamma.values, p) * tail;
  auto r = make_report("multiple_flips", lhs, rhs, 1e-12);
  r.pass = lhs <= rhs + 1e-12;
  return r;
}

double reference_value(const LatticeSpec& spec, int n, std::string_view quantity) {
  if (n < 2) return 0;
  if (quantity.starts_with("P_")) {
    return spec.b.to_double() / (spec.a.to_double() * spec.p * std::pow(static_cast<double>(n), spec.d - 1));
  }
  const double lg = std::log(static_cast<double>(n));
  return 1.0 / (lg * lg);
}

std::vector<ScanRow> scan_rows(const LatticeSpec& base, int n_lo, int n_hi, std::span<const std::string> quantities,
                               Mode mode, const SamplingOptions& opts, const QuantityRequest& defaults) {
  if (n_lo > n_hi) throw ConfigError("scan range lo:hi must satisfy lo <= hi");
  std::vector<ScanRow> rows;
  if (quantities.empty()) return rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    LatticeSpec spec = base;
    if (base.mode == LatticeMode::torus) {
      spec.n = n;
    } else if (base.mode == LatticeMode::box) {
      spec = LatticeSpec::centred_box(n, base.d, base.a, base.b, base.p);
    } else {
      throw ConfigError("scan_n needs a torus or box template");
    }
    const Lattice lat(spec);
    for (const auto& q : quantities) {
      QuantityRequest req = defaults;
      req.quantity = q;
      ScanRow row;
      row.n = n;
      row.report = estimate_quantity(lat, spec.p, req, mode, opts);
      row.reference = reference_value(spec, n, q);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string scan_csv(std::span<const ScanRow> rows) {
  std::string out = "n,quantity,estimate,stderr,mode,samples,reference_value\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + r.report.quantity + "," + num(r.report.estimate) + "," +
           num(r.report.std_error) + "," + to_string(r.report.mode) + "," + std::to_string(r.report.samples) + "," +
           num(r.reference) + "\n";
  }
  return out;
}

std::string scan_n(const LatticeSpec& base, int n_lo, int n_hi, std::span<const std::string> quantities, Mode mode,
                   const SamplingOptions& opts, const QuantityRequest& defaults) {
  return scan_csv(scan_rows(base, n_lo, n_hi, quantities, mode, opts, defaults));
}

EasyBoundFit easy_bound_fit(std::span<const Units> f_table, const Weights& wts, double p, int n, int d,
                            std::span<const std::uint64_t> family) {
  check_p(p);
  const auto m = table_edges(f_table.size());
  if (family.empty()) throw ConfigError("easy bound fit needs a non-empty family");
  const int k = std::popcount(family.front());
  EasyBoundFit fit;
  fit.min_expectation = std::numeric_limits<double>::infinity();
  for (auto s : family) {
    if (std::popcount(s) != k || s == 0 || s >= f_table.size()) {
      throw ConfigError("family sets must be non-empty, in range and of equal size");
    }
    const auto w = weight_by_count(m - static_cast<std::size_t>(k), p);
    double e = 0;
    for (std::uint64_t x = 0; x < f_table.size(); ++x) {
      if (x & s) continue;
      e += w[static_cast<std::size_t>(std::popcount(x))] * wts.to_double(derivative_at<Units>(f_table, x, s));
    }
    if (e < fit.min_expectation) {
      fit.min_expectation = e;
      fit.argmin = s;
    }
  }
  fit.exponent = (static_cast<double>(k) * d - 1.0) / 2.0;
  fit.fitted_constant = fit.min_expectation * std::pow(static_cast<double>(n), fit.exponent);
  return fit;
}

}  // namespace fpp
