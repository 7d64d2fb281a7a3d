#include "fpp/constructions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <limits>

#include <json.hpp>

#include "fpp/calculus.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/parallel.hpp"
#include "fpp/tables.hpp"

namespace fpp {

using ojson = nlohmann::ordered_json;

std::string to_string(ClaimKind kind) {
  switch (kind) {
    case ClaimKind::passage_value:
      return "passage_value";
    case ClaimKind::path_weight:
      return "path_weight";
    case ClaimKind::derivative:
      return "derivative";
    case ClaimKind::edge_flag:
      return "edge_flag";
    case ClaimKind::edge_letter:
      return "edge_letter";
    case ClaimKind::geodesic_count:
      return "geodesic_count";
    case ClaimKind::avoid_equals_f:
      return "avoid_equals_f";
    case ClaimKind::sign_spot_check:
      return "sign_spot_check";
  }
  return "?";
}

EdgeId ConstructionManifest::edge(std::string_view role) const {
  for (const auto& [name, id] : designated) {
    if (name == role) return id;
  }
  throw ContractViolation("manifest has no designated edge '" + std::string(role) + "'");
}

namespace {

// ---------------------------------------------------------------------------
// Claim helpers

Claim value_claim(std::string label, const Environment& env, Units expected) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::passage_value;
  c.env = env;
  c.expected = expected;
  return c;
}

Claim path_claim(std::string label, const Environment& env, std::vector<EdgeId> path, Units expected) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::path_weight;
  c.env = env;
  c.edges = std::move(path);
  c.expected = expected;
  return c;
}

Claim derivative_claim(std::string label, const Environment& env, std::vector<EdgeId> set, Units expected) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::derivative;
  c.env = env;
  c.edges = std::move(set);
  c.expected = expected;
  return c;
}

Claim flag_claim(std::string label, const Environment& env, EdgeId e, std::string flag, bool value) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::edge_flag;
  c.env = env;
  c.edges = {e};
  c.flag = std::move(flag);
  c.flag_value = value;
  return c;
}

Claim letter_claim(std::string label, const Environment& env, EdgeId e, Letter letter) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::edge_letter;
  c.env = env;
  c.edges = {e};
  c.letter = letter;
  return c;
}

Claim count_claim(std::string label, const Environment& env, std::int64_t count) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::geodesic_count;
  c.env = env;
  c.count = count;
  return c;
}

Claim avoid_claim(std::string label, const Environment& env, EdgeId e) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::avoid_equals_f;
  c.env = env;
  c.edges = {e};
  return c;
}

Claim sign_claim(std::string label, std::vector<EdgeId> set, int sign, const ConstructionParams& params,
                 std::size_t edge_count) {
  Claim c;
  c.label = std::move(label);
  c.kind = ClaimKind::sign_spot_check;
  c.env = Environment(edge_count);
  c.edges = std::move(set);
  c.sign = sign;
  c.samples = params.samples;
  c.seed = params.seed;
  return c;
}

Environment forced(const Environment& env, std::vector<EdgeId> edges, std::vector<Letter> values) {
  return sigma_vec(env, EdgeAssignment{std::move(edges), std::move(values)});
}

constexpr std::array<std::array<Letter, 2>, 4> kPairs{{{Letter::a, Letter::a},
                                                      {Letter::a, Letter::b},
                                                      {Letter::b, Letter::a},
                                                      {Letter::b, Letter::b}}};

std::string pair_name(const std::array<Letter, 2>& l) {
  return std::string(l[0] == Letter::a ? "a" : "b") + (l[1] == Letter::a ? "a" : "b");
}

// Weight of a path with `na` a-edges and `nb` b-edges.
Units cost(const Weights& w, std::int64_t na, std::int64_t nb) { return na * w.a_units() + nb * w.b_units(); }

// Edge leaving box vertex (x, y) along `axis`.
EdgeId box_edge(const Lattice& lat, int x, int y, int axis) {
  const std::array<int, 2> c{x, y};
  const EdgeId e = lat.edge_at(lat.vertex_index(c), axis);
  if (e < 0) throw ContractViolation("construction stepped outside the box");
  return e;
}

// Axis-aligned segment between two lattice points, as edge ids.
void append_segment(const Lattice& lat, std::vector<EdgeId>& path, int x0, int y0, int x1, int y1) {
  if (x0 != x1 && y0 != y1) throw ContractViolation("segment is not axis aligned");
  if (x0 != x1) {
    for (int x = std::min(x0, x1); x < std::max(x0, x1); ++x) path.push_back(box_edge(lat, x, y0, 0));
  } else {
    for (int y = std::min(y0, y1); y < std::max(y0, y1); ++y) path.push_back(box_edge(lat, x0, y, 1));
  }
}

Environment paths_environment(std::size_t m, std::initializer_list<const std::vector<EdgeId>*> paths) {
  Environment env = Environment::constant(m, Letter::b);
  for (const auto* path : paths) {
    for (auto e : *path) env.set(e, Letter::a);
  }
  return env;
}

}  // namespace

// ---------------------------------------------------------------------------
// Checking

CheckedManifest check_manifest(const ConstructionManifest& manifest, int workers) {
  const Lattice lat(manifest.spec);
  const auto& w = lat.weights();
  PathEngine engine(lat);
  const auto f_of = [&engine](const Environment& env) {
    engine.load(env);
    return engine.passage().units;
  };
  const EnvFunction f = f_of;
  CheckedManifest out;
  out.manifest = manifest;
  out.all_pass = true;
  for (const auto& claim : manifest.claims) {
    ClaimResult r;
    switch (claim.kind) {
      case ClaimKind::passage_value: {
        const Units v = f_of(claim.env);
        r.pass = v == claim.expected;
        r.observed = w.format(v);
        break;
      }
      case ClaimKind::path_weight: {
        Units total = 0;
        for (auto e : claim.edges) total += claim.env.is_b(e) ? w.b_units() : w.a_units();
        r.pass = total == claim.expected;
        r.observed = w.format(total);
        break;
      }
      case ClaimKind::derivative: {
        const Units d = derivative(f, claim.env, claim.edges);
        r.pass = d == claim.expected;
        r.observed = w.format(d);
        break;
      }
      case ClaimKind::edge_flag: {
        engine.load(claim.env);
        const auto c = engine.classify(claim.edges.at(0));
        bool value = false;
        if (claim.flag == "essential") {
          value = c.essential;
        } else if (claim.flag == "semi_essential") {
          value = c.semi_essential;
        } else if (claim.flag == "influential") {
          value = c.influential;
        } else if (claim.flag == "very_influential") {
          value = c.very_influential;
        } else {
          throw ContractViolation("unknown edge flag '" + claim.flag + "'");
        }
        r.pass = value == claim.flag_value;
        r.observed = value ? "true" : "false";
        break;
      }
      case ClaimKind::edge_letter: {
        const auto l = claim.env.letter(claim.edges.at(0));
        r.pass = l == claim.letter;
        r.observed = l == Letter::a ? "a" : "b";
        break;
      }
      case ClaimKind::geodesic_count: {
        engine.load(claim.env);
        const auto count = geodesic_count(engine.tight());
        r.pass = count == claim.count;
        r.observed = count.str();
        break;
      }
      case ClaimKind::avoid_equals_f: {
        engine.load(claim.env);
        const auto fv = engine.passage();
        const auto c = engine.classify(claim.edges.at(0));
        r.pass = c.f_avoid == fv;
        r.observed = c.f_avoid.is_infinite() ? "inf" : w.format(c.f_avoid.units);
        break;
      }
      case ClaimKind::sign_spot_check: {
        constexpr std::uint64_t chunk = 256;
        std::vector<std::uint64_t> violations((claim.samples + chunk - 1) / chunk, 0);
        for_each_chunk(claim.samples, chunk, workers, [&](std::uint64_t c, std::uint64_t first, std::uint64_t last) {
          const EnvFunction local = passage_function(lat);
          std::uint64_t bad = 0;
          for (std::uint64_t i = first; i < last; ++i) {
            const auto env = sample_environment(lat, manifest.spec.p, claim.seed, i);
            if (claim.sign * derivative(local, env, claim.edges) < 0) ++bad;
          }
          violations[c] = bad;
        });
        std::uint64_t bad = 0;
        for (auto v : violations) bad += v;
        r.pass = bad == 0;
        r.observed = "violations=" + std::to_string(bad) + "/" + std::to_string(claim.samples);
        break;
      }
    }
    out.all_pass = out.all_pass && r.pass;
    out.results.push_back(std::move(r));
  }
  return out;
}

std::string CheckedManifest::json() const {
  const Weights w(manifest.spec.a, manifest.spec.b);
  ojson j;
  j["name"] = manifest.name;
  j["spec"] = ojson::parse(lattice_spec_json(manifest.spec));
  j["env_hex"] = manifest.env.to_hex();
  ojson designated = ojson::object();
  for (const auto& [role, id] : manifest.designated) designated[role] = id;
  j["designated"] = designated;
  auto claims = ojson::array();
  for (std::size_t i = 0; i < manifest.claims.size(); ++i) {
    const auto& c = manifest.claims[i];
    ojson item;
    item["label"] = c.label;
    item["kind"] = to_string(c.kind);
    item["env_hex"] = c.env.to_hex();
    item["edges"] = c.edges;
    switch (c.kind) {
      case ClaimKind::passage_value:
      case ClaimKind::path_weight:
      case ClaimKind::derivative:
        item["expected"] = w.format(c.expected);
        break;
      case ClaimKind::edge_flag:
        item["flag"] = c.flag;
        item["expected"] = c.flag_value ? "true" : "false";
        break;
      case ClaimKind::edge_letter:
        item["expected"] = c.letter == Letter::a ? "a" : "b";
        break;
      case ClaimKind::geodesic_count:
        item["expected"] = std::to_string(c.count);
        break;
      case ClaimKind::avoid_equals_f:
        item["expected"] = "f";
        break;
      case ClaimKind::sign_spot_check:
        item["expected"] = c.sign > 0 ? "nonnegative" : "nonpositive";
        item["samples"] = c.samples;
        item["seed"] = c.seed;
        break;
    }
    if (i < results.size()) {
      item["observed"] = results[i].observed;
      item["pass"] = results[i].pass;
    }
    claims.push_back(item);
  }
  j["claims"] = claims;
  j["pass"] = all_pass;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Parameters

ConstructionParams parse_construction_params(std::string_view text) {
  ConstructionParams p;
  if (text.empty()) return p;
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("construction params are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("construction params must be a JSON object");
  const auto rational = [&](const char* key, Rational& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_string()) {
      out = Rational::parse(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out = {v.get<std::int64_t>(), 1};
    } else {
      throw ConfigError(std::string("param '") + key + "' must be a rational string");
    }
  };
  try {
    rational("a", p.a);
    rational("b", p.b);
    p.p = j.value("p", p.p);
    p.n = j.value("n", p.n);
    p.d = j.value("d", p.d);
    p.offset = j.value("offset", p.offset);
    p.length = j.value("length", p.length);
    p.marks = j.value("marks", p.marks);
    p.section = j.value("section", p.section);
    p.samples = j.value("samples", p.samples);
    p.seed = j.value("seed", p.seed);
    if (j.contains("value")) {
      const auto v = j.at("value").get<std::string>();
      if (v != "a" && v != "b") throw ConfigError("param 'value' must be \"a\" or \"b\"");
      p.value = v == "a" ? Letter::a : Letter::b;
    }
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("malformed construction params: ") + e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Builders

ConstructionManifest build_constant_env(const ConstructionParams& params) {
  const int n = params.n == 0 ? 3 : params.n;
  ConstructionManifest man;
  man.name = "constant";
  man.spec = LatticeSpec::torus(params.d, n, params.a, params.b, params.p);
  const Lattice lat(man.spec);
  const auto m = static_cast<std::size_t>(lat.edge_count());
  const auto& w = lat.weights();
  man.env = Environment::constant(m, params.value);
  const EdgeId j = lat.edge_at(0, 0);
  man.designated = {{"j", j}};
  if (params.value == Letter::a) {
    man.claims.push_back(value_claim("f(all a) = n a", man.env, cost(w, n, 0)));
    man.claims.push_back(flag_claim("wrap edge semi-essential", man.env, j, "semi_essential", true));
    man.claims.push_back(flag_claim("wrap edge not influential", man.env, j, "influential", false));
  } else {
    man.claims.push_back(value_claim("f(all b) = n b", man.env, cost(w, 0, n)));
    man.claims.push_back(flag_claim("wrap edge very influential", man.env, j, "very_influential", true));
    man.claims.push_back(flag_claim("wrap edge not essential", man.env, j, "essential", false));
  }
  return man;
}

ConstructionManifest build_straight_line(const ConstructionParams& params) {
  const int len = params.length;
  const int marks = params.marks;
  if (marks != 1 && marks != 2) throw ConfigError("straight line takes 1 or 2 marked edges");
  if (len < marks + 1) {
    throw ConfigError("straight line of length " + std::to_string(len) + " needs more than " + std::to_string(marks) +
                      " edges");
  }
  ConstructionManifest man;
  man.name = "straight";
  man.spec = LatticeSpec::box({len, 1}, {0, 0}, {len, 0}, params.a, params.b, params.p);
  const Lattice lat(man.spec);
  const auto& w = lat.weights();
  const auto m = static_cast<std::size_t>(lat.edge_count());
  std::vector<EdgeId> line;
  append_segment(lat, line, 0, 0, len, 0);
  // A detour around t line edges uses t + 2 off-line b edges, so the line
  // stays strictly shorter whatever the marks carry.
  if (!(cost(w, 0, 3) > cost(w, 0, 1))) throw ConfigError("detour dominance fails");
  man.env = paths_environment(m, {&line});
  if (marks == 1) {
    const EdgeId i = line[static_cast<std::size_t>(len / 2)];
    man.env.set(i, Letter::b);
    man.designated = {{"i", i}};
    man.claims.push_back(letter_claim("marked edge carries b", man.env, i, Letter::b));
    man.claims.push_back(value_claim("f = (L-1)a + b", man.env, cost(w, len - 1, 1)));
    man.claims.push_back(flag_claim("marked edge essential", man.env, i, "essential", true));
    man.claims.push_back(flag_claim("marked edge influential", man.env, i, "influential", true));
    man.claims.push_back(count_claim("line is the only geodesic", man.env, 1));
  } else {
    const EdgeId v1 = line[static_cast<std::size_t>(len / 2 - 1)];
    const EdgeId v2 = line[static_cast<std::size_t>(len / 2)];
    man.env.set(v1, Letter::b);
    man.env.set(v2, Letter::b);
    man.designated = {{"v1", v1}, {"v2", v2}};
    const std::array<Units, 4> expected{cost(w, len, 0), cost(w, len - 1, 1), cost(w, len - 1, 1),
                                        cost(w, len - 2, 2)};
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
      const auto env = forced(man.env, {v1, v2}, {kPairs[k][0], kPairs[k][1]});
      man.claims.push_back(value_claim("f on sigma^" + pair_name(kPairs[k]), env, expected[k]));
    }
    man.claims.push_back(flag_claim("v1 essential", man.env, v1, "essential", true));
    man.claims.push_back(flag_claim("v2 essential", man.env, v2, "essential", true));
    man.claims.push_back(derivative_claim("second derivative vanishes", man.env, {v1, v2}, 0));
    man.claims.push_back(count_claim("line is the only geodesic", man.env, 1));
  }
  return man;
}

int minimal_section(const Weights& w, int floor) {
  int s = std::max(floor, 1);
  while (static_cast<Units>(s) * w.gap() <= w.a_units() + w.b_units()) ++s;
  return s;
}

namespace {

// Two paths from (0,1) to (s+2,1) in the box [0,s+2] x [0,2], running along
// the rows y = 2 and y = 0 and mirrored through the middle row.
struct MirroredPair {
  LatticeSpec spec;
  int section = 0;
  std::vector<EdgeId> upper;
  std::vector<EdgeId> lower;
  std::vector<EdgeId> upper_row;  // the s edges on y = 2
  std::vector<EdgeId> lower_row;
};

MirroredPair mirrored_pair(const ConstructionParams& params, int floor) {
  const Weights w(params.a, params.b);
  const int s = params.section == 0 ? minimal_section(w, floor) : params.section;
  if (s < floor) throw ConfigError("mirrored section must have at least " + std::to_string(floor) + " edges");
  // The middle row costs 2a + s b and must lose to a mirrored path with one b.
  if (!(static_cast<Units>(s) * w.gap() > w.a_units() + w.b_units())) {
    throw ConfigError("mirrored section s=" + std::to_string(s) + " violates s (b-a) > a + b");
  }
  MirroredPair g;
  g.section = s;
  g.spec = LatticeSpec::box({s + 2, 2}, {0, 1}, {s + 2, 1}, params.a, params.b, params.p);
  const Lattice lat(g.spec);
  for (int y : {2, 0}) {
    auto& path = y == 2 ? g.upper : g.lower;
    auto& row = y == 2 ? g.upper_row : g.lower_row;
    append_segment(lat, path, 0, 1, 1, 1);
    append_segment(lat, path, 1, 1, 1, y);
    append_segment(lat, row, 1, y, s + 1, y);
    path.insert(path.end(), row.begin(), row.end());
    append_segment(lat, path, s + 1, y, s + 1, 1);
    append_segment(lat, path, s + 1, 1, s + 2, 1);
  }
  return g;
}

}  // namespace

ConstructionManifest build_reflected_paths(const ConstructionParams& params) {
  const auto g = mirrored_pair(params, 1);
  ConstructionManifest man;
  man.name = "reflected";
  man.spec = g.spec;
  const Lattice lat(man.spec);
  const auto& w = lat.weights();
  const auto m = static_cast<std::size_t>(lat.edge_count());
  const auto mid = static_cast<std::size_t>(g.section / 2);
  const EdgeId i1 = g.upper_row[mid];
  const EdgeId i2 = g.lower_row[mid];
  man.env = paths_environment(m, {&g.upper, &g.lower});
  man.env.set(i1, Letter::b);
  man.env.set(i2, Letter::b);
  man.designated = {{"i1", i1}, {"i2", i2}};
  const auto len = static_cast<std::int64_t>(g.upper.size());
  man.claims.push_back(value_claim("f = (s+3)a + b", man.env, cost(w, len - 1, 1)));
  man.claims.push_back(count_claim("both mirrored paths are geodesics", man.env, 2));
  for (const auto& [name, e] : man.designated) {
    man.claims.push_back(flag_claim(name + " influential", man.env, e, "influential", true));
    man.claims.push_back(flag_claim(name + " not essential", man.env, e, "essential", false));
    man.claims.push_back(derivative_claim("first derivative at " + name + " = b - a", man.env, {e}, w.gap()));
    man.claims.push_back(avoid_claim("avoiding " + name + " keeps f", man.env, e));
  }
  return man;
}

ConstructionManifest build_entangled(const ConstructionParams& params) {
  const auto g = mirrored_pair(params, 2);
  ConstructionManifest man;
  man.name = "entangled";
  man.spec = g.spec;
  const Lattice lat(man.spec);
  const auto& w = lat.weights();
  const auto m = static_cast<std::size_t>(lat.edge_count());
  const auto k = static_cast<std::size_t>((g.section - 2) / 2);
  const EdgeId v1 = g.lower_row[k];
  const EdgeId v2 = g.lower_row[k + 1];
  const EdgeId w1 = g.upper_row[k];
  const EdgeId w2 = g.upper_row[k + 1];
  man.env = paths_environment(m, {&g.upper, &g.lower});
  for (auto e : {v1, v2, w2}) man.env.set(e, Letter::b);
  man.designated = {{"v1", v1}, {"v2", v2}, {"w1", w1}, {"w2", w2}};
  const auto len = static_cast<std::int64_t>(g.upper.size());
  man.claims.push_back(value_claim("f = (s+3)a + b", man.env, cost(w, len - 1, 1)));
  man.claims.push_back(flag_claim("v1 not influential", man.env, v1, "influential", false));
  man.claims.push_back(flag_claim("v2 not influential", man.env, v2, "influential", false));
  man.claims.push_back(derivative_claim("d_v1 f = 0", man.env, {v1}, 0));
  man.claims.push_back(derivative_claim("d_v2 f = 0", man.env, {v2}, 0));
  man.claims.push_back(derivative_claim("d_v1 d_v2 f = -(b - a)", man.env, {v1, v2}, -w.gap()));
  const auto restored = sigma(man.env, w2, Letter::a);
  man.claims.push_back(derivative_claim("w2 set to a: d_v1 d_v2 f = 0", restored, {v1, v2}, 0));
  return man;
}

ConstructionManifest build_parasite(const ConstructionParams& params) {
  const Weights w(params.a, params.b);
  const int h = params.offset;
  if (h < 1) throw ConfigError("parasite offset must be >= 1");
  if (!(w.b_units() < 3 * w.a_units())) throw ConfigError("parasite construction needs b < 3a");
  // The axis line costs at least 2a + (n-2)b; it must exceed (n + 2h - 1)a + b,
  // i.e. n (b - a) > 3b + (2h - 3)a.
  const Units rhs = 3 * w.b_units() + (2 * static_cast<Units>(h) - 3) * w.a_units();
  int n = params.n;
  if (n == 0) {
    n = 3;
    while (static_cast<Units>(n) * w.gap() <= rhs) ++n;
  }
  if (!(static_cast<Units>(n) * w.gap() > rhs)) {
    throw ConfigError("parasite needs n (b-a) > 3b + (2h-3)a; n=" + std::to_string(n) + " is too small");
  }
  ConstructionManifest man;
  man.name = "parasite";
  man.spec = LatticeSpec::box({n, 2 * h}, {0, h}, {n, h}, params.a, params.b, params.p);
  const Lattice lat(man.spec);
  const auto m = static_cast<std::size_t>(lat.edge_count());
  const EdgeId i = box_edge(lat, 0, h, 0);
  const EdgeId j = box_edge(lat, 1, h, 0);
  std::vector<EdgeId> upper;
  append_segment(lat, upper, 0, h, 0, 2 * h);
  append_segment(lat, upper, 0, 2 * h, n, 2 * h);
  append_segment(lat, upper, n, 2 * h, n, h);
  std::vector<EdgeId> lower{i, j};
  append_segment(lat, lower, 2, h, 2, 0);
  append_segment(lat, lower, 2, 0, n, 0);
  append_segment(lat, lower, n, 0, n, h);
  const EdgeId xi = box_edge(lat, 1, 2 * h, 0);
  man.env = paths_environment(m, {&upper, &lower});
  man.env.set(xi, Letter::b);
  man.designated = {{"i", i}, {"j", j}, {"xi", xi}};
  const std::int64_t len = n + 2 * h;
  const Units upper_cost = cost(w, len - 1, 1);
  const std::array<Units, 4> lower_cost{cost(w, len, 0), cost(w, len - 1, 1), cost(w, len - 1, 1),
                                        cost(w, len - 2, 2)};
  man.claims.push_back(path_claim("upper detour weight", man.env, upper, upper_cost));
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto env = forced(man.env, {i, j}, {kPairs[k][0], kPairs[k][1]});
    man.claims.push_back(path_claim("lower detour weight on sigma^" + pair_name(kPairs[k]), env, lower, lower_cost[k]));
    man.claims.push_back(
        value_claim("f on sigma^" + pair_name(kPairs[k]), env, std::min(upper_cost, lower_cost[k])));
  }
  man.claims.push_back(derivative_claim("d_i d_j f = -(b - a)", man.env, {i, j}, -w.gap()));
  man.claims.push_back(sign_claim("d_i d_j f <= 0 on random environments", {i, j}, -1, params, m));
  return man;
}

ConstructionManifest build_nonparasite(const ConstructionParams& params) {
  const Weights w(params.a, params.b);
  if (!(w.b_units() < 3 * w.a_units())) throw ConfigError("non-parasite construction needs b < 3a");
  const Units rhs = 3 * w.a_units() + w.b_units();
  int n = params.n;
  if (n == 0) {
    n = 2;
    while (static_cast<Units>(n) * w.gap() <= rhs) ++n;
  }
  if (!(static_cast<Units>(n) * w.gap() > rhs)) {
    throw ConfigError("non-parasite needs n (b-a) > 3a + b; n=" + std::to_string(n) + " is too small");
  }
  ConstructionManifest man;
  man.name = "nonparasite";
  man.spec = LatticeSpec::box({n, 4}, {0, 2}, {n, 2}, params.a, params.b, params.p);
  const Lattice lat(man.spec);
  const auto m = static_cast<std::size_t>(lat.edge_count());
  const EdgeId i = box_edge(lat, 0, 2, 1);
  const EdgeId j = box_edge(lat, 0, 1, 1);
  std::vector<EdgeId> upper;
  append_segment(lat, upper, 0, 2, 0, 4);
  append_segment(lat, upper, 0, 4, n, 4);
  append_segment(lat, upper, n, 4, n, 2);
  std::vector<EdgeId> lower;
  append_segment(lat, lower, 0, 2, 0, 0);
  append_segment(lat, lower, 0, 0, n, 0);
  append_segment(lat, lower, n, 0, n, 2);
  man.env = paths_environment(m, {&upper, &lower});
  man.designated = {{"i", i}, {"j", j}};
  const std::array<Units, 4> expected{cost(w, n + 4, 0), cost(w, n + 4, 0), cost(w, n + 4, 0), cost(w, n + 3, 1)};
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto env = forced(man.env, {i, j}, {kPairs[k][0], kPairs[k][1]});
    man.claims.push_back(value_claim("f on sigma^" + pair_name(kPairs[k]), env, expected[k]));
  }
  man.claims.push_back(derivative_claim("d_i d_j f = b - a", man.env, {i, j}, w.gap()));
  man.claims.push_back(sign_claim("d_i d_j f >= 0 on random environments", {i, j}, 1, params, m));
  return man;
}

bool find_gap_combination(const Weights& w, int& k_a, int& k_b) {
  for (int total = 1; total <= 20; ++total) {
    for (int ka = -10; ka <= 10; ++ka) {
      const int rest = total - std::abs(ka);
      if (rest < 0 || rest > 10) continue;
      for (int kb : {-rest, rest}) {
        const Units v = ka * w.a_units() + kb * w.b_units();
        if (v > 0 && v < w.gap()) {
          k_a = ka;
          k_b = kb;
          return true;
        }
        if (rest == 0) break;
      }
    }
  }
  return false;
}

ConstructionManifest build_ab_general(const ConstructionParams& params) {
  const Weights w(params.a, params.b);
  int ka = 0, kb = 0;
  if (!find_gap_combination(w, ka, kb)) {
    throw ConfigError("no integers k_a, k_b with |k| <= 10 and k_a a + k_b b in (0, b-a) for a=" + w.a().str() +
                      ", b=" + w.b().str() + "; influence and semi-essentiality coincide for these weights");
  }
  // Path 2 carries alpha2 a-edges and beta2 b-edges; path 1 differs by
  // (k_a, k_b), so T(path 1) - T(path 2) lies in (0, b - a).
  const int alpha2 = std::max(1, -ka);
  const int beta2 = std::max(0, 1 - kb);
  const int alpha1 = alpha2 + ka;
  const int beta1 = beta2 + kb;
  const int len1 = alpha1 + beta1;
  const int len2 = alpha2 + beta2;
  // Vertices: 0 source, 1 sink, then the interior vertices of each path.
  std::vector<std::pair<int, int>> edges;
  int next = 2;
  const auto chain = [&](int len) {
    std::vector<EdgeId> ids;
    int prev = 0;
    for (int k = 0; k < len; ++k) {
      const int to = k + 1 == len ? 1 : next++;
      ids.push_back(static_cast<EdgeId>(edges.size()));
      edges.emplace_back(prev, to);
      prev = to;
    }
    return ids;
  };
  const auto path1 = chain(len1);
  const auto path2 = chain(len2);
  ConstructionManifest man;
  man.name = "ab_general";
  man.spec = LatticeSpec::graph(next, edges, 0, 1, params.a, params.b, params.p);
  const auto m = edges.size();
  man.env = Environment::constant(m, Letter::b);
  for (int k = 0; k < alpha1; ++k) man.env.set(path1[static_cast<std::size_t>(k)], Letter::a);
  for (int k = 0; k < alpha2; ++k) man.env.set(path2[static_cast<std::size_t>(k)], Letter::a);
  const EdgeId j = path1[static_cast<std::size_t>(alpha1)];  // first b-edge of path 1
  const EdgeId jp = path2[0];                                   // an a-edge of path 2
  man.designated = {{"j", j}, {"j_prime", jp}};
  const Units t1 = cost(w, alpha1, beta1);
  const Units t2 = cost(w, alpha2, beta2);
  man.claims.push_back(path_claim("path 1 weight", man.env, path1, t1));
  man.claims.push_back(path_claim("path 2 weight", man.env, path2, t2));
  man.claims.push_back(value_claim("f = T(path 2)", man.env, t2));
  man.claims.push_back(letter_claim("j carries b", man.env, j, Letter::b));
  man.claims.push_back(flag_claim("j influential", man.env, j, "influential", true));
  man.claims.push_back(flag_claim("j not semi-essential", man.env, j, "semi_essential", false));
  man.claims.push_back(letter_claim("j' carries a", man.env, jp, Letter::a));
  man.claims.push_back(flag_claim("j' essential", man.env, jp, "essential", true));
  man.claims.push_back(flag_claim("j' not very influential", man.env, jp, "very_influential", false));
  man.claims.push_back(derivative_claim("d_j' f = T(path 1) - T(path 2)", man.env, {jp}, t1 - t2));
  return man;
}

const std::vector<std::string>& construction_names() {
  static const std::vector<std::string> names{"parasite", "nonparasite", "entangled", "reflected",
                                              "straight", "constant",    "ab_general"};
  return names;
}

ConstructionManifest build_construction(std::string_view name, const ConstructionParams& params) {
  if (name == "parasite") return build_parasite(params);
  if (name == "nonparasite") return build_nonparasite(params);
  if (name == "entangled") return build_entangled(params);
  if (name == "reflected") return build_reflected_paths(params);
  if (name == "straight") return build_straight_line(params);
  if (name == "constant") return build_constant_env(params);
  if (name == "ab_general") return build_ab_general(params);
  std::string valid;
  for (const auto& n : construction_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown construction '" + std::string(name) + "' (valid: " + valid + ")");
}

// ---------------------------------------------------------------------------
// Extremal search

ExtremalResult extremal_search(std::span<const Units> f_table, int k) {
  const auto size = f_table.size();
  if (size == 0 || (size & (size - 1)) != 0) throw ContractViolation("table size must be a power of two");
  const int m = std::countr_zero(size);
  if (k < 1 || k > 4) throw ConfigError("extremal search supports 1 <= k <= 4");
  if (k > m) throw ConfigError("k exceeds the number of edges");
  ExtremalResult r;
  r.k = k;
  r.max_value = std::numeric_limits<Units>::min();
  r.min_value = std::numeric_limits<Units>::max();
  std::uint64_t s = (std::uint64_t{1} << k) - 1;
  while (s < size) {
    for (std::uint64_t x = 0; x < size; ++x) {
      if (x & s) continue;
      const Units d = derivative_at<Units>(f_table, x, s);
      if (d > r.max_value) {
        r.max_value = d;
        r.max_env = x;
        r.max_set = s;
      }
      if (d < r.min_value) {
        r.min_value = d;
        r.min_env = x;
        r.min_set = s;
      }
    }
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t nx = s + c;
    s = (((nx ^ s) >> 2) / c) | nx;
  }
  return r;
}

ExtremalResult extremal_search(const Lattice& lat, int k) { return extremal_search(passage_table(lat), k); }

}  // namespace fpp
