#include "fpp/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>

#include <json.hpp>

namespace fpp {

using nlohmann::json;

std::string to_string(LatticeMode mode) {
  switch (mode) {
    case LatticeMode::box:
      return "box";
    case LatticeMode::torus:
      return "torus";
    case LatticeMode::graph:
      return "graph";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LatticeSpec

void LatticeSpec::validate() const {
  Weights{a, b};  // throws on a <= 0 or a >= b
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0,1) (got " + std::to_string(p) + ")");
  switch (mode) {
    case LatticeMode::box: {
      if (d < 1) throw ConfigError("dimension d must be >= 1");
      if (static_cast<int>(box_dims.size()) != d) throw ConfigError("box_dims must have d entries");
      std::int64_t vertices = 1;
      for (int m : box_dims) {
        if (m < 1) throw ConfigError("box side lengths must be positive");
        vertices *= (m + 1);
        if (vertices > 50'000'000) throw ConfigError("box is too large");
      }
      if (static_cast<int>(source.size()) != d || static_cast<int>(sink.size()) != d) {
        throw ConfigError("source and sink must have d coordinates");
      }
      for (int i = 0; i < d; ++i) {
        if (source[i] < 0 || source[i] > box_dims[i] || sink[i] < 0 || sink[i] > box_dims[i]) {
          throw ConfigError("source and sink must lie inside the box");
        }
      }
      if (source == sink) throw ConfigError("source and sink must differ");
      break;
    }
    case LatticeMode::torus: {
      if (d < 1) throw ConfigError("dimension d must be >= 1");
      if (n < 2) throw ConfigError("torus side n must be >= 2 (got " + std::to_string(n) + ")");
      std::int64_t vertices = 1;
      for (int i = 0; i < d; ++i) {
        vertices *= n;
        if (vertices > 50'000'000) throw ConfigError("torus is too large");
      }
      break;
    }
    case LatticeMode::graph: {
      if (graph_vertices < 2) throw ConfigError("graph needs at least two vertices");
      if (graph_edges.empty()) throw ConfigError("graph needs at least one edge");
      for (auto [u, v] : graph_edges) {
        if (u < 0 || v < 0 || u >= graph_vertices || v >= graph_vertices) {
          throw ConfigError("graph edge endpoint out of range");
        }
        if (u == v) throw ConfigError("graph edges must join distinct vertices");
      }
      if (source.size() != 1 || sink.size() != 1) throw ConfigError("graph source and sink are single vertex ids");
      if (source[0] < 0 || source[0] >= graph_vertices || sink[0] < 0 || sink[0] >= graph_vertices) {
        throw ConfigError("graph source/sink out of range");
      }
      if (source[0] == sink[0]) throw ConfigError("source and sink must differ");
      break;
    }
  }
}

LatticeSpec LatticeSpec::box(std::vector<int> dims, std::vector<int> source, std::vector<int> sink, Rational a,
                             Rational b, double p) {
  LatticeSpec s;
  s.mode = LatticeMode::box;
  s.d = static_cast<int>(dims.size());
  s.box_dims = std::move(dims);
  s.source = std::move(source);
  s.sink = std::move(sink);
  s.a = a;
  s.b = b;
  s.p = p;
  return s;
}

LatticeSpec LatticeSpec::torus(int d, int n, Rational a, Rational b, double p) {
  LatticeSpec s;
  s.mode = LatticeMode::torus;
  s.d = d;
  s.n = n;
  s.a = a;
  s.b = b;
  s.p = p;
  return s;
}

LatticeSpec LatticeSpec::graph(int vertices, std::vector<std::pair<int, int>> edges, int source, int sink,
                               Rational a, Rational b, double p) {
  LatticeSpec s;
  s.mode = LatticeMode::graph;
  s.d = 1;
  s.graph_vertices = vertices;
  s.graph_edges = std::move(edges);
  s.source = {source};
  s.sink = {sink};
  s.a = a;
  s.b = b;
  s.p = p;
  return s;
}

LatticeSpec LatticeSpec::centred_box(int n, int d, Rational a, Rational b, double p) {
  std::vector<int> dims(static_cast<std::size_t>(d), 4 * n);
  std::vector<int> src(static_cast<std::size_t>(d), 2 * n);
  auto dst = src;
  dst[0] += n;
  return box(std::move(dims), std::move(src), std::move(dst), a, b, p);
}

LatticeSpec LatticeSpec::parallel_pair(Rational a, Rational b, double p) {
  return graph(2, {{0, 1}, {0, 1}}, 0, 1, a, b, p);
}

LatticeSpec LatticeSpec::series_pair(Rational a, Rational b, double p) { return box({2}, {0}, {2}, a, b, p); }

LatticeSpec LatticeSpec::single_edge(Rational a, Rational b, double p) { return box({1}, {0}, {1}, a, b, p); }

LatticeSpec LatticeSpec::with_weights(Rational a_, Rational b_) const {
  auto s = *this;
  s.a = a_;
  s.b = b_;
  return s;
}

LatticeSpec LatticeSpec::with_p(double p_) const {
  auto s = *this;
  s.p = p_;
  return s;
}

// ---------------------------------------------------------------------------
// Lattice

Lattice::Lattice(LatticeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  weights_ = Weights(spec_.a, spec_.b);
  switch (spec_.mode) {
    case LatticeMode::box:
      build_box();
      break;
    case LatticeMode::torus:
      build_torus();
      break;
    case LatticeMode::graph:
      build_graph();
      break;
  }
  finish_route();
}

int Lattice::vertex_index(std::span<const int> c) const {
  if (spec_.mode == LatticeMode::graph) return c[0];
  int index = 0;
  for (std::size_t i = 0; i < extent_.size(); ++i) index = index * extent_[i] + c[i];
  return index;
}

std::vector<int> Lattice::coords(int vertex) const {
  if (spec_.mode == LatticeMode::graph) return {vertex};
  std::vector<int> c(extent_.size());
  for (std::size_t i = extent_.size(); i-- > 0;) {
    c[i] = vertex % extent_[i];
    vertex /= extent_[i];
  }
  return c;
}

EdgeId Lattice::edge_at(int vertex, int axis) const {
  if (spec_.mode == LatticeMode::graph || axis < 0 || axis >= spec_.d) return -1;
  return edge_index_[static_cast<std::size_t>(vertex * spec_.d + axis)];
}

void Lattice::build_box() {
  const int d = spec_.d;
  extent_.assign(spec_.box_dims.begin(), spec_.box_dims.end());
  for (auto& e : extent_) e += 1;
  vertex_count_ = 1;
  for (int e : extent_) vertex_count_ *= e;
  edge_index_.assign(static_cast<std::size_t>(vertex_count_ * d), -1);
  std::vector<int> stride(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * extent_[i + 1];
  for (int v = 0; v < vertex_count_; ++v) {
    const auto c = coords(v);
    for (int axis = 0; axis < d; ++axis) {
      if (c[axis] + 1 >= extent_[axis]) continue;
      edge_index_[static_cast<std::size_t>(v * d + axis)] = static_cast<EdgeId>(edges_.size());
      edges_.push_back({v, v + stride[axis], axis});
    }
  }
  route_.vertex_count = vertex_count_;
  route_.ends.reserve(edges_.size());
  for (const auto& e : edges_) route_.ends.push_back({e.u, e.v});
  route_.terminals = {{vertex_index(spec_.source), vertex_index(spec_.sink)}};
}

void Lattice::build_torus() {
  const int d = spec_.d;
  const int n = spec_.n;
  extent_.assign(static_cast<std::size_t>(d), n);
  vertex_count_ = 1;
  for (int i = 0; i < d; ++i) vertex_count_ *= n;
  const int transverse = vertex_count_ / n;  // vertices per axis-0 layer
  edge_index_.assign(static_cast<std::size_t>(vertex_count_ * d), -1);
  route_.vertex_count = (n + 1) * transverse;
  for (int v = 0; v < vertex_count_; ++v) {
    const auto c = coords(v);
    for (int axis = 0; axis < d; ++axis) {
      auto t = c;
      t[axis] = (t[axis] + 1) % n;
      const int target = vertex_index(t);
      edge_index_[static_cast<std::size_t>(v * d + axis)] = static_cast<EdgeId>(edges_.size());
      edges_.push_back({v, target, axis});
      if (axis == 0) {
        // Layer c[0] to layer c[0] + 1 of the lift; the last layer is n.
        route_.ends.push_back({v, v + transverse});
      } else {
        route_.ends.push_back({v, target});
      }
    }
  }
  for (int y = 0; y < transverse; ++y) route_.terminals.emplace_back(y, n * transverse + y);
}

void Lattice::build_graph() {
  vertex_count_ = spec_.graph_vertices;
  for (auto [u, v] : spec_.graph_edges) edges_.push_back({u, v, -1});
  route_.vertex_count = vertex_count_;
  for (const auto& e : edges_) route_.ends.push_back({e.u, e.v});
  route_.terminals = {{spec_.source[0], spec_.sink[0]}};
}

void Lattice::finish_route() {
  auto& r = route_;
  r.offsets.assign(static_cast<std::size_t>(r.vertex_count) + 1, 0);
  for (const auto& [u, v] : r.ends) {
    ++r.offsets[static_cast<std::size_t>(u) + 1];
    ++r.offsets[static_cast<std::size_t>(v) + 1];
  }
  for (std::size_t i = 1; i < r.offsets.size(); ++i) r.offsets[i] += r.offsets[i - 1];
  r.arcs.resize(static_cast<std::size_t>(r.offsets.back()));
  auto fill = r.offsets;
  for (std::size_t e = 0; e < r.ends.size(); ++e) {
    const auto [u, v] = r.ends[e];
    r.arcs[static_cast<std::size_t>(fill[static_cast<std::size_t>(u)]++)] = {v, static_cast<EdgeId>(e)};
    r.arcs[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = {u, static_cast<EdgeId>(e)};
  }
}

Lattice build_lattice(const LatticeSpec& spec) { return Lattice(spec); }

// ---------------------------------------------------------------------------
// Enumeration and sampling

std::size_t enumeration_cap() {
  if (const char* env = std::getenv("FPP_ENUM_CAP")) {
    char* end = nullptr;
    const auto value = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && value > 0 && value <= 40) return value;
  }
  return 26;
}

EnumerationCapError::EnumerationCapError(std::size_t edges, std::size_t cap)
    : ConfigError("exhaustive enumeration refused: lattice has m=" + std::to_string(edges) +
                  " edges but the enumeration cap is " + std::to_string(cap) + " (2^" + std::to_string(edges) +
                  " states; raise FPP_ENUM_CAP or use monte_carlo mode)") {}

EnvironmentRange EnvironmentRange::slice(std::uint64_t first, std::uint64_t last) const {
  first = std::min(first_ + first, last_);
  last = std::min(first_ + last, last_);
  return {edges_, first, std::max(first, last)};
}

std::uint64_t checked_state_count(const Lattice& lat, std::size_t cap) {
  const auto m = static_cast<std::size_t>(lat.edge_count());
  if (m > cap || m > 40) throw EnumerationCapError(m, cap);
  return std::uint64_t{1} << m;
}

EnvironmentRange enumerate_environments(const Lattice& lat, std::size_t cap) {
  const auto states = checked_state_count(lat, cap);
  return {static_cast<std::size_t>(lat.edge_count()), 0, states};
}

Environment sample_environment(const Lattice& lat, double p, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedU};
  std::mt19937_64 engine(seq);
  const auto m = static_cast<std::size_t>(lat.edge_count());
  Environment env(m);
  for (std::size_t e = 0; e < m; ++e) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    if (u >= p) env.set(static_cast<EdgeId>(e), Letter::b);
  }
  return env;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Rational rational_field(const json& j, const char* key, Rational fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return {v.get<std::int64_t>(), 1};
  throw ConfigError(std::string("field '") + key + "' must be a rational string like \"3/2\"");
}

std::vector<int> int_list(const json& v, const char* key) {
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be an integer list");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ConfigError(std::string("field '") + key + "' must be an integer list");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

LatticeSpec parse_lattice_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("lattice spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("lattice spec must be a JSON object");
  LatticeSpec s;
  const auto mode = j.value("mode", std::string("box"));
  if (mode == "box") {
    s.mode = LatticeMode::box;
  } else if (mode == "torus") {
    s.mode = LatticeMode::torus;
  } else if (mode == "graph") {
    s.mode = LatticeMode::graph;
  } else {
    throw ConfigError("unknown lattice mode '" + mode + "' (expected box, torus or graph)");
  }
  try {
    if (j.contains("box_dims")) s.box_dims = int_list(j.at("box_dims"), "box_dims");
    s.d = j.value("d", s.mode == LatticeMode::box && !s.box_dims.empty() ? static_cast<int>(s.box_dims.size()) : 2);
    s.n = j.value("n", 0);
    if (j.contains("source")) s.source = int_list(j.at("source"), "source");
    if (j.contains("sink")) s.sink = int_list(j.at("sink"), "sink");
    if (s.mode == LatticeMode::graph) {
      s.d = 1;
      s.graph_vertices = j.value("vertices", 0);
      for (const auto& e : j.value("edges", json::array())) {
        const auto pair = int_list(e, "edges");
        if (pair.size() != 2) throw ConfigError("graph edges must be [u, v] pairs");
        s.graph_edges.emplace_back(pair[0], pair[1]);
      }
    }
    s.a = rational_field(j, "a", s.a);
    s.b = rational_field(j, "b", s.b);
    if (j.contains("p")) {
      const auto& p = j.at("p");
      s.p = p.is_string() ? std::stod(p.get<std::string>()) : p.get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed lattice spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string lattice_spec_json(const LatticeSpec& s) {
  json j;
  j["mode"] = to_string(s.mode);
  j["a"] = s.a.den == 1 ? std::to_string(s.a.num) : s.a.str();
  j["b"] = s.b.den == 1 ? std::to_string(s.b.num) : s.b.str();
  j["p"] = s.p;
  switch (s.mode) {
    case LatticeMode::box:
      j["d"] = s.d;
      j["box_dims"] = s.box_dims;
      j["source"] = s.source;
      j["sink"] = s.sink;
      break;
    case LatticeMode::torus:
      j["d"] = s.d;
      j["n"] = s.n;
      break;
    case LatticeMode::graph: {
      j["vertices"] = s.graph_vertices;
      json edges = json::array();
      for (auto [u, v] : s.graph_edges) edges.push_back({u, v});
      j["edges"] = edges;
      j["source"] = s.source.at(0);
      j["sink"] = s.sink.at(0);
      break;
    }
  }
  return j.dump();
}

std::uint64_t spec_hash(const LatticeSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : lattice_spec_json(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fpp
