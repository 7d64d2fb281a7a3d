#include "fpp/geodesic.hpp"

#include <algorithm>
#include <functional>

namespace fpp {

namespace {

constexpr PassageValue kInf = PassageValue::infinity();

PassageValue step(const PassageValue& d, bool is_b, Units a_units, Units b_units) {
  if (d.is_infinite()) return kInf;
  return is_b ? PassageValue{d.count_a, d.count_b + 1, d.units + b_units}
              : PassageValue{d.count_a + 1, d.count_b, d.units + a_units};
}

PassageValue join(const PassageValue& x, const PassageValue& y, const PassageValue& z) {
  if (x.is_infinite() || y.is_infinite() || z.is_infinite()) return kInf;
  return x + y + z;
}

}  // namespace

bool TightSubgraph::contains(EdgeId e) const {
  return std::any_of(tight_edges.begin(), tight_edges.end(), [e](const Oriented& o) { return o.edge == e; });
}

PathEngine::PathEngine(const Lattice& lat)
    : lat_(&lat),
      route_(&lat.route()),
      a_units_(lat.weights().a_units()),
      b_units_(lat.weights().b_units()),
      env_(static_cast<std::size_t>(lat.edge_count())) {
  const auto v = static_cast<std::size_t>(route_->vertex_count);
  from_buf_.resize(v);
  to_buf_.resize(v);
  done_.resize(v);
  heap_.reserve(route_->arcs.size() + 1);
}

void PathEngine::load(const Environment& env) {
  if (env.size() != static_cast<std::size_t>(lat_->edge_count())) {
    throw ContractViolation("environment has " + std::to_string(env.size()) + " edges, lattice has " +
                            std::to_string(lat_->edge_count()));
  }
  env_ = env;
  have_f_ = false;
}

void PathEngine::run(int source, EdgeId skip, std::vector<PassageValue>& dist) {
  std::fill(dist.begin(), dist.end(), kInf);
  std::fill(done_.begin(), done_.end(), 0);
  heap_.clear();
  dist[static_cast<std::size_t>(source)] = PassageValue{};
  heap_.emplace_back(0, source);
  const auto cmp = std::greater<>{};
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    const auto [du, u] = heap_.back();
    heap_.pop_back();
    if (done_[static_cast<std::size_t>(u)]) continue;
    done_[static_cast<std::size_t>(u)] = 1;
    const auto& here = dist[static_cast<std::size_t>(u)];
    for (const auto& arc : route_->neighbours(u)) {
      if (arc.edge == skip || done_[static_cast<std::size_t>(arc.to)]) continue;
      const auto cand = step(here, env_.is_b(arc.edge), a_units_, b_units_);
      auto& slot = dist[static_cast<std::size_t>(arc.to)];
      if (cand.units < slot.units) {
        slot = cand;
        heap_.emplace_back(cand.units, arc.to);
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      }
    }
  }
}

PassageValue PathEngine::passage() {
  if (have_f_) return f_;
  PassageValue best = kInf;
  for (const auto& [s, t] : route_->terminals) {
    run(s, -1, from_buf_);
    best = std::min(best, from_buf_[static_cast<std::size_t>(t)]);
  }
  f_ = best;
  have_f_ = true;
  return f_;
}

TightSubgraph PathEngine::tight() {
  TightSubgraph ts;
  ts.f_value = passage();
  if (ts.f_value.is_infinite()) return ts;
  for (const auto& [s, t] : route_->terminals) {
    run(s, -1, from_buf_);
    if (from_buf_[static_cast<std::size_t>(t)] != ts.f_value) continue;
    run(t, -1, to_buf_);
    TerminalLayer layer{s, t, from_buf_, to_buf_, {}};
    for (std::size_t e = 0; e < route_->ends.size(); ++e) {
      const auto [u, v] = route_->ends[e];
      const auto w = step(PassageValue{}, env_.is_b(static_cast<EdgeId>(e)), a_units_, b_units_);
      if (join(layer.from_source[u], w, layer.to_sink[v]) == ts.f_value) {
        layer.arcs.push_back({static_cast<EdgeId>(e), u, v});
        ts.tight_edges.push_back({static_cast<EdgeId>(e), true});
      } else if (join(layer.from_source[v], w, layer.to_sink[u]) == ts.f_value) {
        layer.arcs.push_back({static_cast<EdgeId>(e), v, u});
        ts.tight_edges.push_back({static_cast<EdgeId>(e), false});
      }
    }
    ts.layers.push_back(std::move(layer));
  }
  std::sort(ts.tight_edges.begin(), ts.tight_edges.end());
  ts.tight_edges.erase(std::unique(ts.tight_edges.begin(), ts.tight_edges.end()), ts.tight_edges.end());
  return ts;
}

EdgeClass PathEngine::classify(EdgeId j) {
  if (j < 0 || j >= lat_->edge_count()) throw ContractViolation("edge id " + std::to_string(j) + " out of range");
  const auto f = passage();
  const auto [u, v] = route_->ends[static_cast<std::size_t>(j)];
  const PassageValue wa{1, 0, a_units_};
  const PassageValue wb{0, 1, b_units_};
  PassageValue avoid = kInf;
  PassageValue through_a = kInf;
  PassageValue through_b = kInf;
  for (const auto& [s, t] : route_->terminals) {
    run(s, j, from_buf_);
    run(t, j, to_buf_);
    avoid = std::min(avoid, from_buf_[static_cast<std::size_t>(t)]);
    for (const auto& [x, y] : {std::pair{u, v}, std::pair{v, u}}) {
      through_a = std::min(through_a, join(from_buf_[x], wa, to_buf_[y]));
      through_b = std::min(through_b, join(from_buf_[x], wb, to_buf_[y]));
    }
  }
  EdgeClass c;
  c.edge_id = j;
  c.f_avoid = avoid;
  c.f_sigma_a = std::min(avoid, through_a);
  c.f_sigma_b = std::min(avoid, through_b);
  const auto& through_here = env_.is_b(j) ? through_b : through_a;
  c.essential = !f.is_infinite() && avoid > f;
  c.semi_essential = !f.is_infinite() && through_here == f;
  c.influential = c.f_sigma_b != c.f_sigma_a;
  c.very_influential = !c.f_sigma_b.is_infinite() && c.f_sigma_b.units - c.f_sigma_a.units == b_units_ - a_units_;
  return c;
}

std::vector<EdgeClass> PathEngine::classify_all() {
  std::vector<EdgeClass> out;
  out.reserve(static_cast<std::size_t>(lat_->edge_count()));
  for (EdgeId j = 0; j < lat_->edge_count(); ++j) out.push_back(classify(j));
  return out;
}

PassageValue passage_time(const Lattice& lat, const Environment& env) {
  if (lat.mode() == LatticeMode::torus) throw ContractViolation("passage_time expects a box or graph lattice");
  PathEngine engine(lat);
  engine.load(env);
  return engine.passage();
}

PassageValue passage_time_torus(const Lattice& lat, const Environment& env) {
  if (lat.mode() != LatticeMode::torus) throw ContractViolation("passage_time_torus expects a torus lattice");
  PathEngine engine(lat);
  engine.load(env);
  return engine.passage();
}

PassageValue evaluate_passage(const Lattice& lat, const Environment& env) {
  PathEngine engine(lat);
  engine.load(env);
  return engine.passage();
}

TightSubgraph tight_subgraph(const Lattice& lat, const Environment& env) {
  PathEngine engine(lat);
  engine.load(env);
  return engine.tight();
}

namespace {

// Path counts from the source (forward) or into the sink (backward) over
// the layer's DAG. Arcs strictly increase the source distance.
std::vector<BigCount> layer_counts(const TerminalLayer& layer, bool forward) {
  std::vector<BigCount> count(layer.from_source.size());
  auto arcs = layer.arcs;
  if (forward) {
    std::sort(arcs.begin(), arcs.end(), [&](const TightArc& x, const TightArc& y) {
      return layer.from_source[x.from].units < layer.from_source[y.from].units;
    });
    count[layer.source] = 1;
    for (const auto& a : arcs) count[a.to] += count[a.from];
  } else {
    std::sort(arcs.begin(), arcs.end(), [&](const TightArc& x, const TightArc& y) {
      return layer.to_sink[x.to].units < layer.to_sink[y.to].units;
    });
    count[layer.sink] = 1;
    for (const auto& a : arcs) count[a.from] += count[a.to];
  }
  return count;
}

}  // namespace

BigCount geodesic_count(const TightSubgraph& ts) {
  BigCount total = 0;
  for (const auto& layer : ts.layers) total += layer_counts(layer, true)[layer.sink];
  return total;
}

BigCount geodesic_count_through(const TightSubgraph& ts, EdgeId e) {
  BigCount total = 0;
  for (const auto& layer : ts.layers) {
    const auto arc = std::find_if(layer.arcs.begin(), layer.arcs.end(), [e](const TightArc& a) { return a.edge == e; });
    if (arc == layer.arcs.end()) continue;
    const auto fwd = layer_counts(layer, true);
    const auto bwd = layer_counts(layer, false);
    total += fwd[arc->from] * bwd[arc->to];
  }
  return total;
}

EdgeClass classify_edge(const Lattice& lat, const Environment& env, EdgeId e) {
  PathEngine engine(lat);
  engine.load(env);
  return engine.classify(e);
}

std::vector<EdgeClass> classify_all(const Lattice& lat, const Environment& env) {
  PathEngine engine(lat);
  engine.load(env);
  return engine.classify_all();
}

std::string edge_class_csv_header() {
  return "env_hex,edge_id,essential,semi_essential,influential,very_influential,f_sigma_a,f_sigma_b";
}

std::string edge_class_csv_row(const Environment& env, const EdgeClass& c, const Weights& w) {
  const auto flag = [](bool x) { return x ? "1" : "0"; };
  const auto value = [&w](const PassageValue& v) { return v.is_infinite() ? std::string("inf") : w.format(v.units); };
  return env.to_hex() + "," + std::to_string(c.edge_id) + "," + flag(c.essential) + "," + flag(c.semi_essential) +
         "," + flag(c.influential) + "," + flag(c.very_influential) + "," + value(c.f_sigma_a) + "," +
         value(c.f_sigma_b);
}

}  // namespace fpp
