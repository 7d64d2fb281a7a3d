#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fpp/environment.hpp"
#include "fpp/lattice.hpp"
#include "fpp/passage_value.hpp"

namespace fpp {

using BigCount = boost::multiprecision::cpp_int;

/// One tight edge traversed from `from` to `to` (route-graph vertices).
struct TightArc {
  EdgeId edge = -1;
  int from = 0;
  int to = 0;
  bool operator==(const TightArc&) const = default;
};

/// Distance labels for one optimal (source, sink) pair together with the
/// arcs that lie on some geodesic between them.
struct TerminalLayer {
  int source = 0;
  int sink = 0;
  std::vector<PassageValue> from_source;
  std::vector<PassageValue> to_sink;
  std::vector<TightArc> arcs;
};

/// Every geodesic, encoded by distance labels. On the torus there is one
/// layer per winding start that attains the minimum.
struct TightSubgraph {
  PassageValue f_value;
  std::vector<TerminalLayer> layers;
  /// Distinct (edge, orientation) pairs over all layers, sorted by edge id.
  /// `forward` means traversal from route().ends[e][0] to ends[e][1].
  struct Oriented {
    EdgeId edge;
    bool forward;
    auto operator<=>(const Oriented&) const = default;
  };
  std::vector<Oriented> tight_edges;

  const std::vector<PassageValue>& dist_from_source() const { return layers.front().from_source; }
  const std::vector<PassageValue>& dist_to_sink() const { return layers.front().to_sink; }
  bool contains(EdgeId e) const;
};

struct EdgeClass {
  EdgeId edge_id = -1;
  bool essential = false;
  bool semi_essential = false;
  bool influential = false;
  bool very_influential = false;
  PassageValue f_sigma_a;
  PassageValue f_sigma_b;
  PassageValue f_avoid;  // infinity when deleting the edge disconnects
};

/// Reusable Dijkstra workspace bound to one lattice. Not thread-safe; give
/// each worker its own engine.
class PathEngine {
 public:
  explicit PathEngine(const Lattice& lat);

  const Lattice& lattice() const { return *lat_; }

  void load(const Environment& env);
  const Environment& environment() const { return env_; }

  PassageValue passage();
  TightSubgraph tight();
  EdgeClass classify(EdgeId j);
  std::vector<EdgeClass> classify_all();

 private:
  // Single-source distances from `source`, ignoring edge `skip` (-1: none).
  void run(int source, EdgeId skip, std::vector<PassageValue>& out);
  Units weight(EdgeId e) const { return env_.is_b(e) ? b_units_ : a_units_; }

  const Lattice* lat_;
  const RouteGraph* route_;
  Units a_units_;
  Units b_units_;
  Environment env_;
  bool have_f_ = false;
  PassageValue f_;

  std::vector<PassageValue> from_buf_;
  std::vector<PassageValue> to_buf_;
  std::vector<std::uint8_t> done_;
  std::vector<std::pair<Units, int>> heap_;
};

/// Box and graph modes.
PassageValue passage_time(const Lattice& lat, const Environment& env);
/// Torus mode: minimum over winding starts of the lifted distance.
PassageValue passage_time_torus(const Lattice& lat, const Environment& env);
/// Dispatches on the lattice mode.
PassageValue evaluate_passage(const Lattice& lat, const Environment& env);

TightSubgraph tight_subgraph(const Lattice& lat, const Environment& env);

/// Number of geodesics (paths inside the tight subgraph).
BigCount geodesic_count(const TightSubgraph& ts);
/// Number of geodesics traversing edge `e`.
BigCount geodesic_count_through(const TightSubgraph& ts, EdgeId e);

EdgeClass classify_edge(const Lattice& lat, const Environment& env, EdgeId e);
std::vector<EdgeClass> classify_all(const Lattice& lat, const Environment& env);

/// CSV header and one row per edge class.
std::string edge_class_csv_header();
std::string edge_class_csv_row(const Environment& env, const EdgeClass& c, const Weights& w);

}  // namespace fpp
