#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/passage_value.hpp"

namespace fpp {

/// `box`: point-to-point passage time inside a rectangular box.
/// `torus`: once-around passage time on Z_n^d, wrapping in axis 0.
/// `graph`: point-to-point passage time on an explicit small multigraph
/// (parallel pair, series pair, odd cycles).
enum class LatticeMode { box, torus, graph };

std::string to_string(LatticeMode mode);

struct LatticeSpec {
  LatticeMode mode = LatticeMode::box;
  int d = 2;
  std::vector<int> box_dims;  // box: coordinates run 0..box_dims[i]
  int n = 0;                  // torus side
  std::vector<int> source;    // box: coordinates; graph: {vertex}
  std::vector<int> sink;
  int graph_vertices = 0;
  std::vector<std::pair<int, int>> graph_edges;
  Rational a{1, 1};
  Rational b{2, 1};
  double p = 0.5;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  static LatticeSpec box(std::vector<int> dims, std::vector<int> source, std::vector<int> sink,
                         Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);
  static LatticeSpec torus(int d, int n, Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);
  static LatticeSpec graph(int vertices, std::vector<std::pair<int, int>> edges, int source, int sink,
                           Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);
  /// Box [-2n,2n]^d shifted to [0,4n]^d, from the centre to centre + n e_0.
  static LatticeSpec centred_box(int n, int d, Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);
  /// Two edges joining source and sink: f = min(w0, w1).
  static LatticeSpec parallel_pair(Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);
  /// Two edges in a row: f = w0 + w1.
  static LatticeSpec series_pair(Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);
  static LatticeSpec single_edge(Rational a = {1, 1}, Rational b = {2, 1}, double p = 0.5);

  /// Same spec with other weights / bias.
  LatticeSpec with_weights(Rational a, Rational b) const;
  LatticeSpec with_p(double p) const;
};

struct Edge {
  int u = 0;
  int v = 0;
  int axis = -1;  // -1 in graph mode
};

/// The graph shortest paths actually run on. Identical to the lattice for
/// box and graph modes; for the torus it is the once-around lift with
/// layers 0..n in axis 0, in which every torus edge appears exactly once.
struct RouteGraph {
  struct Arc {
    int to;
    EdgeId edge;
  };
  int vertex_count = 0;
  std::vector<std::array<int, 2>> ends;  // per edge id
  std::vector<int> offsets;              // CSR, size vertex_count + 1
  std::vector<Arc> arcs;
  std::vector<std::pair<int, int>> terminals;  // admissible (source, sink) pairs

  std::span<const Arc> neighbours(int v) const {
    return {arcs.data() + offsets[v], arcs.data() + offsets[v + 1]};
  }
};

class Lattice {
 public:
  explicit Lattice(LatticeSpec spec);

  const LatticeSpec& spec() const { return spec_; }
  LatticeMode mode() const { return spec_.mode; }
  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const Edge> edges() const { return edges_; }
  /// Edge leaving `vertex` in the positive direction of `axis`, or -1.
  EdgeId edge_at(int vertex, int axis) const;

  /// Lexicographic vertex index, axis 0 most significant.
  int vertex_index(std::span<const int> coords) const;
  std::vector<int> coords(int vertex) const;

  const Weights& weights() const { return weights_; }
  double p() const { return spec_.p; }
  const RouteGraph& route() const { return route_; }

 private:
  void build_box();
  void build_torus();
  void build_graph();
  void finish_route();

  LatticeSpec spec_;
  Weights weights_;
  std::vector<int> extent_;  // vertices per axis
  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<EdgeId> edge_index_;  // vertex * d + axis -> edge id
  RouteGraph route_;
};

Lattice build_lattice(const LatticeSpec& spec);

/// Default 26, overridable through FPP_ENUM_CAP.
std::size_t enumeration_cap();

class EnumerationCapError : public ConfigError {
 public:
  EnumerationCapError(std::size_t edges, std::size_t cap);
};

/// All 2^m environments in bitmask order; sliceable into index ranges.
class EnvironmentRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Environment;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(std::size_t edges, std::uint64_t index) : edges_(edges), index_(index) {}
    Environment operator*() const { return Environment::from_mask(edges_, index_); }
    iterator& operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      auto old = *this;
      ++index_;
      return old;
    }
    friend bool operator==(const iterator& x, const iterator& y) { return x.index_ == y.index_; }

   private:
    std::size_t edges_ = 0;
    std::uint64_t index_ = 0;
  };

  EnvironmentRange(std::size_t edges, std::uint64_t first, std::uint64_t last)
      : edges_(edges), first_(first), last_(last) {}

  iterator begin() const { return {edges_, first_}; }
  iterator end() const { return {edges_, last_}; }
  std::uint64_t size() const { return last_ - first_; }
  EnvironmentRange slice(std::uint64_t first, std::uint64_t last) const;

 private:
  std::size_t edges_;
  std::uint64_t first_;
  std::uint64_t last_;
};

/// Throws EnumerationCapError when the lattice has more than `cap` edges.
EnvironmentRange enumerate_environments(const Lattice& lat, std::size_t cap = enumeration_cap());
std::uint64_t checked_state_count(const Lattice& lat, std::size_t cap = enumeration_cap());

/// I.i.d. edges with P(a) = p; a pure function of (seed, index).
Environment sample_environment(const Lattice& lat, double p, std::uint64_t seed, std::uint64_t index);

/// Parse / emit the JSON lattice spec document.
LatticeSpec parse_lattice_spec(std::string_view json_text);
std::string lattice_spec_json(const LatticeSpec& spec);
/// FNV-1a over the canonical JSON form.
std::uint64_t spec_hash(const LatticeSpec& spec);

}  // namespace fpp
