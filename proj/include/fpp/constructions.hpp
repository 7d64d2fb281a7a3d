#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/lattice.hpp"
#include "fpp/passage_value.hpp"

namespace fpp {

enum class ClaimKind {
  passage_value,   // f(env) == expected
  path_weight,     // total weight of `edges` on env == expected
  derivative,      // d_edges f(env) == expected
  edge_flag,       // classification flag of edges[0] on env == flag_value
  edge_letter,     // env carries `letter` on edges[0]
  geodesic_count,  // number of geodesics on env == count
  avoid_equals_f,  // best path avoiding edges[0] ties f on env
  sign_spot_check  // sign * d_edges f >= 0 on `samples` random environments
};

std::string to_string(ClaimKind kind);

struct Claim {
  std::string label;
  ClaimKind kind = ClaimKind::passage_value;
  Environment env;
  std::vector<EdgeId> edges;
  Units expected = 0;
  std::string flag;  // essential, semi_essential, influential, very_influential
  bool flag_value = true;
  Letter letter = Letter::a;
  std::int64_t count = 0;
  int sign = 1;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
};

struct ConstructionManifest {
  std::string name;
  LatticeSpec spec;
  Environment env;
  std::vector<std::pair<std::string, EdgeId>> designated;
  std::vector<Claim> claims;

  EdgeId edge(std::string_view role) const;
};

struct ClaimResult {
  bool pass = false;
  std::string observed;
};

struct CheckedManifest {
  ConstructionManifest manifest;
  std::vector<ClaimResult> results;
  bool all_pass = false;

  std::string json() const;
};

CheckedManifest check_manifest(const ConstructionManifest& manifest, int workers = 0);

/// Builder parameters; zero means "smallest admissible value".
struct ConstructionParams {
  Rational a{1, 1};
  Rational b{2, 1};
  double p = 0.5;
  int n = 0;
  int d = 2;
  int offset = 10;   // parasite: distance of the two detours from the axis
  int length = 6;    // straight line: number of edges on the line
  int marks = 1;     // straight line: 1 or 2 marked edges
  int section = 0;   // reflected / entangled: length of the mirrored sections
  Letter value = Letter::a;  // constant environment letter
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
};

/// Reads the optional keys a, b, p, n, d, offset, length, marks, section,
/// value ("a"|"b"), samples, seed.
ConstructionParams parse_construction_params(std::string_view json_text);

ConstructionManifest build_constant_env(const ConstructionParams& params);
ConstructionManifest build_straight_line(const ConstructionParams& params);
ConstructionManifest build_reflected_paths(const ConstructionParams& params);
ConstructionManifest build_entangled(const ConstructionParams& params);
ConstructionManifest build_parasite(const ConstructionParams& params);
ConstructionManifest build_nonparasite(const ConstructionParams& params);
ConstructionManifest build_ab_general(const ConstructionParams& params);

/// parasite, nonparasite, entangled, reflected, straight, constant, ab_general.
const std::vector<std::string>& construction_names();
ConstructionManifest build_construction(std::string_view name, const ConstructionParams& params);

/// Smallest mirrored-section length s with s (b-a) > a+b, at least `floor`.
int minimal_section(const Weights& w, int floor);

/// Integers (k_a, k_b), |k| <= 10, with k_a a + k_b b in (0, b-a), minimizing
/// |k_a| + |k_b|. Returns false when none exists.
bool find_gap_combination(const Weights& w, int& k_a, int& k_b);

struct ExtremalResult {
  int k = 0;
  Units max_value = 0;
  Units min_value = 0;
  std::uint64_t max_env = 0;
  std::uint64_t max_set = 0;
  std::uint64_t min_env = 0;
  std::uint64_t min_set = 0;
};

/// Max and min of d_S f over every environment and every |S| = k, k <= 4,
/// from a full passage table.
ExtremalResult extremal_search(std::span<const Units> f_table, int k);
ExtremalResult extremal_search(const Lattice& lat, int k);

}  // namespace fpp
