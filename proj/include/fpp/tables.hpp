#pragma once

#include <cstdint>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/passage_value.hpp"

namespace fpp {

/// f on every environment, indexed by bitmask. Subject to the enumeration cap.
std::vector<Units> passage_table(const Lattice& lat, int workers = 0);

/// Edge classification for every environment; bit j of each mask refers
/// to edge j.
struct ClassTable {
  std::size_t m = 0;
  std::vector<Units> f;
  std::vector<std::uint64_t> essential;
  std::vector<std::uint64_t> semi_essential;
  std::vector<std::uint64_t> influential;
  std::vector<std::uint64_t> very_influential;

  bool has(const std::vector<std::uint64_t>& set, std::uint64_t w, EdgeId j) const { return (set[w] >> j) & 1U; }
};

ClassTable class_table(const Lattice& lat, int workers = 0);

}  // namespace fpp
