#include "fpp/tables.hpp"

#include "fpp/geodesic.hpp"
#include "fpp/parallel.hpp"

namespace fpp {

namespace {
constexpr std::uint64_t kChunk = 4096;
}

std::vector<Units> passage_table(const Lattice& lat, int workers) {
  const auto states = checked_state_count(lat);
  const auto m = static_cast<std::size_t>(lat.edge_count());
  std::vector<Units> table(states);
  for_each_chunk(states, kChunk, workers, [&](std::uint64_t, std::uint64_t first, std::uint64_t last) {
    PathEngine engine(lat);
    for (std::uint64_t w = first; w < last; ++w) {
      engine.load(Environment::from_mask(m, w));
      table[w] = engine.passage().units;
    }
  });
  return table;
}

ClassTable class_table(const Lattice& lat, int workers) {
  const auto states = checked_state_count(lat);
  const auto m = static_cast<std::size_t>(lat.edge_count());
  if (m > 64) throw ContractViolation("class tables need at most 64 edges");
  ClassTable t;
  t.m = m;
  t.f.resize(states);
  t.essential.resize(states);
  t.semi_essential.resize(states);
  t.influential.resize(states);
  t.very_influential.resize(states);
  for_each_chunk(states, kChunk, workers, [&](std::uint64_t, std::uint64_t first, std::uint64_t last) {
    PathEngine engine(lat);
    for (std::uint64_t w = first; w < last; ++w) {
      engine.load(Environment::from_mask(m, w));
      t.f[w] = engine.passage().units;
      std::uint64_t ess = 0, semi = 0, infl = 0, very = 0;
      for (EdgeId j = 0; j < static_cast<EdgeId>(m); ++j) {
        const auto c = engine.classify(j);
        const auto bit = std::uint64_t{1} << j;
        if (c.essential) ess |= bit;
        if (c.semi_essential) semi |= bit;
        if (c.influential) infl |= bit;
        if (c.very_influential) very |= bit;
      }
      t.essential[w] = ess;
      t.semi_essential[w] = semi;
      t.influential[w] = infl;
      t.very_influential[w] = very;
    }
  });
  return t;
}

}  // namespace fpp
