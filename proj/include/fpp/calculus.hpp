#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/passage_value.hpp"

namespace fpp {

class Lattice;

/// Force edge `e` to `value`, leaving every other edge unchanged.
Environment sigma(const Environment& env, EdgeId e, Letter value);

/// A partial assignment: distinct edges and one letter per edge. Also
/// describes the cylinder event "edges[k] carries values[k] for all k".
struct EdgeAssignment {
  std::vector<EdgeId> edges;
  std::vector<Letter> values;

  /// Throws ContractViolation on duplicates, length mismatch or ids
  /// outside [0, edge_count).
  void validate(std::size_t edge_count) const;
  std::uint64_t edge_mask() const;
  std::uint64_t value_mask() const;  // b-bits of the assignment
};

Environment sigma_vec(const Environment& env, const EdgeAssignment& assign);
bool in_cylinder(const Environment& env, const EdgeAssignment& assign);

/// Scaled-integer valued function on environments.
using EnvFunction = std::function<Units(const Environment&)>;

/// f evaluated by shortest paths on `lat`. The returned function owns its
/// own workspace and must not be shared across threads.
EnvFunction passage_function(const Lattice& lat);

inline constexpr std::size_t kMaxDerivativeOrder = 20;

/// Inclusion-exclusion over the 2^|S| forced assignments of S.
Units derivative(const EnvFunction& f, const Environment& env, std::span<const EdgeId> set);

/// Applies one first difference per edge, innermost first, as a chain of
/// closures. Any ordering of `order` yields the same value; a repeated
/// edge makes the result zero.
Units derivative_recursive(const EnvFunction& f, const Environment& env, std::span<const EdgeId> order);

/// Per-environment derivative over a full table indexed by bitmask.
/// out[w] = sum over theta subset of S of (-1)^(|S|-|theta|) table[(w & ~S) | theta].
template <class T>
std::vector<T> derivative_table(std::span<const T> table, std::uint64_t set_mask) {
  const auto size = table.size();
  if (size == 0 || (size & (size - 1)) != 0) throw ContractViolation("table size must be a power of two");
  if (set_mask == 0) throw ContractViolation("derivative needs a non-empty edge set");
  if (set_mask >= size) throw ContractViolation("edge set exceeds table width");
  std::vector<T> out(table.begin(), table.end());
  for (std::uint64_t bit = 1; bit < size; bit <<= 1) {
    if ((set_mask & bit) == 0) continue;
    for (std::uint64_t w = 0; w < size; ++w) {
      if (w & bit) continue;
      const T diff = out[w | bit] - out[w];
      out[w] = diff;
      out[w | bit] = diff;
    }
  }
  return out;
}

/// Single value of the derivative at `w`, by 2^|S| table lookups.
template <class T>
T derivative_at(std::span<const T> table, std::uint64_t w, std::uint64_t set_mask) {
  const std::uint64_t base = w & ~set_mask;
  const int order = __builtin_popcountll(set_mask);
  T total{};
  // Walk every subset theta of set_mask.
  std::uint64_t theta = 0;
  do {
    const bool negative = ((order - __builtin_popcountll(theta)) & 1) != 0;
    const T value = table[base | theta];
    total = negative ? total - value : total + value;
    theta = (theta - set_mask) & set_mask;
  } while (theta != 0);
  return total;
}

}  // namespace fpp
