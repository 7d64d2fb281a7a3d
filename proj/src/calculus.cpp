#include "fpp/calculus.hpp"

#include <algorithm>
#include <memory>

#include "fpp/geodesic.hpp"
#include "fpp/lattice.hpp"

namespace fpp {

Environment sigma(const Environment& env, EdgeId e, Letter value) {
  if (e < 0 || static_cast<std::size_t>(e) >= env.size()) {
    throw ContractViolation("edge id " + std::to_string(e) + " out of range");
  }
  Environment out = env;
  out.set(e, value);
  return out;
}

void EdgeAssignment::validate(std::size_t edge_count) const {
  if (edges.size() != values.size()) throw ContractViolation("assignment edges and values differ in length");
  auto sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ContractViolation("assignment repeats an edge id");
  }
  for (auto e : edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= edge_count) {
      throw ContractViolation("assignment edge id " + std::to_string(e) + " out of range");
    }
  }
}

std::uint64_t EdgeAssignment::edge_mask() const {
  std::uint64_t mask = 0;
  for (auto e : edges) mask |= std::uint64_t{1} << e;
  return mask;
}

std::uint64_t EdgeAssignment::value_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (values[k] == Letter::b) mask |= std::uint64_t{1} << edges[k];
  }
  return mask;
}

Environment sigma_vec(const Environment& env, const EdgeAssignment& assign) {
  assign.validate(env.size());
  Environment out = env;
  for (std::size_t k = 0; k < assign.edges.size(); ++k) out.set(assign.edges[k], assign.values[k]);
  return out;
}

bool in_cylinder(const Environment& env, const EdgeAssignment& assign) {
  assign.validate(env.size());
  for (std::size_t k = 0; k < assign.edges.size(); ++k) {
    if (env.letter(assign.edges[k]) != assign.values[k]) return false;
  }
  return true;
}

EnvFunction passage_function(const Lattice& lat) {
  auto engine = std::make_shared<PathEngine>(lat);
  return [engine](const Environment& env) {
    engine->load(env);
    return engine->passage().units;
  };
}

namespace {

void check_order(const Environment& env, std::span<const EdgeId> set) {
  if (set.empty()) throw ContractViolation("derivative needs a non-empty edge set");
  if (set.size() > kMaxDerivativeOrder) {
    throw ContractViolation("derivative order " + std::to_string(set.size()) + " exceeds the limit of " +
                            std::to_string(kMaxDerivativeOrder));
  }
  for (auto e : set) {
    if (e < 0 || static_cast<std::size_t>(e) >= env.size()) throw ContractViolation("edge id out of range");
  }
}

void check_set(const Environment& env, std::span<const EdgeId> set) {
  if (set.empty()) throw ContractViolation("derivative needs a non-empty edge set");
  if (set.size() > kMaxDerivativeOrder) {
    throw ContractViolation("derivative order " + std::to_string(set.size()) + " exceeds the limit of " +
                            std::to_string(kMaxDerivativeOrder));
  }
  EdgeAssignment probe{{set.begin(), set.end()}, std::vector<Letter>(set.size(), Letter::a)};
  probe.validate(env.size());
}

}  // namespace

Units derivative(const EnvFunction& f, const Environment& env, std::span<const EdgeId> set) {
  check_set(env, set);
  const auto k = set.size();
  Units total = 0;
  Environment point = env;
  for (std::uint64_t theta = 0; theta < (std::uint64_t{1} << k); ++theta) {
    for (std::size_t i = 0; i < k; ++i) point.set(set[i], ((theta >> i) & 1) ? Letter::b : Letter::a);
    const Units value = f(point);
    const bool negative = ((k - static_cast<std::size_t>(__builtin_popcountll(theta))) & 1) != 0;
    total += negative ? -value : value;
  }
  return total;
}

Units derivative_recursive(const EnvFunction& f, const Environment& env, std::span<const EdgeId> order) {
  // Repeats are allowed here: differencing twice in one edge gives zero.
  check_order(env, order);
  EnvFunction current = f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const EdgeId e = *it;
    current = [inner = std::move(current), e](const Environment& w) {
      return inner(sigma(w, e, Letter::b)) - inner(sigma(w, e, Letter::a));
    };
  }
  return current(env);
}

}  // namespace fpp
