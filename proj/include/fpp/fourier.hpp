#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/passage_value.hpp"

namespace fpp {

/// r_S(w): product over i in S of -sqrt((1-p)/p) when w_i = a and
/// sqrt(p/(1-p)) when w_i = b.
double r_value(const Environment& env, std::uint64_t set_mask, double p);

/// Coefficients a_S = E[f r_S] indexed by subset bitmask.
struct CoefficientTable {
  std::size_t m = 0;
  double p = 0.5;
  std::vector<double> coeffs;

  double at(std::uint64_t set_mask) const { return coeffs[set_mask]; }
  /// subset_hex,cardinality,coefficient
  std::string csv() const;
};

inline constexpr std::size_t kMaxTableEdges = 26;

/// Checks the table length is 2^m with m <= 26 and returns m.
std::size_t table_edges(std::size_t table_size);

/// Scaled integers to real values (units / scale).
std::vector<double> to_real(std::span<const Units> table, const Weights& w);

/// Per-coordinate butterfly, O(m 2^m).
CoefficientTable biased_transform(std::span<const double> f, double p);
std::vector<double> inverse_transform(const CoefficientTable& ct);

/// E[d_M f] for every subset M (entry 0 is E[f]).
std::vector<double> expected_derivatives(std::span<const double> f, double p);

/// p^(#a) (1-p)^(#b) for a bitmask over m edges.
double mask_probability(std::uint64_t mask, std::size_t m, double p);

struct IdentityReport {
  std::string identity;
  double lhs = 0;
  double rhs = 0;
  double abs_gap = 0;
  double tolerance = 0;
  bool pass = false;

  std::string json() const;
};

IdentityReport make_report(std::string identity, double lhs, double rhs, double tolerance);

/// var(f) directly against the sum over non-empty M of (p(1-p))^|M| E[d_M f]^2.
/// Tolerance 1e-10 max(1, var).
IdentityReport variance_check(std::span<const double> f, double p);

/// E[f r_S] against sqrt(p(1-p))^|T| E[(d_T f) r_{S\T}]. Requires T subset of S.
/// Tolerance 1e-10 max(|lhs|, |rhs|, ||f||_2).
IdentityReport integration_by_parts_check(std::span<const double> f, double p, std::uint64_t t_mask,
                                          std::uint64_t s_mask);

/// E[phi] against p E[phi o sigma_i^a] + (1-p) E[phi o sigma_i^b]. Tolerance 1e-12 max(1, |lhs|).
IdentityReport bayes_check(std::span<const double> f, double p, EdgeId i);

/// Norms of d_M f for one subset M.
struct DerivativeNorms {
  std::uint64_t set_mask = 0;
  double l1 = 0;
  double l2_squared = 0;
  double p_nonzero = 0;
  /// ||d_M f||_2^2 / (1 + log(||d_M f||_2 / ||d_M f||_1)^k); zero when d_M f vanishes.
  double ratio_term = 0;
};

/// E over w of |d_M f|, (d_M f)^2 and 1{d_M f != 0}, touching each of the
/// 2^(m-|M|) classes once.
DerivativeNorms derivative_norms_table(std::span<const double> f, double p, std::uint64_t set_mask);

struct SplitReport {
  int k = 0;
  double lower = 0;   // sum over 1 <= |S| < k of a_S^2
  double higher = 0;  // sum over |S| >= k of a_S^2
  double mean_squared = 0;
  double second_moment = 0;
  double ratio_sum = 0;  // sum of ratio terms over |M| = k
  std::vector<DerivativeNorms> per_set;
  IdentityReport parseval;

  std::string json() const;
};

/// Per-set norms are included when C(m,k) <= max_sets.
SplitReport lower_higher_split(const CoefficientTable& ct, std::span<const double> f, int k,
                               std::size_t max_sets = 5000);

}  // namespace fpp
