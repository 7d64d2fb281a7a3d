#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/fourier.hpp"
#include "fpp/lattice.hpp"
#include "fpp/tables.hpp"

namespace fpp {

struct VerifyOptions {
  std::uint64_t seed = 1;
  int workers = 0;
  int ibp_pairs = 50;
  int random_events = 50;
};

/// variance, ibp, bayes, inclusion, tilting, bounds, all.
const std::vector<std::string>& suite_names();

/// Set inclusions and flip identities between the four edge classes, as
/// violation counts (lhs) against zero (rhs). The equivalence of influential
/// and very influential is added when no integer combination of a and b
/// falls strictly between 0 and b - a.
std::vector<IdentityReport> inclusion_suite(const ClassTable& table, const Weights& w);

/// Collapses many checks of one identity into a single report carrying the
/// worst gap; passes only when every input passes.
IdentityReport summarize(std::string identity, const std::vector<IdentityReport>& reports);

/// Exact enumeration of every identity in `suite` at the spec's p.
std::vector<IdentityReport> run_suite(const Lattice& lat, std::string_view suite, const VerifyOptions& opts = {});

}  // namespace fpp
