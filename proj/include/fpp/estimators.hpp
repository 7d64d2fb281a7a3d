#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fpp/calculus.hpp"
#include "fpp/environment.hpp"
#include "fpp/fourier.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/lattice.hpp"
#include "fpp/tables.hpp"

namespace fpp {

enum class Mode { exact, monte_carlo };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct SamplingOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct EstimateReport {
  std::string quantity;
  Mode mode = Mode::exact;
  double estimate = 0;
  double std_error = 0;
  std::uint64_t samples = 0;  // enumeration size in exact mode
  std::uint64_t seed = 0;
  std::uint64_t spec_hash = 0;

  std::string json() const;
};

/// Indicator or integer statistic evaluated with a per-worker engine that
/// is already bound to the lattice (but not loaded).
using EnvEvent = std::function<bool(PathEngine&, const Environment&)>;
using EnvStatistic = std::function<Units(PathEngine&, const Environment&)>;

/// Exact: sum of prob_of over satisfying environments. Monte Carlo: mean
/// indicator over samples (seed, 0..N-1) with SE sqrt(p(1-p)/N).
EstimateReport event_probability(const Lattice& lat, double p, const EnvEvent& event, Mode mode,
                                 const SamplingOptions& opts = {}, std::string name = "event");

/// E[X] for an integer-valued X; `scale` divides the result (use the
/// weight scale for passage-time units, 1 for counts).
EstimateReport expectation(const Lattice& lat, double p, const EnvStatistic& stat, Mode mode,
                           const SamplingOptions& opts, std::string name, double scale);

/// Names accepted by estimate_quantity.
const std::vector<std::string>& quantity_names();

struct QuantityRequest {
  std::string quantity;
  EdgeId edge = 0;
  std::vector<EdgeId> set{0, 1};
};

/// Throws ConfigError listing valid names for an unknown quantity.
EstimateReport estimate_quantity(const Lattice& lat, double p, const QuantityRequest& request, Mode mode,
                                 const SamplingOptions& opts = {});

/// Number of unordered pairs {i,j} with d_i d_j f(w) != 0.
int convoluted_pairs(PathEngine& engine, const Environment& env);
int convoluted_pairs(std::span<const Units> f_table, std::uint64_t w);

struct N2Report {
  EstimateReport n2;
  EstimateReport variance;
  double scaled_ratio = 0;  // var (log n)^2 / E[N2] on the torus; 0 otherwise

  std::string json() const;
};

N2Report expected_N2(const Lattice& lat, double p, Mode mode, const SamplingOptions& opts = {});

struct NormsReport {
  std::vector<EdgeId> set;
  EstimateReport l1;
  EstimateReport l2_squared;
  EstimateReport p_nonzero;
  double l2 = 0;
  bool cauchy_schwarz_ok = false;  // l1^2 <= l2^2 P(!= 0) + 1e-10

  std::string json() const;
};

/// Requires 1 <= |M| <= 6.
NormsReport derivative_norms(const Lattice& lat, double p, std::span<const EdgeId> set, Mode mode,
                             const SamplingOptions& opts = {});

struct InfluenceBoundReport {
  EdgeId edge = 0;
  double p_influential = 0;
  double p_essential = 0;
  double bound = 0;  // P(E_j) / p
  bool ratio_ok = false;

  std::string json() const;
};

/// Exact enumeration. P(A_j) <= P(E_j)/p + 1e-12.
InfluenceBoundReport check_influence_bound(const Lattice& lat, double p, EdgeId edge);
InfluenceBoundReport check_influence_bound(const ClassTable& table, double p, EdgeId edge);

struct TorusBoundReport {
  Mode mode = Mode::exact;
  std::vector<double> p_essential;
  std::vector<double> p_influential;
  std::vector<double> se_essential;  // zero in exact mode
  std::vector<double> se_influential;
  double reference = 0;  // b / (a n^(d-1))
  double max_spread = 0;
  bool symmetric_all = false;      // every pair of edges agrees
  bool symmetric_by_axis = false;  // edges of the same axis agree
  bool essential_bound_ok = false;
  bool chain_ok = false;  // P(A_j) <= P(E_j)/p <= b/(a p n^(d-1)) for every j

  bool pass() const { return symmetric_all && essential_bound_ok && chain_ok; }
  std::string json() const;
};

/// Torus only; ContractViolation otherwise. Exact tolerance 1e-12, Monte
/// Carlo bands of 3 standard errors.
TorusBoundReport check_torus_bound(const Lattice& lat, double p, Mode mode, const SamplingOptions& opts = {});
TorusBoundReport check_torus_bound(const Lattice& lat, const ClassTable& table, double p);

/// Set-valued events over an enumerated space: one byte per bitmask.
using EventSet = std::vector<std::uint8_t>;

double set_probability(const EventSet& set, std::size_t m, double p);

/// P(A and I_{v,beta}) against P(beta)/P(alpha) P(sigma_v^alpha(A and I_{v,beta})),
/// with the image set built explicitly. Tolerance 1e-12.
IdentityReport tilting_check(std::size_t m, double p, const EventSet& event, const EdgeAssignment& v_beta,
                             std::span<const Letter> alpha);

/// P({d_j f o sigma_v^gamma != 0} and I_{v,delta}) <= P(delta)/P(gamma) P(A_j and I_{v,gamma}) + 1e-12.
/// `pass` reports the inequality; lhs and rhs are the two sides.
IdentityReport multiple_flips_check(std::span<const Units> f_table, double p, EdgeId j, const EdgeAssignment& v_gamma,
                                    std::span<const Letter> delta);

/// One CSV row per (n, quantity). Torus templates vary n; box templates
/// use the centred box of half-width 2n.
std::string scan_n(const LatticeSpec& base, int n_lo, int n_hi, std::span<const std::string> quantities, Mode mode,
                   const SamplingOptions& opts, const QuantityRequest& defaults = {});

struct ScanRow {
  int n = 0;
  EstimateReport report;
  double reference = 0;
};
/// Reference curve of a scan row: b/(a p n^(d-1)) for the P_* quantities,
/// 1/(log n)^2 otherwise; 0 when n < 2.
double reference_value(const LatticeSpec& spec, int n, std::string_view quantity);
std::vector<ScanRow> scan_rows(const LatticeSpec& base, int n_lo, int n_hi, std::span<const std::string> quantities,
                               Mode mode, const SamplingOptions& opts, const QuantityRequest& defaults = {});
std::string scan_csv(std::span<const ScanRow> rows);

/// Fitted diagnostic: min over the family of E[d_S f] scaled by
/// n^((kd-1)/2). A fit from a single instance, not a certified constant.
struct EasyBoundFit {
  double min_expectation = 0;
  std::uint64_t argmin = 0;
  double exponent = 0;
  double fitted_constant = 0;
};
EasyBoundFit easy_bound_fit(std::span<const Units> f_table, const Weights& w, double p, int n, int d,
                            std::span<const std::uint64_t> family);

}  // namespace fpp
