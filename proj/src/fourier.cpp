#include "fpp/fourier.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "fpp/calculus.hpp"

namespace fpp {

namespace {

// p^(m-k) (1-p)^k indexed by the number k of b-edges.
std::vector<double> weight_by_count(std::size_t m, double p) {
  std::vector<double> w(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    w[k] = std::pow(p, static_cast<double>(m - k)) * std::pow(1.0 - p, static_cast<double>(k));
  }
  return w;
}

// r_S(w) = r_a^(#a in S) r_b^(#b in S).
struct BasisPowers {
  BasisPowers(std::size_t m, double p) : a(m + 1), b(m + 1) {
    const double ra = -std::sqrt((1.0 - p) / p);
    const double rb = std::sqrt(p / (1.0 - p));
    a[0] = b[0] = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
      a[k] = a[k - 1] * ra;
      b[k] = b[k - 1] * rb;
    }
  }
  double operator()(std::uint64_t w, std::uint64_t s) const {
    const auto nb = static_cast<std::size_t>(std::popcount(w & s));
    const auto ns = static_cast<std::size_t>(std::popcount(s));
    return a[ns - nb] * b[nb];
  }
  std::vector<double> a, b;
};

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0,1)");
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

}  // namespace

double r_value(const Environment& env, std::uint64_t set_mask, double p) {
  check_p(p);
  double r = 1.0;
  const double ra = -std::sqrt((1.0 - p) / p);
  const double rb = std::sqrt(p / (1.0 - p));
  for (std::size_t i = 0; i < env.size() && i < 64; ++i) {
    if ((set_mask >> i) & 1U) r *= env.is_b(static_cast<EdgeId>(i)) ? rb : ra;
  }
  return r;
}

double mask_probability(std::uint64_t mask, std::size_t m, double p) {
  const auto nb = static_cast<double>(std::popcount(mask));
  return std::pow(p, static_cast<double>(m) - nb) * std::pow(1.0 - p, nb);
}

std::size_t table_edges(std::size_t size) {
  if (size == 0 || (size & (size - 1)) != 0) {
    throw ContractViolation("table size " + std::to_string(size) + " is not a power of two");
  }
  const auto m = static_cast<std::size_t>(std::countr_zero(size));
  if (m > kMaxTableEdges) {
    throw ConfigError("subset tables are limited to m <= 26 edges (m=" + std::to_string(m) + " needs " +
                      std::to_string((size * 8) >> 20) + " MiB per table)");
  }
  return m;
}

std::vector<double> to_real(std::span<const Units> table, const Weights& w) {
  std::vector<double> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = w.to_double(table[i]);
  return out;
}

CoefficientTable biased_transform(std::span<const double> f, double p) {
  check_p(p);
  CoefficientTable ct;
  ct.m = table_edges(f.size());
  ct.p = p;
  ct.coeffs.assign(f.begin(), f.end());
  const double q = 1.0 - p;
  const double s = std::sqrt(p * q);
  auto& x = ct.coeffs;
  for (std::uint64_t bit = 1; bit < x.size(); bit <<= 1) {
    for (std::uint64_t w = 0; w < x.size(); ++w) {
      if (w & bit) continue;
      const double x0 = x[w];
      const double x1 = x[w | bit];
      x[w] = p * x0 + q * x1;
      x[w | bit] = s * (x1 - x0);
    }
  }
  return ct;
}

std::vector<double> inverse_transform(const CoefficientTable& ct) {
  check_p(ct.p);
  table_edges(ct.coeffs.size());
  const double ra = -std::sqrt((1.0 - ct.p) / ct.p);
  const double rb = std::sqrt(ct.p / (1.0 - ct.p));
  std::vector<double> x = ct.coeffs;
  for (std::uint64_t bit = 1; bit < x.size(); bit <<= 1) {
    for (std::uint64_t w = 0; w < x.size(); ++w) {
      if (w & bit) continue;
      const double c0 = x[w];
      const double c1 = x[w | bit];
      x[w] = c0 + ra * c1;
      x[w | bit] = c0 + rb * c1;
    }
  }
  return x;
}

std::vector<double> expected_derivatives(std::span<const double> f, double p) {
  check_p(p);
  table_edges(f.size());
  const double q = 1.0 - p;
  std::vector<double> x(f.begin(), f.end());
  for (std::uint64_t bit = 1; bit < x.size(); bit <<= 1) {
    for (std::uint64_t w = 0; w < x.size(); ++w) {
      if (w & bit) continue;
      const double x0 = x[w];
      const double x1 = x[w | bit];
      x[w] = p * x0 + q * x1;
      x[w | bit] = x1 - x0;
    }
  }
  return x;
}

std::string CoefficientTable::csv() const {
  std::string out = "subset_hex,cardinality,coefficient\n";
  for (std::uint64_t s = 0; s < coeffs.size(); ++s) {
    out += Environment::from_mask(m, s).to_hex();
    out += ',';
    out += std::to_string(std::popcount(s));
    out += ',';
    out += format_double(coeffs[s]);
    out += '\n';
  }
  return out;
}

IdentityReport make_report(std::string identity, double lhs, double rhs, double tolerance) {
  IdentityReport r;
  r.identity = std::move(identity);
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_gap = std::abs(lhs - rhs);
  r.tolerance = tolerance;
  r.pass = r.abs_gap <= tolerance;
  return r;
}

std::string IdentityReport::json() const {
  nlohmann::ordered_json j;
  j["identity"] = identity;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["abs_gap"] = abs_gap;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  return j.dump();
}

IdentityReport variance_check(std::span<const double> f, double p) {
  check_p(p);
  const auto m = table_edges(f.size());
  const auto w = weight_by_count(m, p);
  double mean = 0;
  for (std::uint64_t i = 0; i < f.size(); ++i) mean += w[static_cast<std::size_t>(std::popcount(i))] * f[i];
  double var = 0;
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - mean;
    var += w[static_cast<std::size_t>(std::popcount(i))] * d * d;
  }
  const auto ed = expected_derivatives(f, p);
  std::vector<double> level(m + 1, 1.0);
  for (std::size_t k = 1; k <= m; ++k) level[k] = level[k - 1] * p * (1.0 - p);
  double from_derivatives = 0;
  for (std::uint64_t s = 1; s < ed.size(); ++s) {
    from_derivatives += level[static_cast<std::size_t>(std::popcount(s))] * ed[s] * ed[s];
  }
  return make_report("variance", var, from_derivatives, 1e-10 * std::max(1.0, std::abs(var)));
}

IdentityReport integration_by_parts_check(std::span<const double> f, double p, std::uint64_t t_mask,
                                          std::uint64_t s_mask) {
  check_p(p);
  const auto m = table_edges(f.size());
  if ((t_mask & ~s_mask) != 0) throw ContractViolation("integration by parts needs T to be a subset of S");
  if (s_mask >= f.size()) throw ContractViolation("edge set exceeds table width");
  const auto w = weight_by_count(m, p);
  const BasisPowers r(m, p);
  double lhs = 0;
  double norm2 = 0;
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    const double pw = w[static_cast<std::size_t>(std::popcount(i))];
    lhs += pw * f[i] * r(i, s_mask);
    norm2 += pw * f[i] * f[i];
  }
  std::vector<double> d;
  std::span<const double> g = f;
  if (t_mask != 0) {
    d = derivative_table<double>(f, t_mask);
    g = d;
  }
  const std::uint64_t rest = s_mask & ~t_mask;
  double inner = 0;
  for (std::uint64_t i = 0; i < g.size(); ++i) {
    inner += w[static_cast<std::size_t>(std::popcount(i))] * g[i] * r(i, rest);
  }
  const double rhs = std::pow(std::sqrt(p * (1.0 - p)), std::popcount(t_mask)) * inner;
  const double tol = 1e-10 * std::max({std::abs(lhs), std::abs(rhs), std::sqrt(norm2)});
  return make_report("integration_by_parts", lhs, rhs, tol);
}

IdentityReport bayes_check(std::span<const double> f, double p, EdgeId i) {
  check_p(p);
  const auto m = table_edges(f.size());
  if (i < 0 || static_cast<std::size_t>(i) >= m) throw ContractViolation("edge id out of range");
  const auto w = weight_by_count(m, p);
  const std::uint64_t bit = std::uint64_t{1} << i;
  double lhs = 0;
  double forced_a = 0;
  double forced_b = 0;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    const double pw = w[static_cast<std::size_t>(std::popcount(x))];
    lhs += pw * f[x];
    forced_a += pw * f[x & ~bit];
    forced_b += pw * f[x | bit];
  }
  const double rhs = p * forced_a + (1.0 - p) * forced_b;
  return make_report("bayes", lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
}

DerivativeNorms derivative_norms_table(std::span<const double> f, double p, std::uint64_t set_mask) {
  check_p(p);
  const auto m = table_edges(f.size());
  if (set_mask == 0 || set_mask >= f.size()) throw ContractViolation("derivative set out of range");
  const auto k = static_cast<std::size_t>(std::popcount(set_mask));
  const auto w = weight_by_count(m - k, p);
  double scale = 0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  const double zero = 1e-9 * (1.0 + scale);
  DerivativeNorms out;
  out.set_mask = set_mask;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    if (x & set_mask) continue;
    const double d = derivative_at<double>(f, x, set_mask);
    const double pw = w[static_cast<std::size_t>(std::popcount(x))];
    out.l1 += pw * std::abs(d);
    out.l2_squared += pw * d * d;
    if (std::abs(d) > zero) out.p_nonzero += pw;
  }
  if (out.l1 > 0) {
    const double lg = std::log(std::sqrt(out.l2_squared) / out.l1);
    out.ratio_term = out.l2_squared / (1.0 + std::pow(lg, static_cast<double>(k)));
  }
  return out;
}

SplitReport lower_higher_split(const CoefficientTable& ct, std::span<const double> f, int k, std::size_t max_sets) {
  if (k < 1) throw ContractViolation("split order k must be >= 1");
  if (f.size() != ct.coeffs.size()) throw ContractViolation("table size mismatch");
  SplitReport out;
  out.k = k;
  out.mean_squared = ct.coeffs[0] * ct.coeffs[0];
  for (std::uint64_t s = 1; s < ct.coeffs.size(); ++s) {
    const double c2 = ct.coeffs[s] * ct.coeffs[s];
    if (std::popcount(s) < k) {
      out.lower += c2;
    } else {
      out.higher += c2;
    }
  }
  const auto w = weight_by_count(ct.m, ct.p);
  for (std::uint64_t x = 0; x < f.size(); ++x) out.second_moment += w[static_cast<std::size_t>(std::popcount(x))] * f[x] * f[x];
  out.parseval = make_report("parseval", out.lower + out.higher + out.mean_squared, out.second_moment,
                             1e-10 * std::max(1.0, out.second_moment));

  if (static_cast<std::size_t>(k) <= ct.m) {
    // C(m, k) without overflow for the sizes allowed here.
    double sets = 1;
    for (int i = 0; i < k; ++i) sets = sets * static_cast<double>(ct.m - static_cast<std::size_t>(i)) / (i + 1);
    if (sets <= static_cast<double>(max_sets)) {
      std::uint64_t s = (std::uint64_t{1} << k) - 1;
      while (s < ct.coeffs.size()) {
        out.per_set.push_back(derivative_norms_table(f, ct.p, s));
        out.ratio_sum += out.per_set.back().ratio_term;
        // Next subset with the same popcount.
        const std::uint64_t c = s & (~s + 1);
        const std::uint64_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
      }
    }
  }
  return out;
}

std::string SplitReport::json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["lower"] = lower;
  j["higher"] = higher;
  j["mean_squared"] = mean_squared;
  j["second_moment"] = second_moment;
  j["ratio_sum"] = ratio_sum;
  j["parseval"] = nlohmann::ordered_json::parse(parseval.json());
  auto sets = nlohmann::ordered_json::array();
  for (const auto& n : per_set) {
    sets.push_back({{"set_mask", n.set_mask},
                    {"l1", n.l1},
                    {"l2_squared", n.l2_squared},
                    {"p_nonzero", n.p_nonzero},
                    {"ratio_term", n.ratio_term}});
  }
  j["per_set"] = sets;
  return j.dump();
}

}  // namespace fpp
