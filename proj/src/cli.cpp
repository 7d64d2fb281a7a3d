#include "fpp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "fpp/calculus.hpp"
#include "fpp/constructions.hpp"
#include "fpp/estimators.hpp"
#include "fpp/fourier.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/lattice.hpp"
#include "fpp/tables.hpp"
#include "fpp/verify.hpp"

namespace fpp {

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
  std::string spec_path;
  std::string suite = "all";
  std::string quantity;
  EdgeId edge = 0;
  std::string set = "0,1";
  std::string mode;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string scan;
  int workers = 0;
  std::string out;
  std::string env;
  std::string name;
  std::string params;
  std::string a, b;
  int n = 0;
  std::optional<double> p;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<EdgeId> parse_edges(const std::string& text) {
  std::vector<EdgeId> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad edge id '" + item + "' in --set");
    }
  }
  return out;
}

LatticeSpec resolve_spec(const Options& o) {
  LatticeSpec spec = o.spec_path.empty() ? LatticeSpec::torus(2, 3) : parse_lattice_spec(read_file(o.spec_path));
  if (!o.a.empty()) spec.a = Rational::parse(o.a);
  if (!o.b.empty()) spec.b = Rational::parse(o.b);
  if (o.p) spec.p = *o.p;
  if (o.n != 0) {
    if (spec.mode != LatticeMode::torus) throw ConfigError("--n applies to torus specs");
    spec.n = o.n;
  }
  spec.validate();
  return spec;
}

// Everything that determines the output bytes; worker count and output
// path are excluded.
std::uint64_t config_hash(const std::string& command, const std::string& spec_json, const Options& o) {
  std::string text = command + "\n" + spec_json + "\n";
  for (const auto& part : {o.suite, o.quantity, std::to_string(o.edge), o.set, o.mode, std::to_string(o.samples),
                           std::to_string(o.seed), o.scan, o.env, o.name, o.params, o.a, o.b, std::to_string(o.n)}) {
    text += part + "\n";
  }
  return fnv1a(text);
}

ojson header(std::uint64_t hash, std::uint64_t seed) {
  ojson h;
  h["version"] = kVersion;
  h["config_hash"] = hex64(hash);
  h["seed"] = seed;
  return h;
}

std::string csv_header(std::uint64_t hash, std::uint64_t seed) {
  return std::string("# fpp version=") + kVersion + " config_hash=" + hex64(hash) + " seed=" + std::to_string(seed) +
         "\n";
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + o.out + "'");
  f << text;
}

Environment parse_env(const Lattice& lat, const std::string& hex) {
  return Environment::from_hex(static_cast<std::size_t>(lat.edge_count()), hex.empty() ? "0" : hex);
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.mode.empty() && parse_mode(o.mode) != Mode::exact) throw ConfigError("verify runs exact suites only");
  const auto spec = resolve_spec(o);
  const Lattice lat(spec);
  const auto spec_json = lattice_spec_json(spec);
  VerifyOptions vo;
  vo.seed = o.seed;
  vo.workers = o.workers;
  const auto reports = run_suite(lat, o.suite, vo);
  ojson j;
  j["header"] = header(config_hash("verify", spec_json, o), o.seed);
  j["command"] = "verify";
  j["suite"] = o.suite;
  j["spec"] = ojson::parse(spec_json);
  auto list = ojson::array();
  bool pass = true;
  std::string first_failure;
  for (const auto& r : reports) {
    list.push_back(ojson::parse(r.json()));
    if (!r.pass && pass) first_failure = r.identity;
    pass = pass && r.pass;
  }
  j["identities"] = list;
  j["pass"] = pass;
  emit(o, out, j.dump(2) + "\n");
  if (!pass) {
    err << "verify: first failing identity: " << first_failure << "\n";
    return exit_failure;
  }
  return exit_pass;
}

std::vector<std::string> split_quantities(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  const auto& names = quantity_names();
  for (const auto& q : out) {
    if (std::find(names.begin(), names.end(), q) == names.end()) {
      std::string valid;
      for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
      throw ConfigError("unknown quantity '" + q + "' (valid: " + valid + ")");
    }
  }
  if (out.empty()) throw ConfigError("--quantity is required");
  return out;
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream&) {
  const auto quantities = split_quantities(o.quantity);
  const auto spec = resolve_spec(o);
  const Mode mode = o.mode.empty() ? Mode::monte_carlo : parse_mode(o.mode);
  SamplingOptions so;
  so.samples = o.samples;
  so.seed = o.seed;
  so.workers = o.workers;
  QuantityRequest defaults;
  defaults.edge = o.edge;
  defaults.set = parse_edges(o.set);
  std::vector<ScanRow> rows;
  if (!o.scan.empty()) {
    int lo = 0, hi = 0;
    char extra = 0;
    if (std::sscanf(o.scan.c_str(), "%d:%d%c", &lo, &hi, &extra) != 2) {
      throw ConfigError("--scan-n expects lo:hi, got '" + o.scan + "'");
    }
    rows = scan_rows(spec, lo, hi, quantities, mode, so, defaults);
  } else {
    const Lattice lat(spec);
    const int n = spec.mode == LatticeMode::torus ? spec.n : 0;
    for (const auto& q : quantities) {
      QuantityRequest req = defaults;
      req.quantity = q;
      rows.push_back({n, estimate_quantity(lat, spec.p, req, mode, so), reference_value(spec, n, q)});
    }
  }
  emit(o, out, csv_header(config_hash("estimate", lattice_spec_json(spec), o), o.seed) + scan_csv(rows));
  return exit_pass;
}

int cmd_construct(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  if (o.name.empty()) throw ConfigError("--name is required");
  std::string params_text = o.params;
  if (params_text.starts_with("@")) params_text = read_file(params_text.substr(1));
  auto params = parse_construction_params(params_text);
  if (!o.a.empty()) params.a = Rational::parse(o.a);
  if (!o.b.empty()) params.b = Rational::parse(o.b);
  if (o.p) params.p = *o.p;
  if (o.n != 0) params.n = o.n;
  if (sub.count("--samples") > 0) params.samples = o.samples;
  if (sub.count("--seed") > 0) params.seed = o.seed;
  const auto manifest = build_construction(o.name, params);
  const auto checked = check_manifest(manifest, o.workers);
  ojson j;
  j["header"] = header(config_hash("construct", lattice_spec_json(manifest.spec), o), params.seed);
  const auto body = ojson::parse(checked.json());
  for (const auto& [key, value] : body.items()) j[key] = value;
  emit(o, out, j.dump(2) + "\n");
  if (!checked.all_pass) {
    for (std::size_t i = 0; i < checked.results.size(); ++i) {
      if (!checked.results[i].pass) {
        err << "construct: claim failed: " << manifest.claims[i].label << " (observed " << checked.results[i].observed
            << ")\n";
        break;
      }
    }
    return exit_failure;
  }
  return exit_pass;
}

int cmd_derivative(const Options& o, std::ostream& out, std::ostream&) {
  const auto spec = resolve_spec(o);
  const Lattice lat(spec);
  const auto& w = lat.weights();
  const auto env = parse_env(lat, o.env);
  const auto set = parse_edges(o.set);
  EdgeAssignment{set, std::vector<Letter>(set.size(), Letter::a)}.validate(static_cast<std::size_t>(lat.edge_count()));
  if (set.size() > static_cast<std::size_t>(kMaxDerivativeOrder)) throw ConfigError("derivative order above 20");
  const auto f = passage_function(lat);
  const Units d = derivative(f, env, set);
  const Units d_rec = derivative_recursive(f, env, set);
  ojson j;
  j["header"] = header(config_hash("derivative", lattice_spec_json(spec), o), o.seed);
  j["command"] = "derivative";
  j["env_hex"] = env.to_hex();
  j["set"] = set;
  j["f"] = w.format(f(env));
  j["derivative"] = w.format(d);
  j["derivative_recursive"] = w.format(d_rec);
  j["agree"] = d == d_rec;
  emit(o, out, j.dump(2) + "\n");
  return d == d_rec ? exit_pass : exit_failure;
}

int cmd_classify(const Options& o, std::ostream& out, std::ostream&) {
  if (o.env.empty()) throw ConfigError("--env is required");
  const auto spec = resolve_spec(o);
  const Lattice lat(spec);
  const auto env = parse_env(lat, o.env);
  const auto classes = classify_all(lat, env);
  std::string text = csv_header(config_hash("classify", lattice_spec_json(spec), o), o.seed);
  text += edge_class_csv_header() + "\n";
  for (const auto& c : classes) text += edge_class_csv_row(env, c, lat.weights()) + "\n";
  emit(o, out, text);
  return exit_pass;
}

int cmd_fourier(const Options& o, std::ostream& out, std::ostream&) {
  const auto spec = resolve_spec(o);
  const Lattice lat(spec);
  const auto f = to_real(passage_table(lat, o.workers), lat.weights());
  const auto ct = biased_transform(f, spec.p);
  emit(o, out, csv_header(config_hash("fourier", lattice_spec_json(spec), o), o.seed) + ct.csv());
  return exit_pass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo experiments on two-valued first-passage percolation", "fpp"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--spec", o.spec_path, "Lattice spec JSON file (default: torus n=3, d=2)");
    sub->add_option("--workers", o.workers, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", o.out, "Write the report to this file");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--a", o.a, "Weight a as a rational");
    sub->add_option("--b", o.b, "Weight b as a rational");
    sub->add_option("--p", o.p, "Probability of letter a");
    sub->add_option("--n", o.n, "Torus side length or construction size");
  };

  auto* verify = app.add_subcommand("verify", "Check identities by exhaustive enumeration");
  common(verify);
  verify->add_option("--suite", o.suite, "variance, ibp, bayes, inclusion, tilting, bounds or all");
  verify->add_option("--mode", o.mode, "Only exact is supported");

  auto* estimate = app.add_subcommand("estimate", "Estimate quantities exactly or by Monte Carlo");
  common(estimate);
  estimate->add_option("--quantity", o.quantity, "Comma separated quantity names");
  estimate->add_option("--edge", o.edge, "Edge for the per-edge quantities");
  estimate->add_option("--set", o.set, "Comma separated edge ids for derivative norms");
  estimate->add_option("--mode", o.mode, "exact or monte_carlo (default monte_carlo)");
  estimate->add_option("--samples", o.samples, "Monte Carlo sample count");
  estimate->add_option("--scan-n", o.scan, "Scan the size parameter over lo:hi");

  auto* construct = app.add_subcommand("construct", "Build and check a named environment construction");
  common(construct);
  construct->add_option("--name", o.name, "Construction name");
  construct->add_option("--params", o.params, "Parameters as JSON text or @file");
  construct->add_option("--samples", o.samples, "Samples for random sign checks");

  auto* deriv = app.add_subcommand("derivative", "Environment derivative of the passage time");
  common(deriv);
  deriv->add_option("--env", o.env, "Environment as a hex bitmask (bit set = b)");
  deriv->add_option("--set", o.set, "Comma separated edge ids");

  auto* classify = app.add_subcommand("classify", "Per-edge classification CSV for one environment");
  common(classify);
  classify->add_option("--env", o.env, "Environment as a hex bitmask (bit set = b)");

  auto* fourier = app.add_subcommand("fourier", "Biased Fourier coefficient CSV");
  common(fourier);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_pass : exit_usage;
  }

  try {
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (estimate->parsed()) return cmd_estimate(o, out, err);
    if (construct->parsed()) return cmd_construct(o, *construct, out, err);
    if (deriv->parsed()) return cmd_derivative(o, out, err);
    if (classify->parsed()) return cmd_classify(o, out, err);
    if (fourier->parsed()) return cmd_fourier(o, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace fpp
