#include <gtest/gtest.h>

#include "fpp/constructions.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/tables.hpp"

using namespace fpp;

namespace {

ConstructionParams weights(std::int64_t a, std::int64_t b) {
  ConstructionParams p;
  p.a = {a, 1};
  p.b = {b, 1};
  p.samples = 500;
  return p;
}

void expect_all_pass(const ConstructionManifest& m) {
  const auto checked = check_manifest(m, 1);
  for (std::size_t i = 0; i < checked.results.size(); ++i) {
    EXPECT_TRUE(checked.results[i].pass) << m.name << ": " << m.claims[i].label << " observed "
                                         << checked.results[i].observed;
  }
  EXPECT_TRUE(checked.all_pass);
}

}  // namespace

TEST(Constructions, EveryBuilderPassesAtDefaultWeights) {
  for (const auto& name : construction_names()) {
    if (name == "ab_general") continue;
    expect_all_pass(build_construction(name, weights(1, 2)));
  }
}

TEST(Constructions, ThreeFiveWeights) {
  for (const char* name : {"parasite", "nonparasite", "entangled", "reflected", "straight", "ab_general"}) {
    expect_all_pass(build_construction(name, weights(3, 5)));
  }
}

TEST(Constructions, ConstantEnvironments) {
  auto p = weights(1, 2);
  p.value = Letter::a;
  const auto ma = build_constant_env(p);
  EXPECT_EQ(passage_time_torus(Lattice(ma.spec), ma.env).units, 3);
  expect_all_pass(ma);
  p.value = Letter::b;
  expect_all_pass(build_constant_env(p));
}

TEST(Constructions, StraightLineValues) {
  auto p = weights(1, 2);
  p.length = 6;
  const auto one = build_straight_line(p);
  const Lattice lat(one.spec);
  EXPECT_EQ(passage_time(lat, one.env).units, 7);
  EXPECT_TRUE(classify_edge(lat, one.env, one.edge("i")).essential);
  EXPECT_EQ(geodesic_count(tight_subgraph(lat, one.env)), 1);

  p.marks = 2;
  const auto two = build_straight_line(p);
  std::vector<Units> values;
  for (const auto& c : two.claims) {
    if (c.kind == ClaimKind::passage_value) values.push_back(c.expected);
  }
  EXPECT_EQ(values, (std::vector<Units>{6, 7, 7, 8}));
  p.length = 1;
  EXPECT_THROW(build_straight_line(p), ConfigError);
}

TEST(Constructions, ReflectedPair) {
  const auto m = build_reflected_paths(weights(1, 2));
  const Lattice lat(m.spec);
  EXPECT_EQ(geodesic_count(tight_subgraph(lat, m.env)), 2);
  for (const char* role : {"i1", "i2"}) {
    const auto c = classify_edge(lat, m.env, m.edge(role));
    EXPECT_TRUE(c.influential);
    EXPECT_FALSE(c.essential);
    EXPECT_EQ(c.f_avoid, passage_time(lat, m.env));
  }
  EXPECT_THROW(m.edge("nope"), ContractViolation);
}

TEST(Constructions, SectionLength) {
  EXPECT_EQ(minimal_section(Weights({1, 1}, {2, 1}), 1), 4);
  EXPECT_EQ(minimal_section(Weights({3, 1}, {5, 1}), 1), 5);
  EXPECT_EQ(minimal_section(Weights({1, 1}, {2, 1}), 6), 6);
}

TEST(Constructions, NonparasiteGuard) {
  auto p = weights(1, 2);
  p.n = 4;
  EXPECT_THROW(build_nonparasite(p), ConfigError);
  p.n = 0;
  const auto m = build_nonparasite(p);
  EXPECT_EQ(m.spec.box_dims[0], 6);
  EXPECT_THROW(build_nonparasite(weights(1, 4)), ConfigError);  // b >= 3a
}

TEST(Constructions, ParasiteSize) {
  const auto m = build_parasite(weights(1, 2));
  EXPECT_EQ(m.spec.box_dims[0], 24);
  auto p = weights(1, 2);
  p.n = 23;
  EXPECT_THROW(build_parasite(p), ConfigError);
}

TEST(Constructions, GapCombination) {
  int ka = 0, kb = 0;
  EXPECT_FALSE(find_gap_combination(Weights({1, 1}, {2, 1}), ka, kb));
  EXPECT_THROW(build_ab_general(weights(1, 2)), ConfigError);
  ASSERT_TRUE(find_gap_combination(Weights({3, 1}, {5, 1}), ka, kb));
  EXPECT_EQ(ka * 3 + kb * 5, 1);
  const auto m = build_ab_general(weights(3, 5));
  const Lattice lat(m.spec);
  EXPECT_EQ(passage_time(lat, m.env).units, 13);
  const auto j = classify_edge(lat, m.env, m.edge("j"));
  EXPECT_TRUE(j.influential);
  EXPECT_FALSE(j.semi_essential);
  const auto jp = classify_edge(lat, m.env, m.edge("j_prime"));
  EXPECT_TRUE(jp.essential);
  EXPECT_FALSE(jp.very_influential);
}

TEST(Constructions, ParamsAndNames) {
  const auto p = parse_construction_params(R"({"a":"3","b":"5","n":7,"value":"b","samples":9})");
  EXPECT_EQ(p.a, (Rational{3, 1}));
  EXPECT_EQ(p.n, 7);
  EXPECT_EQ(p.value, Letter::b);
  EXPECT_EQ(p.samples, 9U);
  EXPECT_THROW(parse_construction_params("{"), ConfigError);
  EXPECT_THROW(parse_construction_params(R"({"value":"c"})"), ConfigError);
  EXPECT_THROW(build_construction("spiral", weights(1, 2)), ConfigError);
}

TEST(Constructions, ManifestJson) {
  const auto checked = check_manifest(build_construction("entangled", weights(1, 2)), 1);
  const auto json = checked.json();
  for (const char* key : {"\"env_hex\"", "\"designated\"", "\"claims\"", "\"observed\"", "\"pass\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
}

TEST(Extremal, PairsAndBox) {
  const Lattice parallel(LatticeSpec::parallel_pair());
  const auto r = extremal_search(parallel, 2);
  EXPECT_EQ(r.max_value, 1);
  EXPECT_EQ(r.min_value, 1);
  const Lattice box(LatticeSpec::box({2, 2}, {0, 0}, {2, 2}));
  const auto table = passage_table(box, 1);
  const auto r3 = extremal_search(table, 3);
  EXPECT_LE(r3.max_value, 1);
  EXPECT_GE(r3.min_value, -1);
  const auto r2 = extremal_search(table, 2);
  EXPECT_EQ(r2.max_value, 1);
  EXPECT_THROW(extremal_search(table, 5), ConfigError);
}
