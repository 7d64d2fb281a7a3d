#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "fpp/environment.hpp"
#include "fpp/lattice.hpp"
#include "fpp/passage_value.hpp"

using namespace fpp;

TEST(Rational, ParsesAndReduces) {
  EXPECT_EQ(Rational::parse("6/4"), (Rational{3, 2}));
  EXPECT_EQ(Rational::parse("5"), (Rational{5, 1}));
  EXPECT_THROW(Rational::parse("1/0"), ConfigError);
  EXPECT_THROW(Rational::parse("x"), ConfigError);
  EXPECT_LT(Rational::parse("1/3"), Rational::parse("1/2"));
}

TEST(Weights, CommonScaleKeepsTiesExact) {
  const Weights w(Rational{1, 3}, Rational{1, 2});
  EXPECT_EQ(w.scale(), 6);
  EXPECT_EQ(w.a_units(), 2);
  EXPECT_EQ(w.b_units(), 3);
  // 3a == 2b exactly, although the compositions differ.
  EXPECT_EQ(PassageValue::of(3, 0, w), PassageValue::of(0, 2, w));
  EXPECT_EQ(w.format(3), "1/2");
  EXPECT_THROW(Weights(Rational{2, 1}, Rational{2, 1}), ConfigError);
}

TEST(PassageValue, InfinityAbsorbs) {
  const Weights w;
  auto v = PassageValue::of(1, 1, w);
  v += PassageValue::infinity();
  EXPECT_TRUE(v.is_infinite());
  EXPECT_LT(PassageValue::of(5, 0, w), PassageValue::infinity());
}

TEST(Environment, HexRoundTrip) {
  const auto env = Environment::from_hex(12, "ff0");
  EXPECT_EQ(env.mask(), 0xff0U);
  EXPECT_EQ(env.to_hex(), "ff0");
  EXPECT_EQ(env.count_b(), 8U);
  EXPECT_THROW(Environment::from_hex(12, "1000"), ConfigError);
  Environment big(100);
  big.set(99, Letter::b);
  EXPECT_EQ(Environment::from_hex(100, big.to_hex()), big);
}

TEST(Environment, Probability) {
  EXPECT_DOUBLE_EQ(prob_of(Environment(2), 0.5), 0.25);
  EXPECT_DOUBLE_EQ(prob_of(Environment::from_mask(3, 0b010), 0.25), 0.25 * 0.25 * 0.75);
}

TEST(Lattice, Counts) {
  const Lattice box(LatticeSpec::box({2, 2}, {0, 0}, {2, 2}));
  EXPECT_EQ(box.vertex_count(), 9);
  EXPECT_EQ(box.edge_count(), 12);
  const Lattice torus(LatticeSpec::torus(2, 3));
  EXPECT_EQ(torus.vertex_count(), 9);
  EXPECT_EQ(torus.edge_count(), 18);
  const Lattice line(LatticeSpec::box({4}, {0}, {4}));
  EXPECT_EQ(line.edge_count(), 4);
}

TEST(Lattice, EdgesAreUnitSteps) {
  const Lattice box(LatticeSpec::box({3, 2}, {0, 0}, {3, 2}));
  for (const auto& e : box.edges()) {
    const auto u = box.coords(e.u);
    const auto v = box.coords(e.v);
    int l1 = 0;
    for (std::size_t k = 0; k < u.size(); ++k) l1 += std::abs(u[k] - v[k]);
    EXPECT_EQ(l1, 1);
  }
  const Lattice torus(LatticeSpec::torus(2, 4));
  for (const auto& e : torus.edges()) {
    const auto u = torus.coords(e.u);
    const auto v = torus.coords(e.v);
    const auto k = static_cast<std::size_t>(e.axis);
    EXPECT_EQ((u[k] + 1) % 4, v[k]);
    EXPECT_EQ(u[1 - k], v[1 - k]);
  }
}

TEST(Lattice, EdgeIdsAreLexicographic) {
  const Lattice box(LatticeSpec::box({2, 2}, {0, 0}, {2, 2}));
  std::vector<std::pair<std::vector<int>, int>> keys;
  for (const auto& e : box.edges()) keys.emplace_back(box.coords(e.u), e.axis);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}

TEST(Lattice, RejectsBadSpecs) {
  EXPECT_THROW(Lattice(LatticeSpec::box({2, 2}, {0, 0}, {0, 0})), ConfigError);
  EXPECT_THROW(Lattice(LatticeSpec::box({2, 2}, {0, 0}, {3, 0})), ConfigError);
  EXPECT_THROW(Lattice(LatticeSpec::torus(2, 1)), ConfigError);
  EXPECT_THROW(Lattice(LatticeSpec::torus(2, 3, {2, 1}, {1, 1})), ConfigError);
  EXPECT_THROW(Lattice(LatticeSpec::torus(2, 3, {1, 1}, {2, 1}, 1.0)), ConfigError);
}

TEST(Lattice, SpecJsonRoundTrip) {
  const auto spec = LatticeSpec::box({2, 2}, {0, 0}, {2, 2}, {1, 2}, {3, 4}, 0.25);
  const auto text = lattice_spec_json(spec);
  const auto back = parse_lattice_spec(text);
  EXPECT_EQ(lattice_spec_json(back), text);
  EXPECT_EQ(spec_hash(back), spec_hash(spec));
  EXPECT_THROW(parse_lattice_spec("{\"mode\":\"sphere\"}"), ConfigError);
  EXPECT_THROW(parse_lattice_spec("not json"), ConfigError);
}

TEST(Enumeration, OrderAndCap) {
  const Lattice pair(LatticeSpec::parallel_pair());
  std::vector<std::uint64_t> masks;
  for (const auto& env : enumerate_environments(pair)) masks.push_back(env.mask());
  EXPECT_EQ(masks, (std::vector<std::uint64_t>{0, 1, 2, 3}));
  const Lattice torus(LatticeSpec::torus(2, 3));
  EXPECT_EQ(enumerate_environments(torus).size(), 262144U);
  const Lattice wide(LatticeSpec::box({15}, {0}, {15}));
  const Lattice too_wide(LatticeSpec::box({30}, {0}, {30}));
  EXPECT_NO_THROW(checked_state_count(wide, 26));
  EXPECT_THROW(checked_state_count(too_wide, 26), EnumerationCapError);
}

TEST(Enumeration, ProbabilitiesSumToOne) {
  const Lattice box(LatticeSpec::box({2, 2}, {0, 0}, {2, 2}));
  double total = 0;
  for (const auto& env : enumerate_environments(box)) total += prob_of(env, 0.3);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Sampling, DeterministicAndUnbiased) {
  const Lattice torus(LatticeSpec::torus(2, 3));
  EXPECT_EQ(sample_environment(torus, 0.3, 1, 0), sample_environment(torus, 0.3, 1, 0));
  EXPECT_NE(sample_environment(torus, 0.3, 1, 0), sample_environment(torus, 0.3, 2, 0));
  int b_count = 0;
  constexpr int kSamples = 100000;
  for (int i = 0; i < kSamples; ++i) b_count += sample_environment(torus, 0.3, 7, i).is_b(4);
  EXPECT_NEAR(static_cast<double>(b_count) / kSamples, 0.7, 0.01);
}

TEST(Sampling, SmallPGivesAllB) {
  const Lattice torus(LatticeSpec::torus(2, 3));
  bool seen = false;
  for (int i = 0; i < 10000 && !seen; ++i) seen = sample_environment(torus, 1e-12, 1, i).count_b() == 18;
  EXPECT_TRUE(seen);
}
