#include <gtest/gtest.h>

#include "lcaw/construction.hpp"
#include "support.hpp"

using namespace lcaw;
using namespace lcaw::testing;

namespace {

GeometryPtr qp(int p) { return make_geometry(Automorphism::monomial(GroupSpec::prime_field(p), {1})); }

SchemePtr canonical(const GeometryPtr& g) { return std::make_shared<const CosetScheme>(CosetScheme::canonical(g)); }

Element rat(const GeometryPtr& g, const Rational& q, int prec = kExact) {
  return Element::from_rational(g->group(), q, prec);
}

// Ball x + p^k Z_p from a rational center.
BallSet disk(const GeometryPtr& g, const Rational& x, int k) {
  return BallSet::ball(g, g->center(rat(g, x, k + 4), k), k);
}

Rational pow_rat(int p, int k) {
  mpz_class m;
  mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::abs(k)));
  return k >= 0 ? Rational(m) : Rational(1, m);
}

AlgorithmInput q3_split_input() {
  auto g = qp(3);
  auto D = canonical(g);
  AlgorithmInput in;
  in.scheme = D;
  in.maps.push_back(make_translation_map({{Ball{rat(g, 1), 1}, rat(g, Rational(2, 3)), false},
                                          {Ball{rat(g, 0), 1}, rat(g, Rational(1, 3)), false},
                                          {Ball{rat(g, 2), 1}, rat(g, Rational(1, 3)), false}},
                                         D, 0));
  in.omega0.push_back(BallSet::origin(g));
  return in;
}

}  // namespace

TEST(TranslationMap, HaarMapIsValid) {
  for (int p : {2, 3, 5}) {
    auto g = qp(p);
    auto D = canonical(g);
    for (const auto& sigma : D->annulus_reps(0)) {
      auto v = check_translation_map({{Ball{Element::zero(g->group()), 0}, sigma, false}}, D, 0);
      EXPECT_TRUE(v.empty());
      auto T = make_translation_map({{Ball{Element::zero(g->group()), 0}, sigma, false}}, D, 0);
      EXPECT_EQ(T.range(), BallSet::ball(g, sigma, 0));
    }
  }
}

TEST(TranslationMap, SplitMapOnQ3) {
  auto in = q3_split_input();
  auto g = in.geometry();
  const auto& T = in.maps[0];
  EXPECT_EQ(T.apply(disk(g, 1, 1)), disk(g, Rational(5, 3), 1));
  EXPECT_EQ(T.apply(disk(g, 0, 1)), disk(g, Rational(1, 3), 1));
  EXPECT_EQ(T.apply(disk(g, 2, 1)), disk(g, Rational(7, 3), 1));
  EXPECT_EQ(T.range(), unite({disk(g, Rational(5, 3), 1), disk(g, Rational(1, 3), 1), disk(g, Rational(7, 3), 1)}, g));
  // the same map written with shifts
  auto v = check_translation_map({{Ball{rat(g, 1), 1}, rat(g, Rational(2, 3)), true},
                                  {Ball{rat(g, 0), 1}, rat(g, Rational(1, 3)), true},
                                  {Ball{rat(g, 2), 1}, rat(g, Rational(1, 3)), true}},
                                 in.scheme, 0);
  EXPECT_TRUE(v.empty());
}

TEST(TranslationMap, Rejections) {
  auto g = qp(3);
  auto D = canonical(g);
  const Element third = rat(g, Rational(1, 3));
  // two cosets of W sent to the same sigma collide
  auto v = check_translation_map({{Ball{rat(g, 0), 0}, rat(g, Rational(1, 9)), false},
                                  {Ball{third, 0}, rat(g, Rational(1, 9)), false},
                                  {Ball{rat(g, Rational(2, 3)), 0}, rat(g, Rational(2, 9)), false}},
                                 D, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v.front().find("images of pieces 0 and 1"), std::string::npos);
  EXPECT_TRUE(check_translation_map({{Ball{rat(g, 0), 0}, rat(g, Rational(1, 9)), false},
                                     {Ball{third, 0}, rat(g, Rational(4, 9)), false},
                                     {Ball{rat(g, Rational(2, 3)), 0}, rat(g, Rational(2, 9)), false}},
                                    D, 1)
                  .empty());
  v = check_translation_map({{Ball{rat(g, 0), 0}, third, false}, {Ball{rat(g, 1), 1}, third, false}}, D, 0);
  bool domains = false;
  for (const auto& s : v) domains = domains || s.find("domains of pieces") != std::string::npos;
  EXPECT_TRUE(domains);
  v = check_translation_map({{Ball{rat(g, 0), 0}, rat(g, Rational(4, 3)), false}}, D, 0);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v.front().find("not in D"), std::string::npos);
  v = check_translation_map({{Ball{rat(g, 0), 0}, rat(g, Rational(1, 9)), false}}, D, 0);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.front().find("annulus"), std::string::npos);
  v = check_translation_map({{Ball{rat(g, 0), 0}, rat(g, 1), true}}, D, 0);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.front().find("translation condition"), std::string::npos);
  v = check_translation_map({{Ball{rat(g, 0), 1}, third, false}}, D, 0);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v.front().find("miss"), std::string::npos);
  EXPECT_THROW(make_translation_map({{Ball{rat(g, 0), 1}, third, false}}, D, 0), InvalidInput);
}

TEST(AlgorithmInput, DefaultHaarDataExistsEverywhere) {
  for (const auto& c : catalog()) {
    auto in = haar_input(canonical(c.geo));
    EXPECT_EQ(static_cast<long>(in.N()), c.geo->index() - 1) << c.name;
    EXPECT_TRUE(validate_input(in).empty()) << c.name;
  }
}

TEST(AlgorithmInput, Violations) {
  auto g = qp(3);
  auto D = canonical(g);
  auto in = haar_input(D);
  in.omega0[0] = subtract(in.omega0[0], disk(g, 0, 2));
  auto v = validate_input(in);
  EXPECT_FALSE(v.empty());
  // two equal maps on overlapping initial sets
  auto dup = haar_input(D);
  dup.maps[1] = dup.maps[0];
  v = validate_input(dup);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v.front().find("ranges overlap"), std::string::npos);
  AlgorithmInput outside;
  outside.scheme = D;
  outside.maps = {dup.maps[0], dup.maps[0]};
  outside.omega0 = {BallSet::origin(g), translate(BallSet::origin(g), rat(g, Rational(1, 3)))};
  v = validate_input(outside);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v.front().find("inside W"), std::string::npos);
}

TEST(Construction, HaarFirstStep) {
  for (int p : {2, 3, 5}) {
    auto g = qp(p);
    auto in = haar_input(canonical(g));
    ASSERT_TRUE(validate_input(in).empty());
    std::vector<std::string> failures;
    auto s = step(in, initial_state(in), nullptr, &failures);
    EXPECT_TRUE(failures.empty());
    EXPECT_EQ(s.lambda[0][0], BallSet::origin(g, 1));
    for (std::size_t j = 1; j < in.N(); ++j) {
      EXPECT_EQ(s.lambda[j][0], BallSet::origin(g));
      EXPECT_EQ(s.omega[j], BallSet::ball(g, in.maps[j].pieces()[0].sigma, 0));
    }
  }
}

TEST(Construction, SingleWaveletOnQ5) {
  auto g = qp(5);
  auto in = single_input(canonical(g), rat(g, Rational(1, 5)));
  auto res = run(in, {8, 0, 3});
  EXPECT_TRUE(res.failures.empty());
  for (int m = 1; m <= 8; ++m) {
    Rational c = Rational(-1, 4) - pow_rat(5, m - 1);
    EXPECT_EQ(res.state.lambda[0][static_cast<std::size_t>(m - 1)], disk(g, c, m)) << m;
  }
  ASSERT_TRUE(res.descriptors[0].has_value());
  const auto& d = *res.descriptors[0];
  EXPECT_EQ(d.period, 1);
  EXPECT_EQ(d.start, 1);
  EXPECT_EQ(d.total_measure, Rational(1, 4));
  EXPECT_EQ(d.shifts[0], rat(g, 1));
  EXPECT_EQ(d.limits[0], g->center(rat(g, Rational(-1, 4), 20), 8));
  // the geometric tail bounds the residual
  EXPECT_LE(res.residual, Rational(1, 4) * pow_rat(5, -7));
  EXPECT_GT(res.residual, 0);
}

TEST(Construction, SingleWaveletOnQ3Alternates) {
  auto in = q3_split_input();
  auto g = in.geometry();
  auto res = run(in, {8, 0, 3});
  EXPECT_TRUE(res.failures.empty());
  EXPECT_EQ(res.state.lambda[0][0], BallSet::origin(g, 1));
  EXPECT_EQ(res.state.lambda[0][1], disk(g, 1, 2));
  EXPECT_EQ(res.state.lambda[0][2], disk(g, 5, 3));
  for (int m = 1; m <= 8; ++m) {
    Rational c = (m % 2 ? Rational(-5, 8) : Rational(-7, 8)) + pow_rat(3, m - 1);
    EXPECT_EQ(res.state.lambda[0][static_cast<std::size_t>(m - 1)], disk(g, c, m)) << m;
  }
  ASSERT_TRUE(res.descriptors[0].has_value());
  EXPECT_EQ(res.descriptors[0]->period, 2);
  EXPECT_EQ(res.descriptors[0]->total_measure, Rational(1, 2));
}

TEST(Construction, SingleWaveletGeneralMeasure) {
  // nu(Lambda_1) = 1 / (|A| - 1) for every annulus representative
  for (int p : {2, 3, 5, 7}) {
    auto g = qp(p);
    auto D = canonical(g);
    for (const auto& sigma : D->annulus_reps(0)) {
      auto res = run(single_input(D, sigma), {7, 0, 3});
      EXPECT_TRUE(res.failures.empty());
      ASSERT_TRUE(res.descriptors[0].has_value()) << p;
      EXPECT_EQ(res.descriptors[0]->total_measure, Rational(1, p - 1));
    }
  }
}

TEST(Construction, HaarStabilizes) {
  for (int p : {2, 3, 5}) {
    auto g = qp(p);
    auto D = canonical(g);
    auto res = run(haar_input(D), {10, 0, 3});
    EXPECT_TRUE(res.failures.empty()) << res.failures.front();
    EXPECT_LE(res.residual, pow_rat(p, -9));
    auto reps = D->annulus_reps(0);
    for (std::size_t j = 0; j < reps.size(); ++j) {
      BallSet expected = BallSet::ball(g, reps[j], 0);
      EXPECT_TRUE(is_subset(res.stabilized[j], expected));
      EXPECT_TRUE(is_subset(subtract(expected, res.stabilized[j]), res.envelope(j)));
      EXPECT_EQ(res.omega()[j].measure(), 1);
      if (j > 0) EXPECT_EQ(res.omega()[j], expected);
      ASSERT_TRUE(res.descriptors[j].has_value());
      EXPECT_EQ(res.descriptors[j]->total_measure, 1);
    }
  }
}

TEST(Construction, ProductAndExtensionHaarSets) {
  auto q2 = GroupSpec::prime_field(2), q3 = GroupSpec::prime_field(3);
  auto g = make_geometry(Automorphism::monomial(GroupSpec::product({q2, q3}), {2, 1}));
  auto res = run(haar_input(canonical(g)), {8, 0, 3});
  EXPECT_TRUE(res.failures.empty());
  std::vector<BallSet> expected;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 3; ++k) {
      if (j == 0 && k == 0) continue;
      Element c = Element::from_rationals(g->group(), {Rational(j, 4), Rational(k, 3)});
      expected.push_back(BallSet::ball(g, c, 0));
    }
  ASSERT_EQ(res.omega().size(), 11u);
  for (std::size_t j = 0; j < 11; ++j) {
    int hits = 0;
    for (const auto& e : expected)
      if (is_subset(res.stabilized[j], e) && is_subset(subtract(e, res.stabilized[j]), res.envelope(j))) ++hits;
    EXPECT_EQ(hits, 1);
  }

  auto ext = make_geometry(Automorphism::monomial(GroupSpec::q2_sqrt2(), {2}));
  auto r2 = run(haar_input(canonical(ext)), {8, 0, 3});
  EXPECT_TRUE(r2.failures.empty());
  ASSERT_EQ(r2.omega().size(), 3u);
  auto mono = [&](std::vector<int> ks) {
    Element x = Element::zero(ext->group());
    for (int k : ks) x = x + Element::monomial(ext->group(), 0, k);
    return BallSet::ball(ext, x, 0);
  };
  std::vector<BallSet> want{mono({-5}), mono({-4}), mono({-5, -4})};
  for (std::size_t j = 0; j < 3; ++j) {
    int hits = 0;
    for (const auto& e : want)
      if (is_subset(r2.stabilized[j], e) && is_subset(subtract(e, r2.stabilized[j]), r2.envelope(j))) ++hits;
    EXPECT_EQ(hits, 1);
  }
}

TEST(Construction, EpsilonStop) {
  auto g = qp(2);
  auto res = run(single_input(canonical(g), rat(g, Rational(1, 2))), {30, Rational(1, 100), 3});
  EXPECT_EQ(res.stop_reason, "epsilon");
  EXPECT_EQ(res.state.m, 8);
  EXPECT_FALSE(res.nonconvergence);
}

TEST(DilationUnion, MatchesDeepTruncation) {
  std::mt19937_64 rng(17);
  auto cat = catalog();
  int cases = 0;
  for (int it = 0; it < 600; ++it) {
    const auto& c = cat[it % cat.size()];
    auto g = c.geo;
    int M = static_cast<int>(rng() % 2);
    BallSet source = intersect(random_set(g, rng, 3, -M - 1, 3), BallSet::origin(g, -M - 1));
    BallSet target = intersect(random_set(g, rng, 3, -M, 3), BallSet::origin(g, -M));
    Element zero = Element::zero(g->group());
    if (source.contains(zero) && rng() % 2) source = subtract(source, BallSet::origin(g, 4));
    DilationUnion du;
    try {
      du = dilation_union(source, target, M);
    } catch (const std::logic_error&) {
      EXPECT_TRUE(target.contains(zero) && !source.contains(zero));
      continue;
    }
    std::vector<BallSet> parts;
    for (int n = 1; n <= du.nmax + 6; ++n) parts.push_back(intersect(target, dilate(source, -n)));
    EXPECT_EQ(du.set, unite(parts, g)) << c.name;
    ++cases;
  }
  EXPECT_GE(cases, 500);
}

TEST(Construction, RandomSplitMapsKeepInvariants) {
  std::mt19937_64 rng(5);
  int valid = 0;
  for (int it = 0; it < 2000 && valid < 500; ++it) {
    int p = it % 2 ? 3 : 2;
    auto g = qp(p);
    auto D = canonical(g);
    auto reps = D->annulus_reps(0);
    // random partition of H^perp into balls of scale 1 or 2
    std::vector<MapPieceSpec> specs;
    for (const auto& b : refine(BallSet::origin(g), 1)) {
      std::vector<Ball> parts{b};
      if (rng() % 2) parts = children(*g, b);
      for (const auto& q : parts) specs.push_back({q, reps[rng() % reps.size()], false});
    }
    if (!check_translation_map(specs, D, 0).empty()) continue;
    AlgorithmInput in;
    in.scheme = D;
    in.maps.push_back(make_translation_map(specs, D, 0));
    in.omega0.push_back(BallSet::origin(g));
    auto res = run(in, {4, 0, 3, 6});
    EXPECT_TRUE(res.failures.empty());
    for (const auto& om : res.omega()) EXPECT_TRUE(check_congruence(om, *D).congruent());
    BallSet seen(g);
    for (const auto& lam : res.state.lambda[0]) {
      EXPECT_TRUE(intersect(seen, lam).empty());
      seen = unite({seen, lam}, g);
    }
    ++valid;
  }
  EXPECT_GE(valid, 500);
}
