#include <gtest/gtest.h>

#include <random>

#include "lcaw/group.hpp"

using namespace lcaw;

namespace {

Element digits(const Group& g, int lead, std::vector<int> d) {
  Local l;
  l.lead = lead;
  l.prec = kExact;
  l.digits = std::move(d);
  return Element(g, {l});
}

// Independent value of a finite digit string in Q(sqrt p) style coordinates:
// sum d_i pi^i with pi^e = p, returned as (a, b) meaning a + b * pi for e = 2, or a for e = 1.
std::pair<Rational, Rational> value(const FieldSpec& f, const Local& l) {
  Rational a = 0, b = 0;
  for (std::size_t i = 0; i < l.digits.size(); ++i) {
    int n = l.lead + static_cast<int>(i);
    int k = n >= 0 ? n / f.e : -((-n + f.e - 1) / f.e);
    int rem = n - k * f.e;
    Rational pk = 1;
    for (int j = 0; j < std::abs(k); ++j) pk *= f.p;
    if (k < 0) pk = 1 / pk;
    if (rem == 0) a += l.digits[i] * pk;
    else b += l.digits[i] * pk;
  }
  a.canonicalize();
  b.canonicalize();
  return {a, b};
}

// Fractional p-part of a rational, as a rational in [0, 1).
Rational frac_p(const Rational& x, int p) {
  mpz_class num = x.get_num(), den = x.get_den(), pk = 1;
  while (den % p == 0) {
    den /= p;
    pk *= p;
  }
  if (pk == 1) return 0;
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pk.get_mpz_t());
  mpz_class r = (num * inv) % pk;
  if (r < 0) r += pk;
  Rational out(r, pk);
  out.canonicalize();
  return out;
}

Element random_finite(const Group& g, std::mt19937_64& rng, int lo, int len) {
  std::vector<Local> comps;
  for (std::size_t i = 0; i < g->size(); ++i) {
    Local l;
    l.lead = lo + static_cast<int>(rng() % 3);
    l.prec = kExact;
    for (int k = 0; k < len; ++k) l.digits.push_back(static_cast<int>(rng() % g->field(i).q()));
    comps.push_back(l);
  }
  return Element(g, comps);
}

}  // namespace

TEST(Group, PrimeFieldAddition) {
  auto g = GroupSpec::prime_field(5);
  Element x = digits(g, 0, {3, 2}), y = digits(g, 0, {4, 3});
  EXPECT_EQ(x + y, digits(g, 0, {2, 1, 1}));
}

TEST(Group, LaurentAdditionHasNoCarry) {
  auto g = GroupSpec::laurent_field(5);
  EXPECT_EQ(digits(g, 0, {3, 2}) + digits(g, 0, {4, 3}), digits(g, 0, {2}));
}

TEST(Group, Multiplication) {
  auto q2 = GroupSpec::prime_field(2);
  EXPECT_EQ(Element::from_rational(q2, 3) * Element::from_rational(q2, 3), digits(q2, 0, {1, 0, 0, 1}));
  auto f3 = GroupSpec::laurent_field(3);
  EXPECT_EQ(digits(f3, 0, {1, 1}) * digits(f3, 0, {1, 2}), digits(f3, 0, {1, 0, 2}));
  auto r = GroupSpec::q2_sqrt2();
  // pi * pi = 2 = pi^2 ; (1 + pi)^2 = 1 + 2 pi + 2 = 1 + pi^2 + pi^3
  EXPECT_EQ(digits(r, 1, {1}) * digits(r, 1, {1}), digits(r, 2, {1}));
  EXPECT_EQ(digits(r, 0, {1, 1}) * digits(r, 0, {1, 1}), digits(r, 0, {1, 0, 1, 1}));
}

TEST(Group, NegationNeedsPrecision) {
  auto g = GroupSpec::prime_field(3);
  EXPECT_THROW(neg(Element::from_rational(g, 1)), PrecisionError);
  Element m = Element::zero(g, {6}) - Element::from_rational(g, 1);
  EXPECT_EQ(m.comp(0).digits, std::vector<int>(6, 2));
  EXPECT_EQ(m.comp(0).prec, 6);
  EXPECT_EQ(Element::from_rational(g, -1, 6), m);
}

TEST(Group, RationalExpansion) {
  auto g = GroupSpec::prime_field(5);
  Element h = Element::from_rational(g, Rational(1, 2), 4);
  // 1/2 = 3 + 2*5 + 2*25 + 2*125 + ...
  EXPECT_EQ(h.comp(0).digits, (std::vector<int>{3, 2, 2, 2}));
  Element x = Element::from_rational(g, Rational(7, 25));
  EXPECT_EQ(x, digits(g, -2, {2, 1}));
}

TEST(Group, Literals) {
  auto g = GroupSpec::prime_field(3);
  Element x = parse_element(g, "(12|01)@3");
  EXPECT_EQ(x, digits(g, -2, {1, 2, 0, 1}));
  EXPECT_EQ(format_element(x), "(12|01)@3");
  EXPECT_EQ(parse_element(g, format_element(x)), x);
  auto p = GroupSpec::product({GroupSpec::prime_field(2), GroupSpec::prime_field(3)});
  Element y = parse_element(p, "[(1|)@2, (|2)@3]");
  EXPECT_EQ(y.comp(0).lead, -1);
  EXPECT_EQ(y.comp(1).digits, std::vector<int>{2});
  EXPECT_EQ(parse_element(p, format_element(y)), y);
  auto big = GroupSpec::prime_field(11);
  Element z = parse_element(big, "(10|3 7)@11");
  EXPECT_EQ(z, digits(big, -1, {10, 3, 7}));
  EXPECT_EQ(format_element(z), "(10|3 7)@11");
  EXPECT_THROW(parse_element(g, "(13|)@3"), std::invalid_argument);
  EXPECT_THROW(parse_element(g, "(1|)@5"), std::invalid_argument);
}

TEST(Group, Pairing) {
  auto f2 = GroupSpec::laurent_field(2);
  EXPECT_EQ(pairing(digits(f2, -1, {1}), Element::from_rational(f2, 1)), Angle(1, 2));
  auto q3 = GroupSpec::prime_field(3);
  EXPECT_EQ(pairing(Element::from_rational(q3, Rational(1, 9)), Element::from_rational(q3, 5)), Angle(5, 9));
  auto r = GroupSpec::q2_sqrt2();
  // Tr(pi^-3 * 1) = 0, Tr(pi^-4) = 2/4
  EXPECT_TRUE(pairing(digits(r, -3, {1}), Element::from_rational(r, 1)).is_zero());
  EXPECT_EQ(pairing(digits(r, -4, {1}), Element::from_rational(r, 1)), Angle(1, 2));
  EXPECT_TRUE(pairing(digits(r, -2, {1}), Element::from_rational(r, 1)).is_zero());
}

TEST(Group, Validation) {
  EXPECT_THROW(GroupSpec::prime_field(4), std::invalid_argument);
  EXPECT_THROW(GroupSpec::pi_extension(2, 2, 1), std::invalid_argument);
  EXPECT_NO_THROW(GroupSpec::pi_extension(3, 2, 1));
  EXPECT_EQ(GroupSpec::q2_sqrt2()->field(0).r, 3);
}

TEST(Group, AutomorphismModulusAndExpansivity) {
  auto q5 = GroupSpec::prime_field(5);
  EXPECT_EQ(Automorphism::scalar_inverse_uniformizer(q5).modulus_int(), 5);
  auto p = GroupSpec::product({GroupSpec::prime_field(2), GroupSpec::prime_field(3)});
  Automorphism a = Automorphism::monomial(p, {2, 1});
  EXPECT_EQ(a.modulus_int(), 12);
  EXPECT_TRUE(a.is_expansive());
  EXPECT_TRUE(a.expansive_report().dual_cover);
  Automorphism b = Automorphism::monomial(p, {1, 0});
  EXPECT_FALSE(b.is_expansive());
  ExpansiveReport rep = b.expansive_report();
  EXPECT_FALSE(rep.dual_cover);
  EXPECT_FALSE(rep.witness.empty());
  auto r = GroupSpec::q2_sqrt2();
  EXPECT_EQ(Automorphism::monomial(r, {2}).modulus_int(), 4);
  EXPECT_EQ(a.compose(a.inverse()).modulus_int(), 1);
}

TEST(Group, UnitsAndInverse) {
  auto q5 = GroupSpec::prime_field(5);
  Element u = Element::from_rational(q5, 2);
  Element v = inverse_unit(u, 8);
  EXPECT_EQ(v, Element::from_rational(q5, Rational(1, 2), 8));
  Automorphism a = Automorphism::monomial(q5, {1}, {u});
  Element x = Element::from_rational(q5, 3);
  EXPECT_EQ(a.apply(x), Element::from_rational(q5, Rational(6, 5)));
  Element back = a.apply_power(a.apply(x), -1, 10);
  EXPECT_EQ(truncate(back, {8}), truncate(x, {8}));
}

TEST(GroupProperty, ArithmeticMatchesValueOracle) {
  std::vector<Group> groups = {GroupSpec::prime_field(2), GroupSpec::prime_field(3), GroupSpec::prime_field(7),
                               GroupSpec::q2_sqrt2(), GroupSpec::pi_extension(3, 2, 1)};
  std::mt19937_64 rng(5);
  for (int it = 0; it < 1500; ++it) {
    const Group& g = groups[static_cast<std::size_t>(it) % groups.size()];
    const FieldSpec& f = g->field(0);
    Element x = random_finite(g, rng, -4, 6), y = random_finite(g, rng, -4, 6);
    auto vx = value(f, x.comp(0)), vy = value(f, y.comp(0));
    auto vs = value(f, (x + y).comp(0));
    EXPECT_EQ(vs.first, vx.first + vy.first);
    EXPECT_EQ(vs.second, vx.second + vy.second);
    auto vm = value(f, (x * y).comp(0));
    Rational p = f.e == 2 ? Rational(f.p) : Rational(0);
    if (f.e == 1) {
      EXPECT_EQ(vm.first, vx.first * vy.first);
    } else {
      EXPECT_EQ(vm.first, vx.first * vy.first + p * vx.second * vy.second);
      EXPECT_EQ(vm.second, vx.first * vy.second + vx.second * vy.first);
    }
    EXPECT_EQ(x + y, y + x);
    Element z = random_finite(g, rng, -2, 4);
    EXPECT_EQ((x + y) + z, x + (y + z));
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ(x * (y + z), x * y + x * z);
    // subtraction undoes addition at finite precision
    Element d = truncate(Element::zero(g), {20}) + (x + y) - y;
    EXPECT_EQ(truncate(d, {20}), truncate(x, {20}));
  }
}

TEST(GroupProperty, PairingMatchesTraceOracle) {
  std::vector<Group> groups = {GroupSpec::prime_field(2), GroupSpec::prime_field(5), GroupSpec::q2_sqrt2(),
                               GroupSpec::pi_extension(3, 2, 1)};
  std::mt19937_64 rng(9);
  for (int it = 0; it < 1000; ++it) {
    const Group& g = groups[static_cast<std::size_t>(it) % groups.size()];
    const FieldSpec& f = g->field(0);
    Element x = random_finite(g, rng, -4, 5), y = random_finite(g, rng, -4, 5);
    auto vx = value(f, x.comp(0)), vy = value(f, y.comp(0));
    Rational trace = vx.first * vy.first;
    if (f.e == 2) trace = 2 * (vx.first * vy.first + f.p * vx.second * vy.second);
    EXPECT_EQ(pairing(x, y).to_rational(), frac_p(trace, f.p));
    Element z = random_finite(g, rng, -3, 4);
    EXPECT_EQ(pairing(x + z, y), pairing(x, y) + pairing(z, y));
    EXPECT_EQ(pairing(x, y), pairing(y, x));
  }
}

TEST(GroupProperty, LaurentPairingAndAdjoint) {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 600; ++it) {
    int p = it % 2 ? 3 : 2;
    auto g = GroupSpec::laurent_field(p);
    Element x = random_finite(g, rng, -3, 5), y = random_finite(g, rng, -3, 5);
    // coefficient of t^-1 in the product
    int64_t c = 0;
    const Local& a = x.comp(0);
    const Local& b = y.comp(0);
    for (std::size_t i = 0; i < a.digits.size(); ++i)
      for (std::size_t j = 0; j < b.digits.size(); ++j)
        if (a.lead + static_cast<int>(i) + b.lead + static_cast<int>(j) == -1) c += a.digits[i] * b.digits[j];
    EXPECT_EQ(pairing(x, y), Angle(c, p));
    Automorphism A = Automorphism::monomial(g, {1 + static_cast<int>(rng() % 2)});
    EXPECT_EQ(pairing(A.apply(x), y), pairing(x, A.adjoint().apply(y)));
  }
}

TEST(GroupProperty, ProductAdjointIdentity) {
  auto g = GroupSpec::product({GroupSpec::prime_field(2), GroupSpec::prime_field(3)});
  Automorphism A = Automorphism::monomial(g, {2, 1});
  std::mt19937_64 rng(17);
  for (int it = 0; it < 600; ++it) {
    Element x = random_finite(g, rng, -3, 4), y = random_finite(g, rng, -3, 4);
    int n = static_cast<int>(rng() % 5) - 2;
    EXPECT_EQ(pairing(A.apply_power(x, n), y), pairing(x, A.adjoint().apply_power(y, n)));
    EXPECT_EQ(A.apply_power(A.apply_power(x, n), -n), x);
  }
}
