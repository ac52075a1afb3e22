#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcaw/cyclo.hpp"

namespace lcaw {

// Precision sentinel: an element with this precision has finitely many nonzero digits
// and is known exactly.
inline constexpr int kExact = 1 << 24;

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CarryRule {
  int q = 2;
  // q written in uniformizer digits: q = sum_k carry[k] * pi^(k+1).  Empty: no carrying.
  std::vector<int> carry;

  static CarryRule base(int p);
  static CarryRule none(int p);
  static CarryRule ramified(int p, int e);

  struct Entry {
    int digit;
    std::vector<int> carry;
  };
  // Result of adding two digits (sum in [0, 2q-2]).
  Entry entry(int sum) const;

  bool operator==(const CarryRule&) const = default;
};

enum class FieldKind { Prime, Laurent, Ramified };

// A non-archimedean local field with uniformizer pi, residue field of size q and
// H = O (the ring of integers).  For Ramified fields pi^e = p and the duality is
// (x, g) = chi(Tr(x g)), so that H^perp = pi^(-r) O with r the different exponent.
struct FieldSpec {
  FieldKind kind = FieldKind::Prime;
  int p = 2;
  int e = 1;
  CarryRule rule;
  int r = 0;

  int q() const { return rule.q; }
  std::string name() const;
  bool operator==(const FieldSpec&) const = default;
};

class GroupSpec;
using Group = std::shared_ptr<const GroupSpec>;

class GroupSpec {
 public:
  static Group prime_field(int p);
  static Group laurent_field(int p);
  static Group pi_extension(int p, int e, int r);
  static Group q2_sqrt2();
  static Group product(const std::vector<Group>& parts);

  const std::vector<FieldSpec>& fields() const { return fields_; }
  const FieldSpec& field(std::size_t i) const { return fields_.at(i); }
  std::size_t size() const { return fields_.size(); }
  bool is_product() const { return fields_.size() > 1; }
  std::string name() const;
  bool operator==(const GroupSpec& o) const { return fields_ == o.fields_; }

 private:
  std::vector<FieldSpec> fields_;
};

bool same_group(const Group& a, const Group& b);
bool is_prime(int n);

// Truncated digit expansion sum_i digits[i] * pi^(lead + i), known modulo pi^prec.
// Canonical: no zero digits at either end; zero has no digits and lead == prec.
struct Local {
  int lead = kExact;
  int prec = kExact;
  std::vector<int> digits;

  bool is_zero() const { return digits.empty(); }
  bool exact() const { return prec >= kExact; }
  int valuation() const { return digits.empty() ? prec : lead; }
  int end() const { return lead + static_cast<int>(digits.size()); }
  int digit(int n) const;
  bool operator==(const Local&) const = default;
};

class Element {
 public:
  Element() = default;
  Element(Group g, std::vector<Local> comps);

  static Element zero(const Group& g);
  static Element zero(const Group& g, const std::vector<int>& prec);
  // One rational per component; prec (in uniformizer units) bounds infinite expansions.
  static Element from_rationals(const Group& g, const std::vector<Rational>& values, int prec = kExact);
  static Element from_rational(const Group& g, const Rational& value, int prec = kExact);
  // pi_i^k in component i, zero elsewhere.
  static Element monomial(const Group& g, std::size_t comp, int k, int digit = 1);

  const Group& group() const { return group_; }
  const std::vector<Local>& comps() const { return comps_; }
  const Local& comp(std::size_t i) const { return comps_.at(i); }
  std::size_t size() const { return comps_.size(); }
  bool is_zero() const;
  bool exact() const;
  std::vector<int> valuations() const;
  std::vector<int> precisions() const;

  bool operator==(const Element& o) const;
  bool operator!=(const Element& o) const { return !(*this == o); }
  std::string str() const;

 private:
  Group group_;
  std::vector<Local> comps_;
};

Element add(const Element& x, const Element& y);
Element sub(const Element& x, const Element& y);
Element neg(const Element& x);
Element mul(const Element& x, const Element& y);
Element truncate(const Element& x, const std::vector<int>& prec);
// Multiplies component i by pi_i^(k[i]).
Element shift(const Element& x, const std::vector<int>& k);
// Unit inverse known modulo pi^prec in every component.
Element inverse_unit(const Element& u, int prec);

inline Element operator+(const Element& x, const Element& y) { return add(x, y); }
inline Element operator-(const Element& x, const Element& y) { return sub(x, y); }
inline Element operator*(const Element& x, const Element& y) { return mul(x, y); }

// Exact duality pairing (x, gamma) as a rational angle.
Angle pairing(const Element& x, const Element& gamma);

// Digit literal "(a_n0 ... | a_0 a_1 ...)@q", a rational "a/b", or "[c1, c2, ...]" for products.
Element parse_element(const Group& g, const std::string& text, int prec = kExact);
std::string format_element(const Element& x);

struct ExpansiveReport {
  bool expansive = false;
  bool dual_cover = false;
  int depth = 0;
  std::vector<int> shifts;
  std::string witness;
};

// x -> u * pi^(-a) x in every component.
class Automorphism {
 public:
  Automorphism() = default;
  static Automorphism monomial(const Group& g, std::vector<int> shifts, std::vector<Element> units = {});
  static Automorphism scalar_inverse_uniformizer(const Group& g);

  const Group& group() const { return group_; }
  const std::vector<int>& shifts() const { return shifts_; }
  int shift(std::size_t i) const { return shifts_.at(i); }
  const Element& unit() const { return unit_; }
  bool trivial_units() const { return trivial_; }
  bool acts_on_dual() const { return dual_; }

  Element apply(const Element& x) const { return apply_power(x, 1); }
  // A^n x; negative powers with nontrivial units are computed modulo pi^prec.
  Element apply_power(const Element& x, int n, int prec = 64) const;

  Automorphism adjoint() const;
  Automorphism inverse(int prec = 64) const;
  Automorphism compose(const Automorphism& b) const;
  Automorphism power(int n, int prec = 64) const;
  Rational modulus() const;
  long modulus_int() const;

  bool is_expansive() const;
  ExpansiveReport expansive_report(int depth = 8) const;

  bool operator==(const Automorphism& o) const;

 private:
  Group group_;
  std::vector<int> shifts_;
  Element unit_;
  bool trivial_ = true;
  bool dual_ = false;
};

}  // namespace lcaw
