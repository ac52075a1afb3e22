#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>

#include <gmpxx.h>

namespace lcaw {

using Rational = mpq_class;

// A point of R/Z, i.e. the unit complex number exp(2 pi i num/den).
struct Angle {
  int64_t num = 0;
  int64_t den = 1;

  Angle() = default;
  Angle(int64_t n, int64_t d);

  static Angle from_rational(const Rational& q);
  Rational to_rational() const;
  std::complex<double> to_complex() const;
  bool is_zero() const { return num == 0; }

  Angle operator+(const Angle& o) const;
  Angle operator-(const Angle& o) const;
  Angle operator-() const;
  bool operator==(const Angle& o) const { return num == o.num && den == o.den; }
  bool operator<(const Angle& o) const;

  std::string str() const;
};

// Element of a cyclotomic field stored as a formal sum  sum_k c_k exp(2 pi i a_k).
class Cyclo {
 public:
  Cyclo() = default;
  explicit Cyclo(const Rational& c);
  Cyclo(const Rational& c, const Angle& a);

  static Cyclo unit(const Angle& a) { return Cyclo(Rational(1), a); }
  static Cyclo gaussian(const Rational& re, const Rational& im);

  Cyclo& operator+=(const Cyclo& o);
  Cyclo& operator-=(const Cyclo& o);
  Cyclo operator+(const Cyclo& o) const;
  Cyclo operator-(const Cyclo& o) const;
  Cyclo operator-() const;
  Cyclo operator*(const Cyclo& o) const;
  Cyclo operator*(const Rational& r) const;
  Cyclo rotate(const Angle& a) const;
  Cyclo conj() const;

  void add_term(const Rational& c, const Angle& a);

  // Rewrites the sum in the canonical basis of Q(zeta_N); zero iff no terms remain.
  Cyclo reduced() const;
  bool is_zero() const;
  bool equals(const Cyclo& o) const { return (*this - o).is_zero(); }
  // Some(q) when the value is the rational q.
  bool is_rational(Rational* out = nullptr) const;

  std::complex<double> to_complex() const;
  const std::map<Angle, Rational>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  std::string str() const;

 private:
  std::map<Angle, Rational> terms_;
};

// sqrt(n) for n >= 1 as a sum of roots of unity.
Cyclo sqrt_cyclo(long n);

std::string rational_str(const Rational& q);
Rational parse_rational(const std::string& s);

}  // namespace lcaw
