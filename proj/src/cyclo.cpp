#include "lcaw/cyclo.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lcaw {

namespace {

using i128 = __int128;

int64_t mod_floor(i128 a, int64_t m) {
  i128 r = a % m;
  if (r < 0) r += m;
  return static_cast<int64_t>(r);
}

int64_t checked_lcm(int64_t a, int64_t b) {
  int64_t g = std::gcd(a, b);
  i128 l = static_cast<i128>(a / g) * b;
  if (l > static_cast<i128>(INT64_MAX)) throw std::overflow_error("angle denominator overflow");
  return static_cast<int64_t>(l);
}

int64_t inv_mod(int64_t a, int64_t m) {
  i128 t = 0, nt = 1, r = m, nr = mod_floor(a, m);
  while (nr != 0) {
    i128 q = r / nr;
    i128 tmp = t - q * nt; t = nt; nt = tmp;
    tmp = r - q * nr; r = nr; nr = tmp;
  }
  if (r != 1) throw std::domain_error("not invertible");
  return mod_floor(t, m);
}

std::vector<std::pair<int64_t, int>> factor(int64_t n) {
  std::vector<std::pair<int64_t, int>> out;
  for (int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) { n /= p; ++e; }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

}  // namespace

Angle::Angle(int64_t n, int64_t d) {
  if (d <= 0) throw std::invalid_argument("angle denominator must be positive");
  n = mod_floor(n, d);
  int64_t g = std::gcd(n, d);
  if (g == 0) g = d;
  num = n / g;
  den = d / g;
}

Angle Angle::from_rational(const Rational& q) {
  mpz_class n = q.get_num(), d = q.get_den();
  if (!d.fits_slong_p()) throw std::overflow_error("angle denominator overflow");
  mpz_class r = n % d;
  if (r < 0) r += d;
  return Angle(r.get_si(), d.get_si());
}

Rational Angle::to_rational() const {
  Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

std::complex<double> Angle::to_complex() const {
  long double t = 2.0L * 3.14159265358979323846264338327950288L * static_cast<long double>(num) /
                  static_cast<long double>(den);
  return {static_cast<double>(std::cos(t)), static_cast<double>(std::sin(t))};
}

Angle Angle::operator+(const Angle& o) const {
  int64_t l = checked_lcm(den, o.den);
  i128 n = static_cast<i128>(num) * (l / den) + static_cast<i128>(o.num) * (l / o.den);
  return Angle(mod_floor(n, l), l);
}

Angle Angle::operator-() const { return Angle(-num, den); }

Angle Angle::operator-(const Angle& o) const { return *this + (-o); }

bool Angle::operator<(const Angle& o) const {
  if (den != o.den) return den < o.den;
  return num < o.num;
}

std::string Angle::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Cyclo::Cyclo(const Rational& c) { add_term(c, Angle()); }

Cyclo::Cyclo(const Rational& c, const Angle& a) { add_term(c, a); }

Cyclo Cyclo::gaussian(const Rational& re, const Rational& im) {
  Cyclo z(re);
  z.add_term(im, Angle(1, 4));
  return z;
}

void Cyclo::add_term(const Rational& c, const Angle& a) {
  if (c == 0) return;
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    terms_.emplace(a, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
  for (const auto& [a, c] : o.terms_) add_term(c, a);
  return *this;
}

Cyclo& Cyclo::operator-=(const Cyclo& o) {
  for (const auto& [a, c] : o.terms_) add_term(-c, a);
  return *this;
}

Cyclo Cyclo::operator+(const Cyclo& o) const { Cyclo r = *this; r += o; return r; }
Cyclo Cyclo::operator-(const Cyclo& o) const { Cyclo r = *this; r -= o; return r; }

Cyclo Cyclo::operator-() const {
  Cyclo r;
  for (const auto& [a, c] : terms_) r.terms_.emplace(a, -c);
  return r;
}

Cyclo Cyclo::operator*(const Cyclo& o) const {
  Cyclo r;
  for (const auto& [a, c] : terms_)
    for (const auto& [b, d] : o.terms_) r.add_term(c * d, a + b);
  return r;
}

Cyclo Cyclo::operator*(const Rational& s) const {
  Cyclo r;
  if (s == 0) return r;
  for (const auto& [a, c] : terms_) r.terms_.emplace(a, c * s);
  return r;
}

Cyclo Cyclo::rotate(const Angle& b) const {
  Cyclo r;
  for (const auto& [a, c] : terms_) r.add_term(c, a + b);
  return r;
}

Cyclo Cyclo::conj() const {
  Cyclo r;
  for (const auto& [a, c] : terms_) r.add_term(c, -a);
  return r;
}

Cyclo Cyclo::reduced() const {
  if (terms_.empty()) return {};
  int64_t n = 1;
  for (const auto& kv : terms_) n = checked_lcm(n, kv.first.den);
  std::map<int64_t, Rational> work;
  for (const auto& [a, c] : terms_) {
    work[a.num * (n / a.den)] += c;
  }
  for (const auto& [p, e] : factor(n)) {
    int64_t pm = 1;
    for (int i = 0; i < e; ++i) pm *= p;
    int64_t pm1 = pm / p;
    int64_t rest = n / pm;
    int64_t inv_rest = rest == 1 ? 1 : inv_mod(rest % pm, pm);
    std::map<int64_t, Rational> next;
    for (const auto& [k, c] : work) {
      if (c == 0) continue;
      int64_t u = mod_floor(static_cast<i128>(k % pm) * inv_rest, pm);
      if (u / pm1 != p - 1) {
        next[k] += c;
        continue;
      }
      int64_t u0 = u % pm1;
      for (int64_t t = 0; t <= p - 2; ++t) {
        int64_t du = u0 + t * pm1 - u;
        int64_t k2 = mod_floor(static_cast<i128>(k) + static_cast<i128>(du) * rest, n);
        next[k2] -= c;
      }
    }
    work.swap(next);
  }
  Cyclo r;
  for (const auto& [k, c] : work)
    if (c != 0) r.add_term(c, Angle(k, n));
  return r;
}

bool Cyclo::is_zero() const { return reduced().terms_.empty(); }

bool Cyclo::is_rational(Rational* out) const {
  Cyclo r = reduced();
  if (r.terms_.empty()) {
    if (out) *out = 0;
    return true;
  }
  if (r.terms_.size() == 1 && r.terms_.begin()->first.is_zero()) {
    if (out) *out = r.terms_.begin()->second;
    return true;
  }
  return false;
}

std::complex<double> Cyclo::to_complex() const {
  std::complex<double> z = 0;
  for (const auto& [a, c] : terms_) z += c.get_d() * a.to_complex();
  return z;
}

std::string Cyclo::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << rational_str(c);
    if (!a.is_zero()) os << "*e(" << a.str() << ")";
  }
  return os.str();
}

std::string rational_str(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty rational");
  if (s.find_first_of(".eE") == std::string::npos) {
    Rational q;
    if (q.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0) throw std::invalid_argument("bad rational: " + text);
    q.canonicalize();
    return q;
  }
  // decimal or scientific notation, converted exactly
  std::size_t epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  long exp10 = 0;
  if (epos != std::string::npos) exp10 = std::stol(s.substr(epos + 1));
  bool negative = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    negative = mant[0] == '-';
    mant = mant.substr(1);
  }
  std::size_t dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad rational: " + text);
  mpz_class n(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  Rational q = exp10 >= 0 ? Rational(n * scale) : Rational(n, scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace lcaw

namespace lcaw {

namespace {

// Quadratic Gauss sum over an odd prime p: sqrt(p) when p = 1 mod 4, i sqrt(p) otherwise.
Cyclo gauss_sum(long p) {
  Cyclo g;
  for (long a = 1; a < p; ++a) {
    long r = 1;
    for (long e = 0; e < (p - 1) / 2; ++e) r = r * a % p;
    g += Cyclo(Rational(r == 1 ? 1 : -1), Angle(a, p));
  }
  return g;
}

}  // namespace

Cyclo sqrt_cyclo(long n) {
  if (n < 1) throw std::invalid_argument("sqrt_cyclo needs a positive argument");
  Rational outer = 1;
  Cyclo inner(Rational(1));
  for (long p = 2; p * p <= n || n > 1; ++p) {
    if (p * p > n) p = n;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    for (int k = 0; k < e / 2; ++k) outer *= p;
    if (e % 2 == 0) continue;
    if (p == 2)
      inner = inner * (Cyclo::unit(Angle(1, 8)) + Cyclo::unit(Angle(-1, 8)));
    else if (p % 4 == 1)
      inner = inner * gauss_sum(p);
    else
      inner = inner * gauss_sum(p).rotate(Angle(-1, 4));
  }
  return (inner * outer).reduced();
}

}  // namespace lcaw
