#include "lcaw/group.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lcaw {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int sat(long v) {
  if (v >= kExact / 2) return kExact;
  if (v <= -kExact / 2) throw PrecisionError("precision out of range");
  return static_cast<int>(v);
}

int vp(long n, int p) {
  int v = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

Local canon(Local x) {
  if (!x.exact()) {
    int keep = std::max(0, std::min<int>(static_cast<int>(x.digits.size()), x.prec - x.lead));
    if (x.lead >= x.prec) keep = 0;
    x.digits.resize(keep);
  }
  std::size_t front = 0;
  while (front < x.digits.size() && x.digits[front] == 0) ++front;
  if (front == x.digits.size()) {
    x.digits.clear();
    x.lead = x.prec;
    return x;
  }
  x.digits.erase(x.digits.begin(), x.digits.begin() + static_cast<long>(front));
  x.lead += static_cast<int>(front);
  while (!x.digits.empty() && x.digits.back() == 0) x.digits.pop_back();
  return x;
}

// Coefficients c[i] at index lo+i (any sign) reduced to digits with the field's carry rule.
Local normalize(const FieldSpec& f, int lo, std::vector<int64_t> c, int prec) {
  const int q = f.q();
  const auto& carry = f.rule.carry;
  const std::size_t original = c.size();
  std::size_t i = 0;
  while (i < c.size()) {
    long idx = static_cast<long>(lo) + static_cast<long>(i);
    if (idx >= prec) {
      c.resize(i);
      break;
    }
    int64_t v = c[i];
    if (v < 0 || v >= q) {
      int64_t t = floor_div(v, q);
      c[i] = v - t * q;
      if (!carry.empty()) {
        std::size_t need = i + carry.size() + 1;
        if (c.size() < need) c.resize(need, 0);
        for (std::size_t k = 0; k < carry.size(); ++k) c[i + 1 + k] += t * carry[k];
      }
    }
    ++i;
    if (prec >= kExact && i > original + 4 * (carry.size() + 1) + 64) {
      bool borrow_only = true;
      for (std::size_t k = i; k < c.size(); ++k)
        if (c[k] > 0) borrow_only = false;
      if (borrow_only) throw PrecisionError("exact difference has an infinite digit expansion");
    }
  }
  Local out;
  out.lead = lo;
  out.prec = prec;
  out.digits.assign(c.begin(), c.end());
  return canon(out);
}

Local local_zero(int prec) {
  Local z;
  z.prec = prec;
  z.lead = prec;
  return z;
}

Local local_combine(const FieldSpec& f, const Local& x, const Local& y, int sign) {
  int prec = std::min(x.prec, y.prec);
  if (x.is_zero() && y.is_zero()) return local_zero(prec);
  int lo = kExact, hi = -kExact;
  if (!x.is_zero()) { lo = std::min(lo, x.lead); hi = std::max(hi, x.end()); }
  if (!y.is_zero()) { lo = std::min(lo, y.lead); hi = std::max(hi, y.end()); }
  if (lo >= prec) return local_zero(prec);
  std::vector<int64_t> c(static_cast<std::size_t>(hi - lo), 0);
  for (std::size_t i = 0; i < x.digits.size(); ++i) c[x.lead - lo + i] += x.digits[i];
  for (std::size_t i = 0; i < y.digits.size(); ++i) c[y.lead - lo + i] += sign * y.digits[i];
  return normalize(f, lo, std::move(c), prec);
}

Local local_mul(const FieldSpec& f, const Local& x, const Local& y) {
  int vx = x.valuation(), vy = y.valuation();
  int prec;
  if (x.exact() && y.exact()) {
    prec = kExact;
  } else {
    prec = std::min(sat(static_cast<long>(x.prec) + vy), sat(static_cast<long>(y.prec) + vx));
  }
  if (x.is_zero() || y.is_zero()) return local_zero(prec);
  if (prec <= static_cast<long>(vx) + vy) {
    throw PrecisionError("product known to fewer than one digit");
  }
  std::vector<int64_t> c(x.digits.size() + y.digits.size() - 1, 0);
  for (std::size_t i = 0; i < x.digits.size(); ++i) {
    if (x.digits[i] == 0) continue;
    for (std::size_t j = 0; j < y.digits.size(); ++j) c[i + j] += static_cast<int64_t>(x.digits[i]) * y.digits[j];
  }
  return normalize(f, x.lead + y.lead, std::move(c), prec);
}

Local local_truncate(const Local& x, int prec) {
  Local y = x;
  y.prec = std::min(x.prec, prec);
  return canon(y);
}

int inv_mod_small(int a, int q) {
  for (int b = 1; b < q; ++b)
    if ((static_cast<long>(a) * b) % q == 1) return b;
  throw std::domain_error("digit not invertible");
}

Local local_from_rational(const FieldSpec& f, const Rational& value, int prec) {
  if (value == 0) return local_zero(kExact);
  if (f.kind == FieldKind::Laurent) {
    if (value.get_den() != 1) throw std::invalid_argument("Laurent field constants must be integers");
    mpz_class r = value.get_num() % f.p;
    if (r < 0) r += f.p;
    Local x;
    x.prec = kExact;
    x.lead = 0;
    x.digits = {static_cast<int>(r.get_si())};
    return canon(x);
  }
  const int p = f.p;
  mpz_class num = value.get_num(), den = value.get_den();
  int v = 0;
  while (num % p == 0) { num /= p; ++v; }
  while (den % p == 0) { den /= p; --v; }
  std::vector<int> qdigits;
  bool exact = false;
  if (den == 1 && num > 0) {
    exact = true;
    mpz_class t = num;
    while (t > 0) {
      mpz_class d = t % p;
      qdigits.push_back(static_cast<int>(d.get_si()));
      t /= p;
    }
  } else {
    if (prec >= kExact) throw PrecisionError("rational has an infinite expansion; a precision is required");
    long base_prec = (static_cast<long>(prec) + f.e - 1) / f.e;  // Q_p digits needed
    long count = base_prec - v;
    if (count <= 0) return local_zero(prec);
    mpz_class m;
    mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(count));
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    mpz_class t = (num * inv) % m;
    if (t < 0) t += m;
    for (long i = 0; i < count; ++i) {
      mpz_class d = t % p;
      qdigits.push_back(static_cast<int>(d.get_si()));
      t /= p;
    }
  }
  Local x;
  x.prec = exact ? kExact : prec;
  x.lead = v * f.e;
  x.digits.assign(qdigits.size() == 0 ? 0 : (qdigits.size() - 1) * f.e + 1, 0);
  for (std::size_t i = 0; i < qdigits.size(); ++i) x.digits[i * f.e] = qdigits[i];
  return canon(x);
}

void require_same(const Element& x, const Element& y) {
  if (!same_group(x.group(), y.group())) throw std::invalid_argument("elements belong to different groups");
}

Angle local_character(const FieldSpec& f, const Local& z) {
  if (z.prec < -f.r) throw PrecisionError("pairing needs the product modulo pi^(-r)");
  if (z.is_zero()) return Angle();
  if (f.kind == FieldKind::Laurent) return Angle(z.digit(-1), f.p);
  // chi(Tr(z)) with Tr(pi^n) = e p^(n/e) when e | n and 0 otherwise
  Rational sum = 0;
  for (std::size_t i = 0; i < z.digits.size(); ++i) {
    int n = z.lead + static_cast<int>(i);
    int d = z.digits[i];
    if (d == 0 || n % f.e != 0) continue;
    int k = n / f.e;
    if (k + vp(f.e, f.p) >= 0) continue;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(f.p), static_cast<unsigned long>(-k));
    sum += Rational(mpz_class(static_cast<long>(d) * f.e), pk);
  }
  sum.canonicalize();
  return Angle::from_rational(sum);
}

std::vector<int> parse_digit_run(const std::string& s, int q) {
  std::vector<int> out;
  if (q <= 10) {
    for (char ch : s) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw std::invalid_argument("bad digit in literal: " + s);
      out.push_back(ch - '0');
    }
  } else {
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(std::stoi(tok));
  }
  for (int d : out)
    if (d < 0 || d >= q) throw std::invalid_argument("digit out of range in literal: " + s);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Local parse_local(const FieldSpec& f, const std::string& raw, int prec) {
  std::string s = trim(raw);
  if (s.empty()) throw std::invalid_argument("empty element literal");
  if (s[0] != '(') return local_from_rational(f, parse_rational(s), prec);
  std::size_t close = s.find(')');
  std::size_t bar = s.find('|');
  std::size_t at = s.find('@', close == std::string::npos ? 0 : close);
  if (close == std::string::npos || bar == std::string::npos || bar > close || at == std::string::npos)
    throw std::invalid_argument("malformed digit literal: " + s);
  int base = std::stoi(trim(s.substr(at + 1)));
  if (base != f.q()) throw std::invalid_argument("literal base " + std::to_string(base) + " does not match " + f.name());
  std::vector<int> left = parse_digit_run(s.substr(1, bar - 1), f.q());
  std::vector<int> right = parse_digit_run(s.substr(bar + 1, close - bar - 1), f.q());
  Local x;
  x.prec = kExact;
  x.lead = -static_cast<int>(left.size());
  x.digits = left;
  x.digits.insert(x.digits.end(), right.begin(), right.end());
  x = canon(x);
  if (prec < kExact) x = local_truncate(x, prec);
  return x;
}

std::string format_local(const FieldSpec& f, const Local& x) {
  const bool spaced = f.q() > 10;
  auto put = [&](std::ostringstream& os, int d, bool& first) {
    if (spaced && !first) os << ' ';
    os << d;
    first = false;
  };
  std::ostringstream os;
  os << '(';
  bool first = true;
  if (!x.is_zero()) {
    for (int n = std::min(x.lead, 0); n < 0; ++n) put(os, x.digit(n), first);
  }
  os << '|';
  first = true;
  if (!x.is_zero()) {
    for (int n = 0; n < x.end(); ++n) put(os, x.digit(n), first);
  }
  os << ")@" << f.q();
  return os.str();
}

}  // namespace

CarryRule CarryRule::base(int p) { return CarryRule{p, {1}}; }

CarryRule CarryRule::none(int p) { return CarryRule{p, {}}; }

CarryRule CarryRule::ramified(int p, int e) {
  CarryRule c{p, std::vector<int>(static_cast<std::size_t>(e), 0)};
  c.carry[static_cast<std::size_t>(e - 1)] = 1;
  return c;
}

CarryRule::Entry CarryRule::entry(int sum) const {
  Entry out{sum % q, {}};
  int t = sum / q;
  if (t != 0 && !carry.empty()) {
    out.carry = carry;
    for (int& d : out.carry) d *= t;
  }
  return out;
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::string FieldSpec::name() const {
  switch (kind) {
    case FieldKind::Prime: return "Q_" + std::to_string(p);
    case FieldKind::Laurent: return "F_" + std::to_string(p) + "((t))";
    case FieldKind::Ramified:
      if (e == 2) return "Q_" + std::to_string(p) + "(sqrt" + std::to_string(p) + ")";
      return "Q_" + std::to_string(p) + "(" + std::to_string(p) + "^(1/" + std::to_string(e) + "))";
  }
  return "?";
}

Group GroupSpec::prime_field(int p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  auto g = std::make_shared<GroupSpec>();
  g->fields_.push_back(FieldSpec{FieldKind::Prime, p, 1, CarryRule::base(p), 0});
  return g;
}

Group GroupSpec::laurent_field(int p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  auto g = std::make_shared<GroupSpec>();
  g->fields_.push_back(FieldSpec{FieldKind::Laurent, p, 1, CarryRule::none(p), 0});
  return g;
}

Group GroupSpec::pi_extension(int p, int e, int r) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  if (e < 1) throw std::invalid_argument("ramification index must be positive");
  if (e == 1) {
    if (r != 0) throw std::invalid_argument("unramified different exponent must be 0");
    return prime_field(p);
  }
  int expected = e * vp(e, p) + e - 1;
  if (r != expected)
    throw std::invalid_argument("different exponent of pi^" + std::to_string(e) + " = " + std::to_string(p) +
                                " is " + std::to_string(expected));
  auto g = std::make_shared<GroupSpec>();
  g->fields_.push_back(FieldSpec{FieldKind::Ramified, p, e, CarryRule::ramified(p, e), r});
  return g;
}

Group GroupSpec::q2_sqrt2() { return pi_extension(2, 2, 3); }

Group GroupSpec::product(const std::vector<Group>& parts) {
  auto g = std::make_shared<GroupSpec>();
  for (const auto& part : parts) {
    if (!part) throw std::invalid_argument("null product component");
    g->fields_.insert(g->fields_.end(), part->fields_.begin(), part->fields_.end());
  }
  if (g->fields_.size() < 2) throw std::invalid_argument("a product needs at least two components");
  return g;
}

std::string GroupSpec::name() const {
  std::string s;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i) s += " x ";
    s += fields_[i].name();
  }
  return s;
}

bool same_group(const Group& a, const Group& b) { return a == b || (a && b && *a == *b); }

int Local::digit(int n) const {
  if (n < lead || n >= end()) return 0;
  return digits[static_cast<std::size_t>(n - lead)];
}

Element::Element(Group g, std::vector<Local> comps) : group_(std::move(g)), comps_(std::move(comps)) {
  if (!group_) throw std::invalid_argument("element without group");
  if (comps_.size() != group_->size()) throw std::invalid_argument("component count mismatch");
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    for (int d : comps_[i].digits)
      if (d < 0 || d >= group_->field(i).q()) throw std::invalid_argument("digit out of range");
    comps_[i] = canon(comps_[i]);
  }
}

Element Element::zero(const Group& g) { return Element(g, std::vector<Local>(g->size(), local_zero(kExact))); }

Element Element::zero(const Group& g, const std::vector<int>& prec) {
  std::vector<Local> c;
  for (std::size_t i = 0; i < g->size(); ++i) c.push_back(local_zero(prec.at(i)));
  return Element(g, std::move(c));
}

Element Element::from_rationals(const Group& g, const std::vector<Rational>& values, int prec) {
  if (values.size() != g->size()) throw std::invalid_argument("one rational per component expected");
  std::vector<Local> c;
  for (std::size_t i = 0; i < values.size(); ++i) c.push_back(local_from_rational(g->field(i), values[i], prec));
  return Element(g, std::move(c));
}

Element Element::from_rational(const Group& g, const Rational& value, int prec) {
  return from_rationals(g, std::vector<Rational>(g->size(), value), prec);
}

Element Element::monomial(const Group& g, std::size_t comp, int k, int digit) {
  std::vector<Local> c(g->size(), local_zero(kExact));
  c.at(comp).lead = k;
  c.at(comp).digits = {digit};
  return Element(g, std::move(c));
}

bool Element::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Local& l) { return l.is_zero(); });
}

bool Element::exact() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Local& l) { return l.exact(); });
}

std::vector<int> Element::valuations() const {
  std::vector<int> v;
  for (const auto& l : comps_) v.push_back(l.valuation());
  return v;
}

std::vector<int> Element::precisions() const {
  std::vector<int> v;
  for (const auto& l : comps_) v.push_back(l.prec);
  return v;
}

bool Element::operator==(const Element& o) const { return same_group(group_, o.group_) && comps_ == o.comps_; }

std::string Element::str() const { return format_element(*this); }

Element add(const Element& x, const Element& y) {
  require_same(x, y);
  std::vector<Local> c;
  for (std::size_t i = 0; i < x.size(); ++i) c.push_back(local_combine(x.group()->field(i), x.comp(i), y.comp(i), 1));
  return Element(x.group(), std::move(c));
}

Element sub(const Element& x, const Element& y) {
  require_same(x, y);
  std::vector<Local> c;
  for (std::size_t i = 0; i < x.size(); ++i) c.push_back(local_combine(x.group()->field(i), x.comp(i), y.comp(i), -1));
  return Element(x.group(), std::move(c));
}

Element neg(const Element& x) { return sub(Element::zero(x.group()), x); }

Element mul(const Element& x, const Element& y) {
  require_same(x, y);
  std::vector<Local> c;
  for (std::size_t i = 0; i < x.size(); ++i) c.push_back(local_mul(x.group()->field(i), x.comp(i), y.comp(i)));
  return Element(x.group(), std::move(c));
}

Element truncate(const Element& x, const std::vector<int>& prec) {
  std::vector<Local> c;
  for (std::size_t i = 0; i < x.size(); ++i) c.push_back(local_truncate(x.comp(i), prec.at(i)));
  return Element(x.group(), std::move(c));
}

Element shift(const Element& x, const std::vector<int>& k) {
  std::vector<Local> c = x.comps();
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i].lead = sat(static_cast<long>(c[i].lead) + k.at(i));
    if (!c[i].exact()) c[i].prec = sat(static_cast<long>(c[i].prec) + k.at(i));
    if (c[i].is_zero()) c[i].lead = c[i].prec;
  }
  return Element(x.group(), std::move(c));
}

Element inverse_unit(const Element& u, int prec) {
  std::vector<Local> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const FieldSpec& f = u.group()->field(i);
    const Local& ui = u.comp(i);
    if (ui.valuation() != 0) throw std::invalid_argument("not a unit");
    int inv0 = inv_mod_small(ui.digit(0), f.q());
    Local one;
    one.lead = 0;
    one.prec = prec;
    one.digits = {1};
    one = canon(one);
    Local v = local_zero(prec);
    for (int n = 0; n < prec; ++n) {
      Local prod = local_truncate(local_mul(f, ui, v), prec);
      Local diff = local_combine(f, one, prod, -1);
      int d = diff.digit(n);
      if (d == 0) continue;
      Local step;
      step.lead = n;
      step.prec = prec;
      step.digits = {static_cast<int>((static_cast<long>(d) * inv0) % f.q())};
      v = local_combine(f, v, step, 1);
    }
    out.push_back(v);
  }
  return Element(u.group(), std::move(out));
}

Angle pairing(const Element& x, const Element& gamma) {
  require_same(x, gamma);
  Angle total;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const FieldSpec& f = x.group()->field(i);
    Local z = local_mul(f, x.comp(i), gamma.comp(i));
    total = total + local_character(f, z);
  }
  return total;
}

Element parse_element(const Group& g, const std::string& raw, int prec) {
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw std::invalid_argument("unterminated product literal: " + s);
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      char ch = s[i];
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    parts.push_back(cur);
    if (parts.size() != g->size()) throw std::invalid_argument("product literal has wrong arity: " + s);
    std::vector<Local> c;
    for (std::size_t i = 0; i < parts.size(); ++i) c.push_back(parse_local(g->field(i), parts[i], prec));
    return Element(g, std::move(c));
  }
  if (g->size() != 1) {
    if (s.empty() || s[0] == '(') throw std::invalid_argument("product elements need the [c1, c2, ...] form");
    return Element::from_rational(g, parse_rational(s), prec);
  }
  return Element(g, {parse_local(g->field(0), s, prec)});
}

std::string format_element(const Element& x) {
  if (x.size() == 1) return format_local(x.group()->field(0), x.comp(0));
  std::string s = "[";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += format_local(x.group()->field(i), x.comp(i));
  }
  return s + "]";
}

Automorphism Automorphism::monomial(const Group& g, std::vector<int> shifts, std::vector<Element> units) {
  if (shifts.size() != g->size()) throw std::invalid_argument("one valuation shift per component expected");
  Automorphism a;
  a.group_ = g;
  a.shifts_ = std::move(shifts);
  a.unit_ = Element::from_rational(g, 1);
  if (!units.empty()) {
    if (units.size() != 1) throw std::invalid_argument("give the unit as a single group element");
    const Element& u = units[0];
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u.comp(i).valuation() != 0) throw std::invalid_argument("automorphism unit must have absolute value 1");
    a.unit_ = u;
    a.trivial_ = u == Element::from_rational(g, 1);
  }
  return a;
}

Automorphism Automorphism::scalar_inverse_uniformizer(const Group& g) {
  return monomial(g, std::vector<int>(g->size(), 1));
}

Element Automorphism::apply_power(const Element& x, int n, int prec) const {
  if (!same_group(x.group(), group_)) throw std::invalid_argument("automorphism applied to a foreign element");
  Element y = x;
  if (!trivial_ && n != 0) {
    Element u = n > 0 ? unit_ : inverse_unit(unit_, prec);
    for (int k = 0; k < std::abs(n); ++k) y = mul(y, u);
  }
  std::vector<int> k(shifts_.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = -shifts_[i] * n;
  return lcaw::shift(y, k);
}

Automorphism Automorphism::adjoint() const {
  Automorphism a = *this;
  a.dual_ = !dual_;
  return a;
}

Automorphism Automorphism::inverse(int prec) const {
  Automorphism a = *this;
  for (int& s : a.shifts_) s = -s;
  if (!trivial_) a.unit_ = inverse_unit(unit_, prec);
  return a;
}

Automorphism Automorphism::compose(const Automorphism& b) const {
  if (!same_group(group_, b.group_) || dual_ != b.dual_) throw std::invalid_argument("incompatible automorphisms");
  Automorphism a = *this;
  for (std::size_t i = 0; i < shifts_.size(); ++i) a.shifts_[i] += b.shifts_[i];
  if (!b.trivial_) {
    a.unit_ = mul(unit_, b.unit_);
    a.trivial_ = a.unit_ == Element::from_rational(group_, 1);
  }
  return a;
}

Automorphism Automorphism::power(int n, int prec) const {
  Automorphism base = n >= 0 ? *this : inverse(prec);
  Automorphism a = *this;
  for (int& s : a.shifts_) s = 0;
  a.unit_ = Element::from_rational(group_, 1);
  a.trivial_ = true;
  for (int k = 0; k < std::abs(n); ++k) a = a.compose(base);
  return a;
}

Rational Automorphism::modulus() const {
  Rational m = 1;
  for (std::size_t i = 0; i < shifts_.size(); ++i) {
    mpz_class qa;
    mpz_ui_pow_ui(qa.get_mpz_t(), static_cast<unsigned long>(group_->field(i).q()),
                  static_cast<unsigned long>(std::abs(shifts_[i])));
    if (shifts_[i] >= 0) m *= qa;
    else m /= qa;
  }
  m.canonicalize();
  return m;
}

long Automorphism::modulus_int() const {
  Rational m = modulus();
  if (m.get_den() != 1 || !m.get_num().fits_slong_p()) throw std::domain_error("modulus is not a machine integer");
  return m.get_num().get_si();
}

bool Automorphism::is_expansive() const {
  return !shifts_.empty() && std::all_of(shifts_.begin(), shifts_.end(), [](int a) { return a >= 1; });
}

ExpansiveReport Automorphism::expansive_report(int depth) const {
  ExpansiveReport rep;
  rep.expansive = is_expansive();
  rep.depth = depth;
  rep.shifts = shifts_;
  rep.dual_cover = true;
  Automorphism dual = acts_on_dual() ? *this : adjoint();
  for (std::size_t i = 0; i < group_->size() && rep.dual_cover; ++i) {
    const int r = group_->field(i).r;
    for (int d = 1; d <= depth; ++d) {
      Element g = Element::monomial(group_, i, -r - d);
      bool covered = false;
      for (int n = 0; n <= depth && !covered; ++n) {
        Element h = dual.apply_power(g, -n);
        covered = h.comp(i).valuation() >= -r;
      }
      if (!covered) {
        rep.dual_cover = false;
        rep.witness = group_->field(i).name() + ": pi^" + std::to_string(-r - d) +
                      " lies in no (A*)^n H^perp with n <= " + std::to_string(depth);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < shifts_.size() && rep.witness.empty(); ++i) {
    if (shifts_[i] < 1) {
      rep.witness = group_->field(i).name() + ": valuation shift " + std::to_string(shifts_[i]) +
                    (shifts_[i] == 0 ? " fixes H on this factor" : " contracts H on this factor");
    }
  }
  return rep;
}

bool Automorphism::operator==(const Automorphism& o) const {
  return same_group(group_, o.group_) && shifts_ == o.shifts_ && unit_ == o.unit_ && dual_ == o.dual_;
}

}  // namespace lcaw
