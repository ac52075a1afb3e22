#include "lcaw/operators.hpp"

#include <cmath>

namespace lcaw {

ExactScalar ExactScalar::scaled(const Cyclo& v, int half_power, long base) {
  ExactScalar out;
  out.base = base;
  int h = half_power;
  out.root = (h % 2) != 0;
  int whole = out.root ? (h - 1) / 2 : h / 2;
  mpz_class b;
  mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(std::abs(whole)));
  Rational f = whole >= 0 ? Rational(b) : Rational(1, b);
  f.canonicalize();
  out.value = v * f;
  long root = std::lround(std::sqrt(static_cast<double>(base)));
  if (out.root && root * root == base) {
    out.value = out.value * Rational(root);
    out.root = false;
  }
  return out;
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
  if (o.value.size() == 0) return *this;
  if (value.size() == 0) {
    *this = o;
    return *this;
  }
  if (root != o.root || base != o.base) {
    value = cyclo() + o.cyclo();
    root = false;
    base = 1;
    return *this;
  }
  value += o.value;
  return *this;
}

ExactScalar ExactScalar::operator+(const ExactScalar& o) const {
  ExactScalar r = *this;
  r += o;
  return r;
}

ExactScalar ExactScalar::operator-(const ExactScalar& o) const {
  ExactScalar n = o;
  n.value = -n.value;
  return *this + n;
}

ExactScalar ExactScalar::operator*(const ExactScalar& o) const {
  ExactScalar r;
  r.base = std::max(base, o.base);
  if (root && o.root) {
    if (base != o.base) throw std::logic_error("multiplying scalars with different radicals");
    r.value = value * o.value * Rational(base);
    r.root = false;
  } else {
    r.value = value * o.value;
    r.root = root || o.root;
    r.base = root ? base : o.base;
  }
  return r;
}

ExactScalar ExactScalar::conj() const {
  ExactScalar r = *this;
  r.value = value.conj();
  return r;
}

bool ExactScalar::is_one() const { return equals(ExactScalar{Cyclo(Rational(1))}); }

Rational ExactScalar::abs2() const { return lcaw::abs2(value) * (root ? Rational(base) : Rational(1)); }

Cyclo ExactScalar::cyclo() const {
  if (root && !value.is_zero()) return value * sqrt_cyclo(base);
  return value;
}

std::complex<double> ExactScalar::to_complex() const {
  return value.to_complex() * (root ? std::sqrt(static_cast<double>(base)) : 1.0);
}

std::string ExactScalar::str() const {
  std::string s = value.reduced().str();
  if (root) s = "sqrt(" + std::to_string(base) + ")*(" + s + ")";
  return s;
}

Angle weight_eval(const CosetScheme& D, const Element& s, const Element& gamma) {
  if (s.is_zero()) return Angle();
  const Geometry& g = *D.geometry();
  std::vector<int> prec = g.cutoffs(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.comp(i).is_zero()) continue;
    prec[i] = std::max(prec[i], -g.group()->field(i).r - s.comp(i).valuation() + 1);
  }
  return -pairing(s, D.eta(truncate(gamma, prec)));
}

Cyclo char_integral_diff(const Geometry& g, const Element& u, const Element& v, const BallSet& X) {
  Cyclo out;
  for (const auto& b : X.balls()) {
    std::vector<int> cut = g.primal_cutoffs(b.scale);
    if (digits_below(u, cut) != digits_below(v, cut)) continue;
    out.add_term(g.measure(b.scale), pairing(u, b.center) - pairing(v, b.center));
  }
  return out;
}

Cyclo char_integral(const Geometry& g, const Element& x, const BallSet& X) {
  return char_integral_diff(g, x, Element::zero(g.group()), X);
}

WaveletSymbol::WaveletSymbol(BallSet omega, int a, const Element& s, SchemePtr scheme)
    : omega_(std::move(omega)), a_(a), scheme_(std::move(scheme)) {
  const Geometry& g = *omega_.geometry();
  if (!(*scheme_->geometry() == g)) throw std::invalid_argument("wavelet set and coset scheme disagree");
  s_ = digits_below(s, g.primal_cutoffs(0));
  dilated_ = dilate(omega_, a_);
  pieces_ = coset_refine(omega_, *scheme_);
  level_ = -kExact;
  for (const auto& b : omega_.balls()) level_ = std::max({level_, g.dual_level(b.center), -b.scale});
  spread_ = 0;
  for (const auto& p : pieces_) spread_ = std::max(spread_, p.piece.max_scale());
}

ExactScalar fourier_eval(const WaveletSymbol& psi, const Element& gamma) {
  const Geometry& g = psi.geometry();
  if (!psi.support().contains(gamma)) return ExactScalar::scaled(Cyclo(), -psi.a(), g.index());
  Element beta = g.dual_power(gamma, -psi.a(), psi.support().max_scale());
  return ExactScalar::scaled(Cyclo::unit(weight_eval(*psi.scheme(), psi.s(), beta)), -psi.a(), g.index());
}

namespace {

Cyclo wavelet_core(const WaveletSymbol& psi, const Element& x) {
  const Geometry& g = psi.geometry();
  Element y = g.primal_power(x, psi.a(), psi.support_exponent());
  Cyclo out;
  for (const auto& piece : psi.pieces()) {
    Cyclo c = char_integral_diff(g, y, psi.s(), piece.piece);
    if (c.size() == 0) continue;
    out += c.rotate(pairing(psi.s(), piece.sigma));
  }
  return out;
}

template <class Add>
void gram_terms(const WaveletSymbol& p, const WaveletSymbol& q, const OverlapTerms& t, Add add) {
  const Geometry& g = p.geometry();
  const Element u = g.primal_power(q.s(), -q.a(), 0);
  const Element v = g.primal_power(p.s(), -p.a(), 0);
  for (const auto& b : t.balls) {
    if (digits_below(u, b.cut) != digits_below(v, b.cut)) continue;
    Angle angle = pairing(p.s(), b.sigma_p) - pairing(q.s(), b.sigma_q) + pairing(u, b.center) - pairing(v, b.center);
    add(b.measure, angle);
  }
}

}  // namespace

ExactScalar wavelet_eval(const WaveletSymbol& psi, const Element& x) {
  return ExactScalar::scaled(wavelet_core(psi, x), psi.a(), psi.geometry().index());
}

OverlapTerms overlap_terms(const WaveletSymbol& p, const WaveletSymbol& q) {
  const Geometry& g = p.geometry();
  OverlapTerms out;
  BallSet X = intersect(p.support(), q.support());
  if (X.empty()) return out;
  const int a = p.a(), b = q.a();
  for (const auto& ball : refine(X, std::max(-a, -b))) {
    OverlapTerms::Term t;
    t.measure = g.measure(ball.scale);
    t.cut = g.primal_cutoffs(ball.scale);
    t.center = ball.center;
    t.sigma_p = p.scheme()->theta(g.center(g.dual_power(ball.center, -a, ball.scale), ball.scale + a));
    t.sigma_q = q.scheme()->theta(g.center(g.dual_power(ball.center, -b, ball.scale), ball.scale + b));
    out.balls.push_back(std::move(t));
  }
  return out;
}

ExactScalar inner_product(const WaveletSymbol& p, const WaveletSymbol& q, const OverlapTerms& t) {
  Cyclo sum;
  gram_terms(p, q, t, [&](const Rational& m, const Angle& a) { sum.add_term(m, a); });
  return ExactScalar::scaled(sum, -(p.a() + q.a()), p.geometry().index());
}

std::complex<double> inner_product_float(const WaveletSymbol& p, const WaveletSymbol& q, const OverlapTerms& t) {
  std::complex<double> sum = 0;
  gram_terms(p, q, t, [&](const Rational& m, const Angle& a) { sum += m.get_d() * a.to_complex(); });
  return sum * std::pow(static_cast<double>(p.geometry().index()), -(p.a() + q.a()) / 2.0);
}

ExactScalar inner_product(const WaveletSymbol& p, const WaveletSymbol& q) {
  return inner_product(p, q, overlap_terms(p, q));
}

std::complex<double> inner_product_float(const WaveletSymbol& p, const WaveletSymbol& q) {
  return inner_product_float(p, q, overlap_terms(p, q));
}

ExactScalar analysis_coeff(const FiniteSignal& f, const WaveletSymbol& psi) {
  const Geometry& g = psi.geometry();
  if (!(*f.geometry() == g)) throw std::invalid_argument("signal and wavelet live on different groups");
  if (psi.constancy_exponent() > f.K())
    throw RefinementNeeded("wavelet at dilation " + std::to_string(psi.a()) + " needs cells of exponent " +
                           std::to_string(psi.constancy_exponent()) + " but the signal has " + std::to_string(f.K()));
  Cyclo sum;
  for (std::size_t c = 0; c < f.cells(); ++c) {
    const Cyclo& v = f.value(c);
    if (v.size() == 0) continue;
    Cyclo w = wavelet_core(psi, f.point(c));
    if (w.size() == 0) continue;
    sum += v * w.conj();
  }
  return ExactScalar::scaled(sum * f.cell_measure(), psi.a(), g.index());
}

}  // namespace lcaw
