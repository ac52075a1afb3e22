#include "lcaw/signal.hpp"

#include <sstream>

namespace lcaw {

namespace {

struct Layout {
  std::vector<int> lo, hi;
};

Layout layout(const Geometry& g, int L, int K) {
  Layout l;
  for (std::size_t i = 0; i < g.size(); ++i) {
    l.lo.push_back(-g.A().shift(i) * L);
    l.hi.push_back(g.A().shift(i) * K);
  }
  return l;
}

}  // namespace

FiniteSignal::FiniteSignal(GeometryPtr g, int L, int K) : geo_(std::move(g)), L_(L), K_(K) {
  if (L < 0 || K < 0) throw std::invalid_argument("signal window exponents must be nonnegative");
  Rational n = geo_->measure(-(L + K));
  if (n.get_num() > 50000000) throw std::invalid_argument("signal window too large");
  values_.assign(n.get_num().get_ui(), Cyclo());
}

Element FiniteSignal::point(std::size_t cell) const {
  const Geometry& g = *geo_;
  Layout lay = layout(g, L_, K_);
  std::vector<Local> comps(g.size());
  for (std::size_t ii = g.size(); ii-- > 0;) {
    const int q = g.group()->field(ii).q();
    Local l;
    l.prec = kExact;
    l.lead = lay.lo[ii];
    l.digits.assign(static_cast<std::size_t>(lay.hi[ii] - lay.lo[ii]), 0);
    for (std::size_t n = l.digits.size(); n-- > 0;) {
      l.digits[n] = static_cast<int>(cell % static_cast<std::size_t>(q));
      cell /= static_cast<std::size_t>(q);
    }
    comps[ii] = std::move(l);
  }
  return Element(g.group(), std::move(comps));
}

std::size_t FiniteSignal::cell_of(const Element& x) const {
  const Geometry& g = *geo_;
  if (!g.in_primal(x, L_)) return cells();
  Layout lay = layout(g, L_, K_);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int q = g.group()->field(i).q();
    if (x.comp(i).prec < lay.hi[i]) throw PrecisionError("point not known to the cell scale");
    for (int n = lay.lo[i]; n < lay.hi[i]; ++n) idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(x.comp(i).digit(n));
  }
  return idx;
}

std::string FiniteSignal::key(std::size_t cell) const {
  Element x = point(cell);
  Layout lay = layout(*geo_, L_, K_);
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ',';
    bool spaced = geo_->group()->field(i).q() > 10;
    for (int n = lay.lo[i]; n < lay.hi[i]; ++n) {
      if (spaced && n > lay.lo[i]) os << ' ';
      os << x.comp(i).digit(n);
    }
  }
  return os.str();
}

std::size_t FiniteSignal::cell_of_key(const std::string& key) const {
  Layout lay = layout(*geo_, L_, K_);
  std::vector<std::string> parts(1);
  for (char ch : key) {
    if (ch == ',') parts.emplace_back();
    else parts.back().push_back(ch);
  }
  if (parts.size() != geo_->size()) throw std::invalid_argument("cell key has wrong component count: " + key);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const int q = geo_->group()->field(i).q();
    std::vector<int> digits;
    if (q > 10) {
      std::istringstream is(parts[i]);
      int d;
      while (is >> d) digits.push_back(d);
    } else {
      for (char ch : parts[i])
        if (ch != ' ') digits.push_back(ch - '0');
    }
    if (static_cast<int>(digits.size()) != lay.hi[i] - lay.lo[i]) throw std::invalid_argument("cell key has wrong length: " + key);
    for (int d : digits) {
      if (d < 0 || d >= q) throw std::invalid_argument("bad digit in cell key: " + key);
      idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(d);
    }
  }
  return idx;
}

Rational abs2(const Cyclo& z) {
  Rational r;
  if (!(z * z.conj()).is_rational(&r)) throw std::logic_error("|z|^2 is not rational");
  return r;
}

Rational FiniteSignal::norm2() const {
  Rational s = 0;
  for (const auto& v : values_)
    if (v.size()) s += abs2(v);
  s *= cell_measure();
  s.canonicalize();
  return s;
}

Cyclo FiniteSignal::integral() const {
  Cyclo s;
  for (const auto& v : values_) s += v;
  return s * cell_measure();
}

bool FiniteSignal::operator==(const FiniteSignal& o) const {
  if (L_ != o.L_ || K_ != o.K_ || values_.size() != o.values_.size()) return false;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!values_[i].equals(o.values_[i])) return false;
  return true;
}

}  // namespace lcaw
