#include "lcaw/geometry.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace lcaw {

namespace {

int ceil_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

bool local_less(const Local& a, const Local& b) {
  if (a.lead != b.lead) return a.lead < b.lead;
  if (a.prec != b.prec) return a.prec < b.prec;
  return a.digits < b.digits;
}

void require_geometry(const BallSet& X, const BallSet& Y) {
  if (!X.geometry() || !Y.geometry() || !(*X.geometry() == *Y.geometry()))
    throw std::invalid_argument("ball sets live in different geometries");
}

using Index = std::map<int, std::set<Element, ElementLess>>;

Index index_of(const Geometry& g, const std::vector<Ball>& balls) {
  (void)g;
  Index idx;
  for (const auto& b : balls) idx[b.scale].insert(b.center);
  return idx;
}

// Scale of the ball of idx containing (c, k) at scale <= k (or < k when strict); kExact if none.
int ancestor_scale(const Geometry& g, const Index& idx, const Element& c, int k, bool strict) {
  for (const auto& [s, centers] : idx) {
    if (s > k || (strict && s == k)) break;
    if (centers.count(s == k ? c : g.center(c, s))) return s;
  }
  return kExact;
}

}  // namespace

Element digits_below(const Element& x, const std::vector<int>& cut) {
  std::vector<Local> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Local& l = x.comp(i);
    if (l.prec < cut.at(i)) throw PrecisionError("element not known to the required scale");
    Local t;
    t.prec = kExact;
    t.lead = l.lead;
    int keep = std::clamp(cut[i] - l.lead, 0, static_cast<int>(l.digits.size()));
    t.digits.assign(l.digits.begin(), l.digits.begin() + keep);
    if (t.digits.empty()) t.lead = kExact;
    out.push_back(std::move(t));
  }
  return Element(x.group(), std::move(out));
}

bool element_less(const Element& a, const Element& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (local_less(a.comp(i), b.comp(i))) return true;
    if (local_less(b.comp(i), a.comp(i))) return false;
  }
  return false;
}

Geometry::Geometry(Automorphism A) : A_(std::move(A)) {
  if (!A_.is_expansive()) throw std::invalid_argument("the dilation must be expansive on every component");
  if (A_.acts_on_dual()) A_ = A_.adjoint();
  dual_ = A_.adjoint();
  index_ = A_.modulus_int();
}

GeometryPtr make_geometry(const Automorphism& A) { return std::make_shared<const Geometry>(A); }

int Geometry::cutoff(std::size_t i, int k) const { return A_.shift(i) * k - group()->field(i).r; }

std::vector<int> Geometry::cutoffs(int k) const {
  std::vector<int> c(size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cutoff(i, k);
  return c;
}

std::vector<int> Geometry::primal_cutoffs(int k) const {
  std::vector<int> c(size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -A_.shift(i) * k;
  return c;
}

bool Geometry::in_primal(const Element& x, int k) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const Local& l = x.comp(i);
    int c = -A_.shift(i) * k;
    if (l.is_zero()) {
      if (l.prec < c) throw PrecisionError("element not known to the required scale");
      continue;
    }
    if (l.lead < c) return false;
  }
  return true;
}

bool Geometry::in_dual_ball(const Element& gamma, int k) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const Local& l = gamma.comp(i);
    int c = cutoff(i, k);
    if (l.is_zero()) {
      if (l.prec < c) throw PrecisionError("element not known to the required scale");
      continue;
    }
    if (l.lead < c) return false;
  }
  return true;
}

Rational Geometry::measure(int k) const {
  mpz_class m;
  mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(index_), static_cast<unsigned long>(std::abs(k)));
  Rational out = k >= 0 ? Rational(1, m) : Rational(m);
  out.canonicalize();
  return out;
}

int Geometry::child_index(const Element& c, int k) const {
  long idx = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const int q = group()->field(i).q();
    const Local& l = c.comp(i);
    int hi = cutoff(i, k + 1);
    if (l.prec < hi) throw PrecisionError("element not known to the required scale");
    for (int n = cutoff(i, k); n < hi; ++n) idx = idx * q + l.digit(n);
  }
  return static_cast<int>(idx);
}

Element Geometry::child_center(const Element& c, int k, long idx) const {
  std::vector<Local> comps = c.comps();
  for (std::size_t ii = size(); ii-- > 0;) {
    const int q = group()->field(ii).q();
    int lo = cutoff(ii, k), hi = cutoff(ii, k + 1);
    std::vector<int> block(static_cast<std::size_t>(hi - lo));
    for (int n = hi - 1; n >= lo; --n) {
      block[static_cast<std::size_t>(n - lo)] = static_cast<int>(idx % q);
      idx /= q;
    }
    Local& l = comps[ii];
    Local t;
    t.prec = kExact;
    if (l.is_zero()) {
      t.lead = lo;
    } else {
      t.lead = l.lead;
      t.digits = l.digits;
      t.digits.resize(static_cast<std::size_t>(lo - l.lead), 0);
    }
    t.digits.insert(t.digits.end(), block.begin(), block.end());
    l = t;
  }
  return Element(group(), std::move(comps));
}

int Geometry::dual_level(const Element& gamma) const {
  int n = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const Local& l = gamma.comp(i);
    if (l.is_zero()) continue;
    n = std::max(n, ceil_div(-group()->field(i).r - l.lead, A_.shift(i)));
  }
  return n;
}

int Geometry::primal_level(const Element& x) const {
  int k = -kExact;
  for (std::size_t i = 0; i < size(); ++i) {
    const Local& l = x.comp(i);
    if (l.is_zero()) continue;
    k = std::max(k, ceil_div(-l.lead, A_.shift(i)));
  }
  return k;
}

Element Geometry::dual_power(const Element& gamma, int n, int k) const {
  if (dual_.trivial_units() || n >= 0) return dual_.apply_power(gamma, n);
  int prec = 1;
  for (std::size_t i = 0; i < size(); ++i) prec = std::max(prec, cutoff(i, k) - gamma.comp(i).valuation() + 1);
  return dual_.apply_power(gamma, n, prec);
}

Element Geometry::primal_power(const Element& x, int n, int k) const {
  if (A_.trivial_units() || n >= 0) return A_.apply_power(x, n);
  int prec = 1;
  for (std::size_t i = 0; i < size(); ++i) prec = std::max(prec, -A_.shift(i) * k - x.comp(i).valuation() + 1);
  return A_.apply_power(x, n, prec);
}

bool ball_less(const Ball& a, const Ball& b) {
  if (a.scale != b.scale) return a.scale < b.scale;
  return element_less(a.center, b.center);
}

BallSet::BallSet(GeometryPtr g, std::vector<Ball> balls) : geo_(std::move(g)) {
  *this = canonicalize(geo_, std::move(balls));
}

BallSet BallSet::ball(GeometryPtr g, const Element& center, int scale) {
  BallSet X(g);
  X.balls_.push_back(Ball{g->center(center, scale), scale});
  return X;
}

BallSet BallSet::origin(GeometryPtr g, int k) { return ball(g, Element::zero(g->group()), k); }

int BallSet::min_scale() const {
  if (balls_.empty()) throw std::logic_error("empty ball set has no scale");
  return balls_.front().scale;
}

int BallSet::max_scale() const {
  if (balls_.empty()) throw std::logic_error("empty ball set has no scale");
  return balls_.back().scale;
}

Rational BallSet::measure() const {
  Rational m = 0;
  for (const auto& b : balls_) m += geo_->measure(b.scale);
  m.canonicalize();
  return m;
}

bool BallSet::contains(const Element& gamma) const {
  for (const auto& b : balls_)
    if (geo_->center(gamma, b.scale) == b.center) return true;
  return false;
}

BallSet canonicalize(const GeometryPtr& g, std::vector<Ball> balls) {
  for (auto& b : balls) b.center = g->center(b.center, b.scale);
  std::sort(balls.begin(), balls.end(), ball_less);
  balls.erase(std::unique(balls.begin(), balls.end()), balls.end());
  Index kept;
  for (const auto& b : balls) {
    if (ancestor_scale(*g, kept, b.center, b.scale, true) != kExact) continue;
    kept[b.scale].insert(b.center);
  }
  const long A = g->index();
  if (!kept.empty()) {
    for (int k = kept.rbegin()->first; !kept.empty() && k > kept.begin()->first - 1; --k) {
      auto it = kept.find(k);
      if (it == kept.end()) continue;
      std::map<Element, long, ElementLess> count;
      for (const auto& c : it->second) ++count[g->center(c, k - 1)];
      std::vector<Element> parents;
      for (const auto& [p, n] : count)
        if (n == A) parents.push_back(p);
      if (parents.empty()) continue;
      auto& level = it->second;
      for (auto c = level.begin(); c != level.end();) {
        if (std::binary_search(parents.begin(), parents.end(), g->center(*c, k - 1), element_less)) c = level.erase(c);
        else ++c;
      }
      if (level.empty()) kept.erase(it);
      kept[k - 1].insert(parents.begin(), parents.end());
    }
  }
  BallSet out(g);
  for (const auto& [k, centers] : kept)
    for (const auto& c : centers) out.balls_.push_back(Ball{c, k});
  return out;
}

std::vector<Ball> children(const Geometry& g, const Ball& b) {
  std::vector<Ball> out;
  out.reserve(static_cast<std::size_t>(g.index()));
  for (long e = 0; e < g.index(); ++e) out.push_back(Ball{g.child_center(b.center, b.scale, e), b.scale + 1});
  return out;
}

std::vector<Ball> refine(const BallSet& X, int k) {
  std::vector<Ball> out;
  std::vector<Ball> stack(X.balls().rbegin(), X.balls().rend());
  while (!stack.empty()) {
    Ball b = std::move(stack.back());
    stack.pop_back();
    if (b.scale >= k) {
      out.push_back(std::move(b));
      continue;
    }
    auto kids = children(*X.geometry(), b);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
  }
  return out;
}

BallSet intersect(const BallSet& X, const BallSet& Y) {
  require_geometry(X, Y);
  const Geometry& g = *X.geometry();
  Index ix = index_of(g, X.balls()), iy = index_of(g, Y.balls());
  std::vector<Ball> out;
  for (const auto& b : X.balls())
    if (ancestor_scale(g, iy, b.center, b.scale, false) != kExact) out.push_back(b);
  for (const auto& b : Y.balls())
    if (ancestor_scale(g, ix, b.center, b.scale, true) != kExact) out.push_back(b);
  return canonicalize(X.geometry(), std::move(out));
}

BallSet subtract(const BallSet& X, const BallSet& Y) {
  require_geometry(X, Y);
  const Geometry& g = *X.geometry();
  Index ix = index_of(g, X.balls()), iy = index_of(g, Y.balls());
  // holes[x] = balls of Y strictly inside x
  std::map<Ball, std::vector<Ball>, decltype(&ball_less)> holes(&ball_less);
  for (const auto& y : Y.balls()) {
    int s = ancestor_scale(g, ix, y.center, y.scale, true);
    if (s != kExact) holes[Ball{g.center(y.center, s), s}].push_back(y);
  }
  std::vector<Ball> out;
  std::function<void(const Ball&, const std::vector<Ball>&)> carve = [&](const Ball& b, const std::vector<Ball>& hs) {
    if (hs.empty()) {
      out.push_back(b);
      return;
    }
    for (const auto& c : children(g, b)) {
      std::vector<Ball> inside;
      bool removed = false;
      for (const auto& h : hs) {
        if (g.center(h.center, c.scale) != c.center) continue;
        if (h.scale == c.scale) {
          removed = true;
          break;
        }
        inside.push_back(h);
      }
      if (!removed) carve(c, inside);
    }
  };
  for (const auto& x : X.balls()) {
    if (ancestor_scale(g, iy, x.center, x.scale, false) != kExact) continue;
    auto it = holes.find(x);
    if (it == holes.end()) out.push_back(x);
    else carve(x, it->second);
  }
  return canonicalize(X.geometry(), std::move(out));
}

BallSet union_disjointify(const BallSet& X, const BallSet& Y) {
  require_geometry(X, Y);
  std::vector<Ball> all = X.balls();
  all.insert(all.end(), Y.balls().begin(), Y.balls().end());
  return canonicalize(X.geometry(), std::move(all));
}

BallSet unite(const std::vector<BallSet>& parts, const GeometryPtr& g) {
  std::vector<Ball> all;
  for (const auto& P : parts) {
    if (P.empty()) continue;
    if (!(*P.geometry() == *g)) throw std::invalid_argument("ball sets live in different geometries");
    all.insert(all.end(), P.balls().begin(), P.balls().end());
  }
  return canonicalize(g, std::move(all));
}

bool is_subset(const BallSet& X, const BallSet& Y) { return subtract(X, Y).empty(); }

BallSet translate(const BallSet& X, const Element& gamma) {
  const Geometry& g = *X.geometry();
  std::vector<Ball> out;
  for (const auto& b : X.balls()) {
    Element t = truncate(gamma, g.cutoffs(b.scale));
    out.push_back(Ball{g.center(b.center + t, b.scale), b.scale});
  }
  return canonicalize(X.geometry(), std::move(out));
}

BallSet dilate(const BallSet& X, int n) {
  const Geometry& g = *X.geometry();
  std::vector<Ball> out;
  for (const auto& b : X.balls()) {
    int k = b.scale - n;
    out.push_back(Ball{g.center(g.dual_power(b.center, n, b.scale), k), k});
  }
  return canonicalize(X.geometry(), std::move(out));
}

CosetScheme::CosetScheme(GeometryPtr g, std::vector<Element> rho) : geo_(std::move(g)), rho_(std::move(rho)) {
  const long A = geo_->index();
  if (static_cast<long>(rho_.size()) != A)
    throw std::invalid_argument("coset scheme needs |A| = " + std::to_string(A) + " base representatives");
  if (!rho_[0].is_zero()) throw std::invalid_argument("rho_0 must be 0");
  by_block_.assign(static_cast<std::size_t>(A), rho_.size());
  for (std::size_t e = 0; e < rho_.size(); ++e) {
    if (!rho_[e].exact()) throw std::invalid_argument("base representatives must be exact");
    if (geo_->dual_level(rho_[e]) != 0) throw std::invalid_argument("rho_" + std::to_string(e) + " is not in H^perp");
    std::size_t blk = static_cast<std::size_t>(geo_->child_index(rho_[e], 0));
    if (by_block_[blk] != rho_.size())
      throw std::invalid_argument("rho_" + std::to_string(e) + " repeats a coset of (A*)^-1 H^perp");
    by_block_[blk] = e;
  }
}

CosetScheme CosetScheme::canonical(GeometryPtr g) {
  std::vector<Element> rho;
  Element zero = Element::zero(g->group());
  for (long e = 0; e < g->index(); ++e) rho.push_back(e == 0 ? zero : g->child_center(zero, 0, e));
  return CosetScheme(g, std::move(rho));
}

Element CosetScheme::theta(const Element& gamma) const {
  const Geometry& g = *geo_;
  Element rest = truncate(gamma, g.cutoffs(0));
  for (std::size_t i = 0; i < rest.size(); ++i)
    if (rest.comp(i).prec < g.cutoff(i, 0)) throw PrecisionError("theta needs gamma modulo H^perp");
  Element sigma = Element::zero(g.group());
  if (rest.is_zero()) return sigma;
  for (int step = g.dual_level(rest); step >= 1; --step) {
    Element delta = g.dual_power(rest, -step, 0);
    std::size_t e = by_block_[static_cast<std::size_t>(g.child_index(delta, 0))];
    if (e == 0) continue;
    Element t = g.dual_power(rho_[e], step, 0);
    sigma = sigma + t;
    rest = rest - t;
  }
  if (!rest.is_zero()) throw std::logic_error("theta recursion did not terminate in H^perp");
  return sigma;
}

Element CosetScheme::eta(const Element& gamma) const { return gamma - theta(gamma); }

Element CosetScheme::eta(const Element& gamma, int prec) const {
  std::vector<int> p(gamma.size(), prec);
  Element t = truncate(gamma, p);
  return t - theta(t);
}

bool CosetScheme::in_D(const Element& sigma) const { return sigma.exact() && theta(sigma) == sigma; }

std::vector<Element> CosetScheme::generate(int n) const {
  std::vector<Element> level{Element::zero(geo_->group())};
  for (int j = 1; j <= n; ++j) {
    std::vector<Element> next;
    next.reserve(level.size() * rho_.size());
    for (const auto& rho : rho_) {
      Element t = geo_->dual_power(rho, j, 0);
      for (const auto& d : level) next.push_back(d + t);
    }
    level.swap(next);
  }
  return level;
}

std::vector<Element> CosetScheme::annulus_reps(int M) const {
  std::vector<Element> out;
  for (auto& s : generate(M + 1))
    if (geo_->dual_level(s) == M + 1) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(), element_less);
  return out;
}

std::vector<CosetPiece> coset_refine(const BallSet& X, const CosetScheme& D) {
  const GeometryPtr& g = X.geometry();
  std::map<Element, std::vector<Ball>, ElementLess> groups;
  for (auto& b : refine(X, 0)) groups[g->center(b.center, 0)].push_back(std::move(b));
  std::vector<CosetPiece> out;
  for (auto& [coset, balls] : groups) out.push_back(CosetPiece{D.theta(coset), canonicalize(g, std::move(balls))});
  return out;
}

}  // namespace lcaw
