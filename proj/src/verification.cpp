#include "lcaw/verification.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace lcaw {

BallSet move_piece(const BallSet& piece, const CosetScheme& D, const Element& target) {
  const GeometryPtr& g = piece.geometry();
  std::vector<Ball> out;
  out.reserve(piece.size());
  for (const auto& b : piece.balls()) {
    if (b.scale < 0) throw std::invalid_argument("move_piece needs balls of scale >= 0");
    Element rel = D.eta(truncate(b.center, g->cutoffs(b.scale)));
    out.push_back(Ball{g->center(target + rel, b.scale), b.scale});
  }
  return canonicalize(g, std::move(out));
}

namespace {

// Adds S to the running union, recording the part already covered.
void accumulate(BallSet& acc, BallSet& overlap, const BallSet& S) {
  const GeometryPtr& g = S.geometry();
  BallSet ov = intersect(acc, S);
  if (!ov.empty()) overlap = unite({overlap, ov}, g);
  acc = unite({acc, S}, g);
}

// Largest s with X inside (A*)^s H^perp.
int outer_level(const BallSet& X) {
  const Geometry& g = *X.geometry();
  int u = -kExact;
  for (const auto& b : X.balls()) u = std::max({u, g.dual_level(b.center), -b.scale});
  return u;
}

}  // namespace

CongruenceWitness check_congruence(const BallSet& omega, const CosetScheme& D) {
  const GeometryPtr& g = omega.geometry();
  CongruenceWitness w;
  w.image = BallSet(g);
  w.overlap = BallSet(g);
  Element zero = Element::zero(g->group());
  for (auto& cp : coset_refine(omega, D)) {
    BallSet img = move_piece(cp.piece, D, zero);
    accumulate(w.image, w.overlap, img);
    w.pieces.push_back({cp.sigma, cp.piece, std::move(img)});
  }
  w.gap = subtract(BallSet::origin(g, 0), w.image);
  w.defect = unite({w.overlap, w.gap}, g);
  w.defect_measure = w.defect.measure();
  return w;
}

TilingReport check_tiling(const std::vector<BallSet>& omegas, int n0, int n1, const std::vector<BallSet>& uncertain) {
  if (omegas.empty()) throw std::invalid_argument("no sets to tile with");
  if (!uncertain.empty() && uncertain.size() != omegas.size())
    throw std::invalid_argument("one uncertain region per set expected");
  const GeometryPtr& g = omegas.front().geometry();
  TilingReport r;
  r.n0 = n0;
  r.n1 = n1;
  BallSet acc(g);
  r.overlap = BallSet(g);
  r.excluded = BallSet(g);
  for (std::size_t j = 0; j < omegas.size(); ++j)
    for (int a = n0; a <= n1; ++a) {
      accumulate(acc, r.overlap, dilate(omegas[j], a));
      if (!uncertain.empty() && !uncertain[j].empty()) r.excluded = unite({r.excluded, dilate(uncertain[j], a)}, g);
    }

  int u = -kExact, l = kExact;
  bool holes = true;
  Element zero = Element::zero(g->group());
  for (const auto& om : omegas) {
    if (om.empty()) continue;
    u = std::max(u, outer_level(om));
    if (om.contains(zero)) {
      holes = false;
      continue;
    }
    int s = outer_level(om);
    while (!intersect(om, BallSet::origin(g, -s)).empty()) --s;
    l = std::min(l, s);
  }
  r.gap = BallSet(g);
  if (holes && u > -kExact) {
    r.k0 = n0 + u - 1;
    r.k1 = n1 + l;
    if (r.k0 <= r.k1) {
      BallSet region = subtract(BallSet::origin(g, -(r.k1 + 1)), BallSet::origin(g, -r.k0));
      r.gap = subtract(region, acc);
    }
  }
  r.overlap_measure = r.overlap.measure();
  r.gap_measure = r.gap.measure();
  r.excluded_measure = r.excluded.measure();
  BallSet defect = unite({r.overlap, r.gap}, g);
  r.unexplained = subtract(defect, r.excluded);
  r.max_shell_defect = 0;
  if (!defect.empty()) {
    const int top = outer_level(defect);
    int lo = std::min(r.k0, top);
    if (!defect.contains(zero)) {
      lo = top;
      while (!intersect(defect, BallSet::origin(g, -lo)).empty()) --lo;
    }
    for (int k = lo; k < top; ++k) {
      BallSet shell = subtract(BallSet::origin(g, -(k + 1)), BallSet::origin(g, -k));
      Rational mu = intersect(defect, shell).measure() * g->measure(k + 1);
      if (mu > r.max_shell_defect) r.max_shell_defect = mu;
    }
  }
  return r;
}

Element coset_rep(const Geometry& g, long i) {
  const long A = g.index();
  std::vector<long> blocks;
  for (; i > 0; i /= A) blocks.push_back(i % A);
  const int levels = static_cast<int>(blocks.size());
  std::vector<Local> comps(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    comps[c].lead = -g.A().shift(c) * levels;
    comps[c].digits.assign(static_cast<std::size_t>(g.A().shift(c) * levels), 0);
  }
  for (int lv = 1; lv <= levels; ++lv) {
    long blk = blocks[static_cast<std::size_t>(lv - 1)];
    for (std::size_t c = g.size(); c-- > 0;) {
      const int q = g.group()->field(c).q();
      const int a = g.A().shift(c);
      for (int n = -a * (lv - 1) - 1; n >= -a * lv; --n) {
        comps[c].digits[static_cast<std::size_t>(n - comps[c].lead)] = static_cast<int>(blk % q);
        blk /= q;
      }
    }
  }
  for (auto& l : comps) {
    while (!l.digits.empty() && l.digits.back() == 0) l.digits.pop_back();
    std::size_t z = 0;
    while (z < l.digits.size() && l.digits[z] == 0) ++z;
    l.digits.erase(l.digits.begin(), l.digits.begin() + static_cast<long>(z));
    l.lead = l.digits.empty() ? kExact : l.lead + static_cast<int>(z);
  }
  return Element(g.group(), std::move(comps));
}

std::vector<WaveletSymbol> basis_symbols(const std::vector<BallSet>& omegas, const SchemePtr& D, int a0, int a1,
                                         long reps, std::vector<BasisIndex>* index) {
  std::vector<WaveletSymbol> out;
  const Geometry& g = *D->geometry();
  for (std::size_t j = 0; j < omegas.size(); ++j)
    for (int a = a0; a <= a1; ++a)
      for (long r = 0; r < reps; ++r) {
        out.emplace_back(omegas[j], a, coset_rep(g, r), D);
        if (index) index->push_back({j, a, r});
      }
  return out;
}

GramResult gram_matrix(const std::vector<WaveletSymbol>& symbols, bool exact, int threads, double tol) {
  GramResult res;
  const std::size_t n = symbols.size();
  res.size = n;
  if (exact) res.exact.assign(n * n, ExactScalar{});
  res.numeric.assign(n * n, {});
  // Symbols sharing a set and a dilation share their overlap terms.
  std::vector<std::size_t> cls(n);
  std::vector<std::size_t> firsts;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    while (c < firsts.size() &&
           !(symbols[firsts[c]].a() == symbols[i].a() && symbols[firsts[c]].omega() == symbols[i].omega()))
      ++c;
    if (c == firsts.size()) firsts.push_back(i);
    cls[i] = c;
  }
  const std::size_t C = firsts.size();
  std::vector<OverlapTerms> overlap(C * C);
  std::atomic<std::size_t> next_pair{0};
  auto prepare = [&] {
    for (std::size_t x; (x = next_pair.fetch_add(1)) < C * C;)
      overlap[x] = overlap_terms(symbols[firsts[x / C]], symbols[firsts[x % C]]);
  };
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;)
      for (std::size_t k = i; k < n; ++k) {
        const OverlapTerms& t = overlap[cls[i] * C + cls[k]];
        if (exact) {
          ExactScalar v = inner_product(symbols[i], symbols[k], t);
          res.numeric[i * n + k] = v.to_complex();
          res.numeric[k * n + i] = std::conj(res.numeric[i * n + k]);
          res.exact[k * n + i] = v.conj();
          res.exact[i * n + k] = std::move(v);
        } else {
          auto v = inner_product_float(symbols[i], symbols[k], t);
          res.numeric[i * n + k] = v;
          res.numeric[k * n + i] = std::conj(v);
        }
      }
  };
  const int t = std::max(1, threads);
  for (const std::function<void()>& job : {std::function<void()>(prepare), std::function<void()>(work)}) {
    std::vector<std::thread> pool;
    for (int w = 1; w < t; ++w) pool.emplace_back(job);
    job();
    for (auto& th : pool) th.join();
  }

  bool exact_id = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double dev = std::abs(res.numeric[i * n + k] - std::complex<double>(i == k ? 1.0 : 0.0));
      res.max_deviation = std::max(res.max_deviation, dev);
      if (exact) {
        const ExactScalar& v = res.exact[i * n + k];
        bool good = i == k ? v.is_one() : v.is_zero();
        if (!good) exact_id = false;
        if (i != k && !v.is_zero()) ++res.nonzero_offdiag;
      } else if (i != k && dev > tol) {
        ++res.nonzero_offdiag;
      }
    }
  res.identity = exact ? exact_id : res.max_deviation <= tol;
  return res;
}

std::vector<BallSet> single_deletions(const BallSet& omega, int max_depth) {
  const GeometryPtr& g = omega.geometry();
  std::vector<BallSet> out;
  for (const auto& b : omega.balls()) {
    BallSet whole = BallSet::ball(g, b.center, b.scale);
    for (int d = 1; d <= max_depth; ++d)
      for (const auto& c : refine(whole, b.scale + d)) out.push_back(subtract(omega, BallSet::ball(g, c.center, c.scale)));
  }
  return out;
}

}  // namespace lcaw
