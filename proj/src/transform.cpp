#include "lcaw/transform.hpp"

#include <atomic>
#include <complex>
#include <map>
#include <thread>

namespace lcaw {

namespace {

// Coset of A^(-k) H containing x.
Element coset_key(const Geometry& g, const Element& x, int k) { return digits_below(x, g.primal_cutoffs(-k)); }

bool is_haar_collection(const std::vector<BallSet>& omegas, const CosetScheme& D) {
  const Geometry& g = *D.geometry();
  if (static_cast<long>(omegas.size()) != g.index() - 1) return false;
  std::vector<Element> reps = D.annulus_reps(0);
  std::vector<bool> used(reps.size(), false);
  for (const auto& om : omegas) {
    if (om.size() != 1 || om.balls()[0].scale != 0) return false;
    bool hit = false;
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (!used[i] && BallSet::ball(D.geometry(), reps[i], 0) == om) used[i] = hit = true;
    if (!hit) return false;
  }
  return true;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, threads); ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

using KeyMap = std::map<Element, std::vector<Element>, ElementLess>;

// Children (cosets of A^(-k-1) H) met by the grid, grouped by their coset of A^(-k) H.
KeyMap children_by_parent(const Geometry& g, const std::vector<Element>& points, int k) {
  std::map<Element, bool, ElementLess> seen;
  KeyMap out;
  for (const auto& x : points) {
    Element child = coset_key(g, x, k + 1);
    if (seen.emplace(child, true).second) out[coset_key(g, child, k)].push_back(child);
  }
  return out;
}

// Block A^(-a)(s + H) of an entry, as a coset of A^(-a) H.
Element entry_block(const Geometry& g, const WaveletSymbol& psi) {
  std::vector<int> k;
  for (int a : g.A().shifts()) k.push_back(a * psi.a());
  return coset_key(g, shift(psi.s(), k), psi.a());
}

bool fast_path_ok(const Basis& B) { return B.haar() && B.geometry()->A().trivial_units(); }

}  // namespace

Basis Basis::window(std::vector<BallSet> omegas, SchemePtr D, int a0, int a1, int L) {
  Basis b;
  b.omegas_ = std::move(omegas);
  b.scheme_ = std::move(D);
  b.a0_ = a0;
  b.a1_ = a1;
  b.L_ = L;
  b.build(-1);
  return b;
}

Basis Basis::fixed(std::vector<BallSet> omegas, SchemePtr D, int a0, int a1, long reps) {
  Basis b;
  b.omegas_ = std::move(omegas);
  b.scheme_ = std::move(D);
  b.a0_ = a0;
  b.a1_ = a1;
  b.build(reps);
  return b;
}

void Basis::build(long fixed_reps) {
  if (omegas_.empty()) throw std::invalid_argument("basis needs at least one set");
  const Geometry& g = *scheme_->geometry();
  haar_ = is_haar_collection(omegas_, *scheme_);
  for (std::size_t j = 0; j < omegas_.size(); ++j)
    for (int a = a0_; a <= a1_; ++a) {
      long reps = fixed_reps;
      if (reps < 0) {
        Rational n = g.measure(-std::max(0, a + L_));
        if (n.get_num() > 10000000) throw std::invalid_argument("basis window too large");
        reps = n.get_num().get_si();
      }
      for (long r = 0; r < reps; ++r) {
        entries_.push_back({j, a, r});
        symbols_.emplace_back(omegas_[j], a, coset_rep(g, r), scheme_);
      }
    }
}

std::vector<ExactScalar> analyze(const FiniteSignal& f, const Basis& B, TransformPath path, int threads) {
  const Geometry& g = *B.geometry();
  if (!(*f.geometry() == g)) throw std::invalid_argument("signal and basis live on different groups");
  std::vector<ExactScalar> out(B.size());
  if (path == TransformPath::Haar && !fast_path_ok(B)) throw std::invalid_argument("basis has no Haar fast path");
  if (path == TransformPath::Reference || !fast_path_ok(B)) {
    for (const auto& psi : B.symbols())
      if (psi.constancy_exponent() > f.K())
        throw RefinementNeeded("wavelet at dilation " + std::to_string(psi.a()) + " is finer than the signal cells");
    parallel_for(B.size(), threads, [&](std::size_t i) { out[i] = analysis_coeff(f, B.symbols()[i]); });
    return out;
  }
  if (B.a1() + 1 > f.K()) throw RefinementNeeded("wavelets at dilation " + std::to_string(B.a1()) + " are finer than the signal cells");
  std::vector<Element> points;
  for (std::size_t c = 0; c < f.cells(); ++c) points.push_back(f.point(c));
  const ExactScalar cm{Cyclo(f.cell_measure())};
  for (int a = B.a0(); a <= B.a1(); ++a) {
    std::map<Element, Cyclo, ElementLess> sums;
    for (std::size_t c = 0; c < f.cells(); ++c)
      if (f.value(c).size()) sums[coset_key(g, points[c], a + 1)] += f.value(c);
    KeyMap kids = children_by_parent(g, points, a);
    for (std::size_t i = 0; i < B.size(); ++i) {
      const WaveletSymbol& psi = B.symbols()[i];
      if (psi.a() != a) continue;
      auto it = kids.find(entry_block(g, psi));
      if (it == kids.end()) continue;
      ExactScalar acc;
      for (const auto& child : it->second) {
        auto s = sums.find(child);
        if (s == sums.end()) continue;
        acc += ExactScalar{s->second} * wavelet_eval(psi, child).conj();
      }
      out[i] = acc * cm;
    }
  }
  return out;
}

FiniteSignal synthesize(const std::vector<ExactScalar>& c, const Basis& B, int L, int K, TransformPath path) {
  if (c.size() != B.size()) throw std::invalid_argument("coefficient count does not match the basis");
  const Geometry& g = *B.geometry();
  FiniteSignal f(B.geometry(), L, K);
  std::vector<Element> points;
  for (std::size_t cell = 0; cell < f.cells(); ++cell) points.push_back(f.point(cell));
  if (path == TransformPath::Haar && !fast_path_ok(B)) throw std::invalid_argument("basis has no Haar fast path");
  if (path == TransformPath::Reference || !fast_path_ok(B)) {
    for (std::size_t cell = 0; cell < f.cells(); ++cell) {
      ExactScalar v;
      for (std::size_t i = 0; i < B.size(); ++i)
        if (!c[i].is_zero()) v += c[i] * wavelet_eval(B.symbols()[i], points[cell]);
      f.set(cell, v.cyclo());
    }
    return f;
  }
  if (B.a1() + 1 > K) throw RefinementNeeded("wavelets are finer than the requested cells");
  std::map<int, std::map<Element, ExactScalar, ElementLess>> adds;
  for (int a = B.a0(); a <= B.a1(); ++a) {
    KeyMap kids = children_by_parent(g, points, a);
    auto& level = adds[a + 1];
    for (std::size_t i = 0; i < B.size(); ++i) {
      const WaveletSymbol& psi = B.symbols()[i];
      if (psi.a() != a || c[i].is_zero()) continue;
      auto it = kids.find(entry_block(g, psi));
      if (it == kids.end()) continue;
      for (const auto& child : it->second) level[child] += c[i] * wavelet_eval(psi, child);
    }
  }
  for (std::size_t cell = 0; cell < f.cells(); ++cell) {
    ExactScalar v;
    for (const auto& [k, level] : adds) {
      auto it = level.find(coset_key(g, points[cell], k));
      if (it != level.end()) v += it->second;
    }
    f.set(cell, v.cyclo());
  }
  return f;
}

bool window_complete(const FiniteSignal& f, const Basis& B, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!B.haar()) return fail("completeness is only certified for the Haar collection");
  if (B.L() < 0) return fail("basis keeps a fixed number of cosets per dilation");
  if (B.L() < f.L()) return fail("basis cosets do not reach the signal support");
  if (B.a0() > -f.L() || B.a1() < f.K() - 1)
    return fail("dilations must cover [" + std::to_string(-f.L()) + ", " + std::to_string(f.K() - 1) + "]");
  if (!f.integral().is_zero()) return fail("the signal has nonzero mean, which no finite set of wavelets spans");
  if (why) why->clear();
  return true;
}

ParsevalReport parseval_check(const FiniteSignal& f, const Basis& B, int threads) {
  ParsevalReport r;
  auto coeffs = analyze(f, B, TransformPath::Auto, threads);
  // Single terms |c|^2 may be irrational; their sum is rational on a complete window.
  Cyclo energy;
  double approx = 0;
  for (const auto& c : coeffs) {
    if (c.value.size() == 0) continue;
    energy += c.value * c.value.conj() * Rational(c.root ? c.base : 1);
    approx += std::norm(c.to_complex());
  }
  r.norm2 = f.norm2();
  r.rational = energy.is_rational(&r.coeff_energy);
  r.coeff_energy.canonicalize();
  r.ratio_approx = r.norm2 == 0 ? 1.0 : approx / r.norm2.get_d();
  if (r.rational) {
    r.ratio = r.norm2 == 0 ? Rational(1) : Rational(r.coeff_energy / r.norm2);
    r.ratio.canonicalize();
  }
  r.complete = window_complete(f, B, &r.note);
  if (r.complete && (!r.rational || r.ratio != 1)) r.note = "complete window but energy differs";
  return r;
}

}  // namespace lcaw
