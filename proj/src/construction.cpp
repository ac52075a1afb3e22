#include "lcaw/construction.hpp"

#include <sstream>

namespace lcaw {

namespace {

std::string str(const Rational& r) { return r.get_str(); }

// Smallest s with X inside (A*)^s H^perp.
int outer_level(const BallSet& X) {
  const Geometry& g = *X.geometry();
  int u = -kExact;
  for (const auto& b : X.balls()) u = std::max({u, g.dual_level(b.center), -b.scale});
  return u;
}

bool balls_meet(const Geometry& g, const Ball& a, const Ball& b) {
  const Ball& big = a.scale <= b.scale ? a : b;
  const Ball& small = a.scale <= b.scale ? b : a;
  return g.center(small.center, big.scale) == big.center;
}

}  // namespace

BallSet TranslationMap::W() const { return BallSet::origin(scheme_->geometry(), -M_); }

BallSet TranslationMap::annulus() const {
  const GeometryPtr& g = scheme_->geometry();
  return subtract(BallSet::origin(g, -M_ - 1), BallSet::origin(g, -M_));
}

BallSet TranslationMap::apply(const BallSet& X) const {
  const GeometryPtr& g = scheme_->geometry();
  std::vector<BallSet> parts;
  for (const auto& p : pieces_) {
    BallSet Y = intersect(X, BallSet::ball(g, p.domain.center, p.domain.scale));
    if (!Y.empty()) parts.push_back(move_piece(Y, *scheme_, p.sigma));
  }
  return unite(parts, g);
}

bool TranslationMap::same_as(const TranslationMap& o) const {
  if (M_ != o.M_ || !(*scheme_->geometry() == *o.scheme_->geometry()) || scheme_->rho() != o.scheme_->rho())
    return false;
  const Geometry& g = *scheme_->geometry();
  for (const auto& p : pieces_)
    for (const auto& q : o.pieces_)
      if (balls_meet(g, p.domain, q.domain) && p.sigma != q.sigma) return false;
  return true;
}

std::vector<std::string> check_translation_map(const std::vector<MapPieceSpec>& specs, const SchemePtr& D, int M,
                                               TranslationMap* out) {
  std::vector<std::string> v;
  const GeometryPtr& g = D->geometry();
  if (M < 0) v.push_back("M must be nonnegative");
  BallSet W = BallSet::origin(g, -M);
  BallSet annulus = subtract(BallSet::origin(g, -M - 1), W);
  std::vector<TranslationMap::Piece> pieces;
  std::vector<bool> usable;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const std::string tag = "piece " + std::to_string(i) + ": ";
    bool ok = true;
    if (s.domain.scale < 0) {
      v.push_back(tag + "domain has negative scale");
      ok = false;
    } else if (!is_subset(BallSet::ball(g, s.domain.center, s.domain.scale), W)) {
      v.push_back(tag + "domain is not inside W");
      ok = false;
    }
    Element sigma = s.value;
    if (!sigma.exact()) {
      v.push_back(tag + "target must be exact");
      ok = false;
    } else {
      if (s.is_shift && ok) sigma = s.value + D->theta(s.domain.center);
      bool in_annulus = g->dual_level(sigma) == M + 1;
      if (!D->in_D(sigma) || !in_annulus) {
        if (s.is_shift)
          v.push_back(tag + "shift violates the translation condition (sigma = " + format_element(sigma) + ")");
        else if (!D->in_D(sigma))
          v.push_back(tag + "sigma is not in D");
        else
          v.push_back(tag + "sigma is outside the annulus");
      }
    }
    pieces.push_back({s.domain, sigma});
    usable.push_back(ok && sigma.exact());
  }

  BallSet covered(g);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!usable[i]) continue;
    for (std::size_t k = 0; k < i; ++k)
      if (usable[k] && balls_meet(*g, pieces[i].domain, pieces[k].domain))
        v.push_back("domains of pieces " + std::to_string(k) + " and " + std::to_string(i) + " overlap");
    covered = unite({covered, BallSet::ball(g, pieces[i].domain.center, pieces[i].domain.scale)}, g);
  }
  BallSet gap = subtract(W, covered);
  if (!gap.empty()) v.push_back("domains miss part of W (measure " + str(gap.measure()) + ")");

  std::vector<BallSet> images(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!usable[i]) continue;
    images[i] = move_piece(BallSet::ball(g, pieces[i].domain.center, pieces[i].domain.scale), *D, pieces[i].sigma);
    if (!is_subset(images[i], annulus)) v.push_back("image of piece " + std::to_string(i) + " escapes the annulus");
    for (std::size_t k = 0; k < i; ++k)
      if (usable[k] && !intersect(images[i], images[k]).empty())
        v.push_back("images of pieces " + std::to_string(k) + " and " + std::to_string(i) + " overlap");
  }
  if (out) {
    out->pieces_ = std::move(pieces);
    out->scheme_ = D;
    out->M_ = M;
  }
  return v;
}

TranslationMap make_translation_map(const std::vector<MapPieceSpec>& pieces, const SchemePtr& D, int M) {
  TranslationMap T;
  auto v = check_translation_map(pieces, D, M, &T);
  if (!v.empty()) throw InvalidInput("invalid translation map: " + v.front(), v);
  return T;
}

std::vector<std::string> validate_input(AlgorithmInput& in) {
  std::vector<std::string> v;
  if (!in.scheme) return {"missing coset scheme"};
  const GeometryPtr& g = in.geometry();
  if (in.N() == 0) v.push_back("N must be at least 1");
  if (in.maps.size() != in.N()) {
    v.push_back("expected one translation map per initial set");
    return v;
  }
  BallSet W = BallSet::origin(g, -in.M);
  for (std::size_t j = 0; j < in.N(); ++j) {
    const std::string tag = "set " + std::to_string(j + 1) + ": ";
    if (in.maps[j].M() != in.M) v.push_back(tag + "map uses a different W");
    if (!in.maps[j].scheme() || in.maps[j].scheme()->rho() != in.scheme->rho())
      v.push_back(tag + "map uses a different coset scheme");
    if (!is_subset(in.omega0[j], W)) v.push_back(tag + "initial set is not inside W");
    auto w = check_congruence(in.omega0[j], *in.scheme);
    if (!w.congruent()) v.push_back(tag + "initial set is not congruent to H^perp (defect " + str(w.defect_measure) + ")");
  }
  BallSet all = unite(in.omega0, g);
  if (in.ell < 0) {
    int top = all.empty() ? 0 : std::max(0, all.max_scale());
    for (int l = 0; l <= top; ++l)
      if (is_subset(BallSet::origin(g, l), all)) {
        in.ell = l;
        break;
      }
    if (in.ell < 0) v.push_back("the initial sets do not contain a neighborhood of the origin");
  } else if (!is_subset(BallSet::origin(g, in.ell), all)) {
    v.push_back("(A*)^-" + std::to_string(in.ell) + " H^perp is not inside the union of the initial sets");
  }
  for (std::size_t j = 0; j < in.N(); ++j)
    for (std::size_t k = j + 1; k < in.N(); ++k) {
      if (intersect(in.maps[j].range(), in.maps[k].range()).empty()) continue;
      if (in.maps[j].same_as(in.maps[k]) && intersect(in.omega0[j], in.omega0[k]).empty()) continue;
      v.push_back("sets " + std::to_string(j + 1) + " and " + std::to_string(k + 1) +
                  ": ranges overlap and the maps or initial sets do not allow it");
    }
  return v;
}

AlgorithmInput haar_input(const SchemePtr& D) {
  const GeometryPtr& g = D->geometry();
  AlgorithmInput in;
  in.scheme = D;
  in.M = 0;
  in.ell = 0;
  Ball whole{Element::zero(g->group()), 0};
  for (const auto& sigma : D->annulus_reps(0)) {
    in.maps.push_back(make_translation_map({{whole, sigma, false}}, D, 0));
    in.omega0.push_back(BallSet::origin(g, 0));
  }
  return in;
}

AlgorithmInput single_input(const SchemePtr& D, const Element& sigma) {
  const GeometryPtr& g = D->geometry();
  AlgorithmInput in;
  in.scheme = D;
  in.M = 0;
  in.ell = 0;
  in.maps.push_back(make_translation_map({{Ball{Element::zero(g->group()), 0}, sigma, false}}, D, 0));
  in.omega0.push_back(BallSet::origin(g, 0));
  return in;
}

DilationUnion dilation_union(const BallSet& source, const BallSet& target, int M) {
  const GeometryPtr& g = target.geometry();
  DilationUnion out;
  out.set = BallSet(g);
  if (source.empty() || target.empty()) {
    out.certificate = "empty operand";
    return out;
  }
  if (outer_level(source) > M + 1) throw std::logic_error("dilation union source is not inside A* W");
  const Element zero = Element::zero(g->group());
  bool absorbed = false;
  if (source.contains(zero)) {
    int l0 = 0;
    for (const auto& b : source.balls())
      if (b.center.is_zero()) l0 = b.scale;
    out.nmax = std::max(1, l0 + M + 1);
    absorbed = true;
    std::ostringstream os;
    os << "source contains (A*)^-" << l0 << " H^perp; for n > " << out.nmax << " the dilate lies in (A*)^-" << l0 + 1
       << " H^perp, inside the n = 1 dilate";
    out.certificate = os.str();
  } else if (!target.contains(zero)) {
    int s0 = -outer_level(target);
    while (!intersect(target, BallSet::origin(g, s0)).empty()) ++s0;
    out.nmax = std::max(1, s0 + M);
    std::ostringstream os;
    os << "target avoids (A*)^-" << s0 << " H^perp; for n > " << out.nmax << " the dilate lies inside it";
    out.certificate = os.str();
  } else {
    throw std::logic_error("dilation union has no finite bound: both sets accumulate at the origin");
  }
  std::vector<BallSet> parts;
  for (int n = 1; n <= out.nmax; ++n) {
    BallSet part = intersect(target, dilate(source, -n));
    if (!part.empty()) parts.push_back(std::move(part));
  }
  out.set = unite(parts, g);
  for (int n = out.nmax + 1; n <= out.nmax + 2; ++n) {
    BallSet extra = intersect(target, dilate(source, -n));
    bool fine = absorbed ? is_subset(extra, out.set) : extra.empty();
    if (!fine) throw std::logic_error("dilation union bound failed its runtime check");
  }
  return out;
}

AlgorithmState initial_state(const AlgorithmInput& in) {
  AlgorithmState s;
  s.omega = in.omega0;
  s.lambda.resize(in.N());
  for (std::size_t j = 0; j < in.N(); ++j) s.lambda_total.push_back(BallSet(in.geometry()));
  return s;
}

AlgorithmState step(const AlgorithmInput& in, const AlgorithmState& s, StepLog* log, std::vector<std::string>* failures) {
  const GeometryPtr& g = in.geometry();
  const std::size_t N = in.N();
  auto fail = [&](const std::string& msg) {
    if (failures) failures->push_back("m=" + std::to_string(s.m + 1) + ": " + msg);
  };
  BallSet omt = unite(s.omega, g);
  AlgorithmState t;
  t.m = s.m + 1;
  t.lambda = s.lambda;
  if (log) log->m = t.m;
  for (std::size_t j = 0; j < N; ++j) {
    DilationUnion du = dilation_union(omt, s.omega[j], in.M);
    BallSet lam = du.set;
    if (s.m == 0) {
      std::vector<BallSet> earlier(in.omega0.begin(), in.omega0.begin() + static_cast<long>(j));
      BallSet second = intersect(in.omega0[j], unite(earlier, g));
      lam = unite({lam, second}, g);
    }
    if (!is_subset(lam, in.omega0[j])) {
      fail("Lambda_" + std::to_string(j + 1) + " leaves the initial set");
      lam = intersect(lam, in.omega0[j]);
    }
    t.omega.push_back(unite({subtract(s.omega[j], lam), in.maps[j].apply(lam)}, g));
    t.lambda_total.push_back(unite({s.lambda_total[j], lam}, g));
    if (log) {
      log->lambda_measure.push_back(lam.measure());
      log->nmax.push_back(du.nmax);
      log->certificates.push_back(du.certificate);
    }
    t.lambda[j].push_back(std::move(lam));
  }

  BallSet annulus = in.maps.front().annulus();
  BallSet omt_next = unite(t.omega, g);
  for (std::size_t j = 0; j < N; ++j) {
    const std::string tag = "set " + std::to_string(j + 1) + ": ";
    if (!is_subset(t.omega[j], unite({annulus, in.omega0[j]}, g))) fail(tag + "Omega leaves the annulus and the initial set");
    if (t.omega[j].measure() != 1) fail(tag + "measure of Omega is " + str(t.omega[j].measure()));
    BallSet recomputed =
        unite({subtract(in.omega0[j], t.lambda_total[j]), in.maps[j].apply(t.lambda_total[j])}, g);
    if (recomputed != t.omega[j]) fail(tag + "Omega differs from its closed form in the accumulated Lambda");
    BallSet later = subtract(t.lambda_total[j], t.lambda[j].front());
    if (!later.empty()) {
      try {
        if (dilation_union(omt_next, later, in.M).set != later) fail(tag + "truncated inclusion of Lambda fails");
      } catch (const std::logic_error& e) {
        fail(tag + e.what());
      }
    }
  }
  return t;
}

BallSet ConstructionResult::envelope(std::size_t j) const {
  const GeometryPtr& g = input.geometry();
  return unite({uncertain.at(j), input.maps.at(j).apply(uncertain.at(j))}, g);
}

ConstructionResult run(AlgorithmInput in, const RunOptions& opts) {
  auto v = validate_input(in);
  if (!v.empty()) throw InvalidInput("invalid construction input: " + v.front(), v);
  if (opts.m_max < 1) throw std::invalid_argument("m_max must be at least 1");
  const GeometryPtr& g = in.geometry();
  ConstructionResult res;
  res.input = in;
  res.state = initial_state(in);
  res.stop_reason = "m_max";
  int below = 0, stalled = 0;
  Rational prev_total = -1;
  while (res.state.m < opts.m_max) {
    StepLog log;
    res.state = step(in, res.state, &log, &res.failures);
    Rational total = 0;
    bool small = true;
    for (const auto& mu : log.lambda_measure) {
      total += mu;
      if (!(mu < opts.epsilon)) small = false;
    }
    res.log.push_back(std::move(log));
    below = small ? below + 1 : 0;
    if (total != 0 && prev_total >= 0 && !(total < prev_total))
      ++stalled;
    else
      stalled = 0;
    if (stalled >= opts.patience) res.nonconvergence = true;
    prev_total = total;
    if (below >= 2) {
      res.stop_reason = "epsilon";
      break;
    }
  }

  // Every later Lambda_j lies in X_j = Omega_{j,m} cap W.  If that holds for X, it also
  // holds for U(X)_j = X_j cap union_n (A*)^(-n) (Omega~_m cup union_k T_k X_k), so iterate U.
  BallSet W = BallSet::origin(g, -in.M);
  BallSet omt = unite(res.state.omega, g);
  std::vector<BallSet> X;
  for (std::size_t j = 0; j < in.N(); ++j) X.push_back(intersect(res.state.omega[j], W));
  for (int it = 0; it < opts.envelope_rounds; ++it) {
    std::vector<BallSet> reach{omt};
    for (std::size_t j = 0; j < in.N(); ++j) reach.push_back(in.maps[j].apply(X[j]));
    BallSet E = unite(reach, g);
    bool moved = false;
    for (std::size_t j = 0; j < in.N(); ++j) {
      BallSet next = dilation_union(E, X[j], in.M).set;
      if (next != X[j]) moved = true;
      X[j] = std::move(next);
    }
    if (!moved) break;
  }
  res.residual = 0;
  for (std::size_t j = 0; j < in.N(); ++j) {
    res.residual += X[j].measure();
    res.stabilized.push_back(subtract(res.state.omega[j], X[j]));
    res.uncertain.push_back(std::move(X[j]));
    res.descriptors.push_back(detect_self_similarity(res.state.lambda[j]));
  }
  return res;
}

std::optional<SelfSimilarity> detect_self_similarity(const std::vector<BallSet>& L, int min_checks) {
  const int n = static_cast<int>(L.size());
  if (n < 3) return std::nullopt;
  const GeometryPtr& g = L.front().geometry();
  const Rational A = g->measure(-1);

  auto attempt = [&](int P, int m0) -> std::optional<SelfSimilarity> {
    std::vector<std::optional<Ball>> shift(static_cast<std::size_t>(P));
    int checks = 0;
    for (int m = m0; m + P <= n; ++m, ++checks) {
      const BallSet& X = L[static_cast<std::size_t>(m - 1)];
      const BallSet& Y = L[static_cast<std::size_t>(m + P - 1)];
      if (X.empty()) {
        if (!Y.empty()) return std::nullopt;
        continue;
      }
      BallSet D = dilate(X, -P);
      if (D.size() != Y.size()) return std::nullopt;
      auto& prior = shift[static_cast<std::size_t>((m - m0) % P)];
      const Ball& b = D.balls().front();
      std::optional<Ball> found;
      for (const auto& y : Y.balls()) {
        if (y.scale != b.scale) continue;
        auto cut = g->cutoffs(b.scale);
        Element gamma = g->center(truncate(y.center, cut) - truncate(b.center, cut), b.scale);
        if (prior && g->center(gamma, prior->scale) != prior->center) continue;
        if (translate(D, gamma) == Y) {
          found = Ball{gamma, b.scale};
          break;
        }
      }
      if (!found) return std::nullopt;
      prior = found;
    }
    if (checks < min_checks * P) return std::nullopt;
    SelfSimilarity d;
    d.period = P;
    d.start = m0;
    d.checked = checks;
    Rational total = 0;
    for (int m = 1; m < m0; ++m) total += L[static_cast<std::size_t>(m - 1)].measure();
    Rational ratio = 1 - 1 / (A * (P == 2 ? A : Rational(1)));
    for (int r = 0; r < P; ++r) total += L[static_cast<std::size_t>(m0 + r - 1)].measure() / ratio;
    total.canonicalize();
    d.total_measure = total;
    for (const auto& s : shift) {
      Element gamma = s ? s->center : Element::zero(g->group());
      int k = s ? s->scale : 0;
      Element x = Element::zero(g->group());
      for (int it = 0; it <= k; ++it) x = g->center(gamma + g->dual_power(x, -P, k), k);
      d.shifts.push_back(gamma);
      d.limits.push_back(x);
    }
    return d;
  };

  for (int m0 = 1; m0 <= n; ++m0)
    for (int P = 1; P <= 2; ++P)
      if (auto d = attempt(P, m0)) return d;
  return std::nullopt;
}

std::optional<std::vector<BallSet>> identify_limits(const ConstructionResult& r, int n0, int n1) {
  const GeometryPtr& g = r.input.geometry();
  std::vector<BallSet> out;
  for (std::size_t j = 0; j < r.input.N(); ++j) {
    const BallSet& stab = r.stabilized[j];
    if (stab.empty()) return std::nullopt;
    const BallSet allowed = union_disjointify(stab, r.envelope(j));
    std::optional<BallSet> found;
    for (int s = std::max(0, stab.min_scale()); s <= stab.max_scale() && !found; ++s) {
      std::vector<Ball> balls;
      for (const auto& b : stab.balls()) balls.push_back(b.scale >= s ? Ball{g->center(b.center, s), s} : b);
      BallSet C = canonicalize(g, balls);
      if (C.measure() != 1 || !is_subset(C, allowed)) continue;
      if (!check_congruence(C, *r.input.scheme).congruent()) continue;
      found = C;
    }
    if (!found) return std::nullopt;
    out.push_back(*found);
  }
  if (!check_tiling(out, n0, n1).ok()) return std::nullopt;
  return out;
}

}  // namespace lcaw
