#pragma once

#include <random>
#include <string>
#include <vector>

#include "lcaw/geometry.hpp"

namespace lcaw::testing {

struct Catalog {
  std::string name;
  GeometryPtr geo;
};

inline std::vector<Catalog> catalog() {
  auto q2 = GroupSpec::prime_field(2), q3 = GroupSpec::prime_field(3), q5 = GroupSpec::prime_field(5);
  auto prod = GroupSpec::product({q2, q3});
  std::vector<Catalog> out = {
      {"Q2", make_geometry(Automorphism::monomial(q2, {1}))},
      {"Q3", make_geometry(Automorphism::monomial(q3, {1}))},
      {"Q5", make_geometry(Automorphism::monomial(q5, {1}))},
      {"F2", make_geometry(Automorphism::monomial(GroupSpec::laurent_field(2), {1}))},
      {"F3", make_geometry(Automorphism::monomial(GroupSpec::laurent_field(3), {1}))},
      {"Q2sqrt2", make_geometry(Automorphism::monomial(GroupSpec::q2_sqrt2(), {2}))},
      {"Q3sqrt3", make_geometry(Automorphism::monomial(GroupSpec::pi_extension(3, 2, 1), {1}))},
      {"Q2xQ3", make_geometry(Automorphism::monomial(prod, {2, 1}))},
      {"Q2xQ3b", make_geometry(Automorphism::monomial(prod, {1, 1}))},
      {"Q5unit", make_geometry(Automorphism::monomial(q5, {1}, {Element::from_rational(q5, 2)}))},
  };
  return out;
}

// Random exact element with digits in [lo, hi) per component.
inline Element random_element(const Group& g, std::mt19937_64& rng, const std::vector<int>& lo,
                              const std::vector<int>& hi) {
  std::vector<Local> comps;
  for (std::size_t i = 0; i < g->size(); ++i) {
    Local l;
    l.prec = kExact;
    l.lead = lo[i];
    for (int n = lo[i]; n < hi[i]; ++n) l.digits.push_back(static_cast<int>(rng() % g->field(i).q()));
    comps.push_back(l);
  }
  return Element(g, comps);
}

inline Ball random_ball(const Geometry& g, std::mt19937_64& rng, int kmin, int kmax) {
  int k = kmin + static_cast<int>(rng() % static_cast<unsigned>(kmax - kmin + 1));
  std::vector<int> hi = g.cutoffs(k), lo = g.cutoffs(std::min(kmin, 0) - 1);
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = std::min(lo[i], hi[i]);
  return Ball{random_element(g.group(), rng, lo, hi), k};
}

inline BallSet random_set(const GeometryPtr& g, std::mt19937_64& rng, int count, int kmin, int kmax) {
  std::vector<Ball> balls;
  for (int i = 0; i < count; ++i) balls.push_back(random_ball(*g, rng, kmin, kmax));
  return canonicalize(g, balls);
}

// Membership via arithmetic: gamma - c lies in (A*)^(-k) H^perp.
inline bool oracle_in_ball(const Geometry& g, const Element& gamma, const Ball& b) {
  std::vector<int> cut = g.cutoffs(b.scale);
  Element d = truncate(gamma, cut) - b.center;
  return d.is_zero();
}

inline bool oracle_in(const BallSet& X, const Element& gamma) {
  for (const auto& b : X.balls())
    if (oracle_in_ball(*X.geometry(), gamma, b)) return true;
  return false;
}

// A point near the given sets: a ball center extended by random finer digits.
inline Element random_point(const Geometry& g, std::mt19937_64& rng, const std::vector<const BallSet*>& near,
                            int depth) {
  std::vector<Ball> pool;
  for (auto* X : near) pool.insert(pool.end(), X->balls().begin(), X->balls().end());
  int kmax = 0;
  for (const auto& b : pool) kmax = std::max(kmax, b.scale);
  std::vector<int> hi = g.cutoffs(kmax + depth);
  if (pool.empty() || rng() % 4 == 0) {
    std::vector<int> lo = g.cutoffs(-2);
    return random_element(g.group(), rng, lo, hi);
  }
  const Ball& b = pool[rng() % pool.size()];
  std::vector<int> lo = g.cutoffs(b.scale);
  return b.center + random_element(g.group(), rng, lo, hi);
}

}  // namespace lcaw::testing
