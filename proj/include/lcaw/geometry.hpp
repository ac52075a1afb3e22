#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "lcaw/group.hpp"

namespace lcaw {

// Digits of x strictly below position cut[i] in component i, as an exact element.
Element digits_below(const Element& x, const std::vector<int>& cut);

// Total order on elements used for canonical sorting.
bool element_less(const Element& a, const Element& b);

struct ElementLess {
  bool operator()(const Element& a, const Element& b) const { return element_less(a, b); }
};

// The chains A^k H in G and (A*)^(-k) H^perp in the dual, for an expansive monomial A.
class Geometry {
 public:
  explicit Geometry(Automorphism A);

  const Group& group() const { return A_.group(); }
  const Automorphism& A() const { return A_; }
  const Automorphism& dual() const { return dual_; }
  std::size_t size() const { return A_.shifts().size(); }

  // Ball of scale k in the dual: v_i(gamma - c) >= a_i k - r_i.
  int cutoff(std::size_t i, int k) const;
  std::vector<int> cutoffs(int k) const;
  // x in A^k H iff v_i(x) >= -a_i k.
  std::vector<int> primal_cutoffs(int k) const;
  bool in_primal(const Element& x, int k) const;
  bool in_dual_ball(const Element& gamma, int k) const;

  long index() const { return index_; }
  Rational measure(int k) const;

  Element center(const Element& gamma, int k) const { return digits_below(gamma, cutoffs(k)); }
  int child_index(const Element& c, int k) const;
  Element child_center(const Element& c, int k, long idx) const;
  // Smallest n >= 0 with gamma in (A*)^n H^perp.
  int dual_level(const Element& gamma) const;
  // Smallest k with x in A^k H (may be negative); -kExact for x = 0.
  int primal_level(const Element& x) const;

  // (A*)^n gamma, with enough precision to be exact below cutoff(k - n) when units are present.
  Element dual_power(const Element& gamma, int n, int k) const;
  Element primal_power(const Element& x, int n, int k) const;

  bool operator==(const Geometry& o) const { return A_ == o.A_; }

 private:
  Automorphism A_;
  Automorphism dual_;
  long index_ = 1;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

GeometryPtr make_geometry(const Automorphism& A);

// center + (A*)^(-scale) H^perp with canonical center.
struct Ball {
  Element center;
  int scale = 0;

  bool operator==(const Ball& o) const { return scale == o.scale && center == o.center; }
};

bool ball_less(const Ball& a, const Ball& b);

class BallSet {
 public:
  BallSet() = default;
  explicit BallSet(GeometryPtr g) : geo_(std::move(g)) {}
  BallSet(GeometryPtr g, std::vector<Ball> balls);

  static BallSet ball(GeometryPtr g, const Element& center, int scale);
  // (A*)^(-k) H^perp; k = 0 is H^perp.
  static BallSet origin(GeometryPtr g, int k = 0);

  const GeometryPtr& geometry() const { return geo_; }
  const std::vector<Ball>& balls() const { return balls_; }
  std::size_t size() const { return balls_.size(); }
  bool empty() const { return balls_.empty(); }
  int min_scale() const;
  int max_scale() const;

  Rational measure() const;
  bool contains(const Element& gamma) const;

  bool operator==(const BallSet& o) const { return balls_ == o.balls_; }
  bool operator!=(const BallSet& o) const { return !(*this == o); }

 private:
  friend BallSet canonicalize(const GeometryPtr& g, std::vector<Ball> balls);
  GeometryPtr geo_;
  std::vector<Ball> balls_;
};

// Puts any list of balls (possibly overlapping) into canonical form.
BallSet canonicalize(const GeometryPtr& g, std::vector<Ball> balls);

BallSet intersect(const BallSet& X, const BallSet& Y);
BallSet subtract(const BallSet& X, const BallSet& Y);
BallSet union_disjointify(const BallSet& X, const BallSet& Y);
BallSet unite(const std::vector<BallSet>& parts, const GeometryPtr& g);
bool is_subset(const BallSet& X, const BallSet& Y);
BallSet translate(const BallSet& X, const Element& gamma);
// Applies (A*)^n.
BallSet dilate(const BallSet& X, int n);
// Splits every ball of scale below k into its descendants at scale k (not canonical).
std::vector<Ball> refine(const BallSet& X, int k);
std::vector<Ball> children(const Geometry& g, const Ball& b);

class CosetScheme {
 public:
  CosetScheme() = default;
  // rho[e] for e in [0, |A|): representatives of H^perp / (A*)^(-1) H^perp with rho[0] = 0.
  CosetScheme(GeometryPtr g, std::vector<Element> rho);
  static CosetScheme canonical(GeometryPtr g);

  const GeometryPtr& geometry() const { return geo_; }
  const std::vector<Element>& rho() const { return rho_; }

  Element theta(const Element& gamma) const;
  // gamma - theta(gamma); precision-limited when an exact difference would not terminate.
  Element eta(const Element& gamma) const;
  Element eta(const Element& gamma, int prec) const;
  bool in_D(const Element& sigma) const;
  // All sums sum_{j=1}^n (A*)^j rho_{i_j}.
  std::vector<Element> generate(int n) const;
  // D intersected with (A* W) \ W for W = (A*)^M H^perp.
  std::vector<Element> annulus_reps(int M) const;

 private:
  GeometryPtr geo_;
  std::vector<Element> rho_;
  std::vector<std::size_t> by_block_;
};

struct CosetPiece {
  Element sigma;
  BallSet piece;
};

// Groups X by cosets of H^perp after refining to scale >= 0.
std::vector<CosetPiece> coset_refine(const BallSet& X, const CosetScheme& D);

}  // namespace lcaw
