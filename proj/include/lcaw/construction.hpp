#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcaw/verification.hpp"

namespace lcaw {

class InvalidInput : public std::invalid_argument {
 public:
  InvalidInput(const std::string& what, std::vector<std::string> violations)
      : std::invalid_argument(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// A piece of a translation map: either the target representative sigma or a shift t
// with gamma -> gamma + t on the domain.
struct MapPieceSpec {
  Ball domain;
  Element value;
  bool is_shift = false;
};

// gamma -> gamma - theta(gamma) + sigma(piece) on W = (A*)^M H^perp, piecewise on balls.
class TranslationMap {
 public:
  struct Piece {
    Ball domain;
    Element sigma;
  };

  TranslationMap() = default;
  const std::vector<Piece>& pieces() const { return pieces_; }
  const SchemePtr& scheme() const { return scheme_; }
  int M() const { return M_; }
  BallSet W() const;
  BallSet annulus() const;

  // Image of X, a subset of W.
  BallSet apply(const BallSet& X) const;
  BallSet range() const { return apply(W()); }
  // Same map as a function on W.
  bool same_as(const TranslationMap& o) const;

 private:
  friend std::vector<std::string> check_translation_map(const std::vector<MapPieceSpec>&, const SchemePtr&, int,
                                                        TranslationMap*);
  std::vector<Piece> pieces_;
  SchemePtr scheme_;
  int M_ = 0;
};

// Violations of the map invariants (empty when valid); fills *out when given.
std::vector<std::string> check_translation_map(const std::vector<MapPieceSpec>& pieces, const SchemePtr& D, int M,
                                               TranslationMap* out = nullptr);
// Throws InvalidInput listing every violation.
TranslationMap make_translation_map(const std::vector<MapPieceSpec>& pieces, const SchemePtr& D, int M);

struct AlgorithmInput {
  SchemePtr scheme;
  int M = 0;
  std::vector<TranslationMap> maps;
  std::vector<BallSet> omega0;
  // Cover exponent; negative means the smallest one that works.
  int ell = -1;

  const GeometryPtr& geometry() const { return scheme->geometry(); }
  std::size_t N() const { return omega0.size(); }
};

std::vector<std::string> validate_input(AlgorithmInput& in);

// Haar data: M = 0, Omega_{j,0} = H^perp, T_j(gamma) = gamma + sigma_j over the annulus reps.
AlgorithmInput haar_input(const SchemePtr& D);
// N = 1, Omega_{1,0} = H^perp, T_1(gamma) = gamma + sigma.
AlgorithmInput single_input(const SchemePtr& D, const Element& sigma);

// target intersected with the union over n >= 1 of (A*)^(-n) source, with the bound on n
// proven from the geometry of the two sets (see `certificate`).
struct DilationUnion {
  BallSet set;
  int nmax = 0;
  std::string certificate;
};
DilationUnion dilation_union(const BallSet& source, const BallSet& target, int M);

struct AlgorithmState {
  int m = 0;
  std::vector<BallSet> omega;                  // Omega_{j,m}
  std::vector<std::vector<BallSet>> lambda;    // lambda[j][i] = Lambda_{j,i+1}
  std::vector<BallSet> lambda_total;           // union of Lambda_{j,i}, i <= m
};

struct StepLog {
  int m = 0;
  std::vector<Rational> lambda_measure;
  std::vector<int> nmax;
  std::vector<std::string> certificates;
};

AlgorithmState initial_state(const AlgorithmInput& in);
// Advances m -> m + 1; appends violated invariants to *failures.
AlgorithmState step(const AlgorithmInput& in, const AlgorithmState& s, StepLog* log = nullptr,
                    std::vector<std::string>* failures = nullptr);

struct SelfSimilarity {
  int period = 1;
  int start = 1;                 // relation holds for all checked m >= start
  std::vector<Element> shifts;   // shifts[r] for m = start + r (mod period)
  std::vector<Element> limits;   // limit points, one per residue, truncated
  Rational total_measure;        // nu(Lambda_j) from the geometric tail
  int checked = 0;
};

struct ConstructionResult {
  AlgorithmInput input;
  AlgorithmState state;
  std::vector<StepLog> log;
  std::vector<std::string> failures;
  // Points of Omega_{j,m} in W that some later step may still remove.
  std::vector<BallSet> uncertain;
  // Omega_{j,m} minus the uncertain region; contained in the limit set.
  std::vector<BallSet> stabilized;
  Rational residual;
  std::vector<std::optional<SelfSimilarity>> descriptors;
  std::string stop_reason;
  bool nonconvergence = false;

  const std::vector<BallSet>& omega() const { return state.omega; }
  // Region where Omega_{j,m} and the limit set may differ: uncertain part and its image.
  BallSet envelope(std::size_t j) const;
};

struct RunOptions {
  int m_max = 10;
  Rational epsilon = 0;
  int patience = 3;
  // Refinement rounds for the region later steps may still move.
  int envelope_rounds = 24;
};

ConstructionResult run(AlgorithmInput in, const RunOptions& opts);

// Finite sets C_j with stabilized_j in C_j in stabilized_j + envelope(j), measure 1, congruent, and
// tiling exactly on the window [n0, n1].  Each C_j is the coarsest such set built from balls that meet
// stabilized_j; it agrees with the limit set up to the residual.
std::optional<std::vector<BallSet>> identify_limits(const ConstructionResult& r, int n0 = -4, int n1 = 4);

std::optional<SelfSimilarity> detect_self_similarity(const std::vector<BallSet>& lambda, int min_checks = 2);

}  // namespace lcaw
