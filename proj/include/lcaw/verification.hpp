#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "lcaw/operators.hpp"

namespace lcaw {

// Moves a set lying in one coset of H^perp (balls of scale >= 0) to target + H^perp,
// keeping each point's position relative to the coset representative in D.
BallSet move_piece(const BallSet& piece, const CosetScheme& D, const Element& target);

struct CongruenceWitness {
  struct Piece {
    Element sigma;
    BallSet part;
    BallSet image;
  };
  std::vector<Piece> pieces;
  BallSet image;     // union of translated pieces inside H^perp
  BallSet overlap;   // points hit by two pieces
  BallSet gap;       // H^perp minus the image
  BallSet defect;    // overlap union gap
  Rational defect_measure;
  bool congruent() const { return defect.empty(); }
};

// Translates each coset piece sigma + V_n of Omega back to H^perp and compares with H^perp.
CongruenceWitness check_congruence(const BallSet& omega, const CosetScheme& D);

struct TilingReport {
  int n0 = 0;
  int n1 = 0;
  // Shells (A*)^(k+1) H^perp \ (A*)^k H^perp for k in [k0, k1] are covered by the window.
  int k0 = 0;
  int k1 = -1;
  BallSet overlap;
  BallSet gap;
  BallSet excluded;  // where truncation residuals may move mass
  Rational overlap_measure;
  Rational gap_measure;
  Rational excluded_measure;
  // Defects outside the excluded region; must be empty.
  BallSet unexplained;
  // max over shells k of |A|^-(k+1) times the defect measure in shell k, i.e. the defect
  // carried back to the shell H^perp \ (A*)^-1 H^perp
  Rational max_shell_defect;
  bool ok() const { return unexplained.empty(); }
};

// Dilates (A*)^a Omega_j for a in [n0, n1].  `uncertain` lists, per set, a region whose
// dilates are exempt (the construction residual); pass {} for exact sets.
TilingReport check_tiling(const std::vector<BallSet>& omegas, int n0, int n1,
                          const std::vector<BallSet>& uncertain = {});

// Representative of the i-th coset of G/H: i in base |A| fills the blocks of A^l H / A^(l-1) H.
Element coset_rep(const Geometry& g, long i);

struct BasisIndex {
  std::size_t j = 0;
  int a = 0;
  long rep = 0;
};

std::vector<WaveletSymbol> basis_symbols(const std::vector<BallSet>& omegas, const SchemePtr& D, int a0, int a1,
                                         long reps, std::vector<BasisIndex>* index = nullptr);

struct GramResult {
  std::size_t size = 0;
  std::vector<ExactScalar> exact;                // row major, empty in float mode
  std::vector<std::complex<double>> numeric;     // row major
  bool identity = false;                         // exact identity, or within tolerance in float mode
  double max_deviation = 0;                      // max |G - I| in float
  std::size_t nonzero_offdiag = 0;
  const ExactScalar& at(std::size_t i, std::size_t k) const { return exact.at(i * size + k); }
};

GramResult gram_matrix(const std::vector<WaveletSymbol>& symbols, bool exact, int threads = 1, double tol = 1e-10);

// Sets obtained by deleting one sub-ball of scale 1..max_depth below the balls of omega.
std::vector<BallSet> single_deletions(const BallSet& omega, int max_depth);

}  // namespace lcaw
