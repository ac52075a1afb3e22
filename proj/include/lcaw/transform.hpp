#pragma once

#include <string>
#include <vector>

#include "lcaw/verification.hpp"

namespace lcaw {

struct BasisEntry {
  std::size_t j = 0;
  int a = 0;
  long rep = 0;
};

// A finite family psi_{j,a,[s]} of wavelets built from the sets omega_j.
class Basis {
 public:
  // a in [a0, a1] and s over all of A^(a+L) H / H.
  static Basis window(std::vector<BallSet> omegas, SchemePtr D, int a0, int a1, int L);
  // a in [a0, a1] and the first `reps` coset representatives.
  static Basis fixed(std::vector<BallSet> omegas, SchemePtr D, int a0, int a1, long reps);
  // The window that spans the zero-mean signals with exponents (L, K) for Haar sets.
  static Basis complete(std::vector<BallSet> omegas, SchemePtr D, int L, int K) {
    return window(std::move(omegas), std::move(D), -L, K - 1, L);
  }

  const std::vector<BallSet>& omegas() const { return omegas_; }
  const SchemePtr& scheme() const { return scheme_; }
  const GeometryPtr& geometry() const { return scheme_->geometry(); }
  const std::vector<BasisEntry>& entries() const { return entries_; }
  const std::vector<WaveletSymbol>& symbols() const { return symbols_; }
  std::size_t size() const { return entries_.size(); }
  int a0() const { return a0_; }
  int a1() const { return a1_; }
  // Coset exponent of a window basis, -1 for a fixed one.
  int L() const { return L_; }
  // The sets are the Haar collection sigma_j + H^perp over all annulus representatives.
  bool haar() const { return haar_; }

 private:
  void build(long fixed_reps);
  std::vector<BallSet> omegas_;
  SchemePtr scheme_;
  int a0_ = 0, a1_ = -1, L_ = -1;
  bool haar_ = false;
  std::vector<BasisEntry> entries_;
  std::vector<WaveletSymbol> symbols_;
};

enum class TransformPath { Auto, Reference, Haar };

// <f, psi> for every basis entry.
std::vector<ExactScalar> analyze(const FiniteSignal& f, const Basis& B, TransformPath path = TransformPath::Auto,
                                 int threads = 1);
// sum c_i psi_i sampled on the cells of a signal with exponents (L, K).
FiniteSignal synthesize(const std::vector<ExactScalar>& c, const Basis& B, int L, int K,
                        TransformPath path = TransformPath::Auto);

// Whether the basis spans every signal like f; `why` explains a negative answer.
bool window_complete(const FiniteSignal& f, const Basis& B, std::string* why = nullptr);

struct ParsevalReport {
  // Exact energies; coeff_energy is valid only when `rational` holds.
  Rational coeff_energy;
  Rational norm2;
  Rational ratio;
  bool rational = true;
  double ratio_approx = 0;
  bool complete = false;
  std::string note;
};

ParsevalReport parseval_check(const FiniteSignal& f, const Basis& B, int threads = 1);

}  // namespace lcaw
