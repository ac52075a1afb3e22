#pragma once

#include <complex>
#include <memory>

#include "lcaw/geometry.hpp"
#include "lcaw/signal.hpp"

namespace lcaw {

using SchemePtr = std::shared_ptr<const CosetScheme>;

// value * sqrt(base) when root, else value.
struct ExactScalar {
  Cyclo value;
  bool root = false;
  long base = 1;

  // v * base^(half_power / 2)
  static ExactScalar scaled(const Cyclo& v, int half_power, long base);

  ExactScalar& operator+=(const ExactScalar& o);
  ExactScalar operator+(const ExactScalar& o) const;
  ExactScalar operator-(const ExactScalar& o) const;
  ExactScalar operator*(const ExactScalar& o) const;
  ExactScalar conj() const;
  bool is_zero() const { return value.is_zero(); }
  bool equals(const ExactScalar& o) const { return (*this - o).is_zero(); }
  bool is_one() const;
  Rational abs2() const;
  // Exact value as a cyclotomic number; throws when a square root remains.
  Cyclo cyclo() const;
  std::complex<double> to_complex() const;
  std::string str() const;
};

// conj((s, eta(gamma))).
Angle weight_eval(const CosetScheme& D, const Element& s, const Element& gamma);

// Integral over X of (x, beta) d beta.
Cyclo char_integral(const Geometry& g, const Element& x, const BallSet& X);
// Integral over X of (u - v, beta) d beta without forming u - v.
Cyclo char_integral_diff(const Geometry& g, const Element& u, const Element& v, const BallSet& X);

// Fourier data of psi_{A^a, [s]} with psi^ = 1_Omega.
class WaveletSymbol {
 public:
  WaveletSymbol() = default;
  WaveletSymbol(BallSet omega, int a, const Element& s, SchemePtr scheme);

  const BallSet& omega() const { return omega_; }
  int a() const { return a_; }
  const Element& s() const { return s_; }
  const SchemePtr& scheme() const { return scheme_; }
  const Geometry& geometry() const { return *omega_.geometry(); }
  // (A*)^a Omega, the frequency support.
  const BallSet& support() const { return dilated_; }
  const std::vector<CosetPiece>& pieces() const { return pieces_; }
  // Smallest K with psi constant on cosets of A^(-K) H.
  int constancy_exponent() const { return a_ + level_; }
  // psi vanishes outside A^(-a)(s + A^k H) for this k.
  int support_exponent() const { return spread_; }

 private:
  BallSet omega_;
  int a_ = 0;
  Element s_;
  SchemePtr scheme_;
  BallSet dilated_;
  std::vector<CosetPiece> pieces_;
  int level_ = 0;
  int spread_ = 0;
};

// Fourier transform of the wavelet at gamma.
ExactScalar fourier_eval(const WaveletSymbol& psi, const Element& gamma);
ExactScalar wavelet_eval(const WaveletSymbol& psi, const Element& x);
ExactScalar inner_product(const WaveletSymbol& p, const WaveletSymbol& q);
std::complex<double> inner_product_float(const WaveletSymbol& p, const WaveletSymbol& q);

// Part of <p, q> fixed by the sets and dilations alone; shared by all translates.
struct OverlapTerms {
  struct Term {
    Rational measure;
    std::vector<int> cut;
    Element center;
    Element sigma_p, sigma_q;
  };
  std::vector<Term> balls;
};
OverlapTerms overlap_terms(const WaveletSymbol& p, const WaveletSymbol& q);
ExactScalar inner_product(const WaveletSymbol& p, const WaveletSymbol& q, const OverlapTerms& t);
std::complex<double> inner_product_float(const WaveletSymbol& p, const WaveletSymbol& q, const OverlapTerms& t);

class RefinementNeeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// <f, psi> by exact cell sum.
ExactScalar analysis_coeff(const FiniteSignal& f, const WaveletSymbol& psi);

}  // namespace lcaw
