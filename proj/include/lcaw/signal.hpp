#pragma once

#include <string>
#include <vector>

#include "lcaw/geometry.hpp"

namespace lcaw {

// A function on G supported in A^L H and constant on cosets of A^(-K) H.
// Cell i is the coset of A^(-K) H whose digits at positions [-a L, a K) spell i,
// first digit most significant.
class FiniteSignal {
 public:
  FiniteSignal() = default;
  FiniteSignal(GeometryPtr g, int L, int K);

  const GeometryPtr& geometry() const { return geo_; }
  int L() const { return L_; }
  int K() const { return K_; }
  std::size_t cells() const { return values_.size(); }
  Rational cell_measure() const { return geo_->measure(K_); }

  const Cyclo& value(std::size_t cell) const { return values_.at(cell); }
  void set(std::size_t cell, Cyclo v) { values_.at(cell) = std::move(v); }
  const std::vector<Cyclo>& values() const { return values_; }

  Element point(std::size_t cell) const;
  // Cell containing x, or cells() when x lies outside A^L H.
  std::size_t cell_of(const Element& x) const;
  std::string key(std::size_t cell) const;
  std::size_t cell_of_key(const std::string& key) const;

  // Exact squared L2 norm.
  Rational norm2() const;
  // Integral of f over G.
  Cyclo integral() const;

  bool operator==(const FiniteSignal& o) const;

 private:
  GeometryPtr geo_;
  int L_ = 0;
  int K_ = 0;
  std::vector<Cyclo> values_;
};

Rational abs2(const Cyclo& z);

}  // namespace lcaw
