#pragma once

// The free Hilbert A-module H = A^d with the left action (a.x)_i = a x_i and
// the A-valued inner product <x, y> = sum_i x_i y_i^*.

#include <cstddef>
#include <vector>

#include "cstarframe/algebra.hpp"

namespace csf {

class ModuleSpace {
public:
  /// Throws Error(InvalidSpec) when rank < 1.
  ModuleSpace(AlgebraSpec spec, int rank);

  const AlgebraSpec& spec() const noexcept { return spec_; }
  int rank() const noexcept { return rank_; }

  friend bool operator==(const ModuleSpace&, const ModuleSpace&) = default;

private:
  AlgebraSpec spec_;
  int rank_;
};

class ModuleVector {
public:
  /// Throws Error(ShapeMismatch) for a wrong coordinate count and
  /// Error(SpecMismatch) when a coordinate lives in another algebra.
  ModuleVector(ModuleSpace space, std::vector<AlgebraElement> coords);

  static ModuleVector zero(const ModuleSpace& space);
  /// The vector with 1_A in coordinate i and zero elsewhere.
  static ModuleVector unit(const ModuleSpace& space, int i);

  const ModuleSpace& space() const noexcept { return space_; }
  const std::vector<AlgebraElement>& coords() const noexcept { return coords_; }
  const AlgebraElement& coord(std::size_t i) const { return coords_.at(i); }

  ModuleVector& operator+=(const ModuleVector& other);
  ModuleVector& operator-=(const ModuleVector& other);
  ModuleVector& operator*=(Complex s);

  friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
  friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
  friend ModuleVector operator*(Complex s, ModuleVector a) { return a *= s; }
  friend bool operator==(const ModuleVector&, const ModuleVector&) = default;

private:
  ModuleSpace space_;
  std::vector<AlgebraElement> coords_;
};

/// <x, y> = sum_i x_i y_i^*. Throws Error(SpaceMismatch).
AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y);

/// (a.x)_i = a x_i. Throws Error(SpecMismatch).
ModuleVector module_action(const AlgebraElement& a, const ModuleVector& x);

/// ||x|| = ||<x, x>||^(1/2).
double vector_norm(const ModuleVector& x);

/// |x| = <x, x>^(1/2).
AlgebraElement a_valued_norm(const ModuleVector& x);

/// Max-abs entry distance between two vectors of one space.
double max_abs_diff(const ModuleVector& x, const ModuleVector& y);

// ---------------------------------------------------------------------------
// Finite direct sums. For free modules over one algebra the sum
// A^{d_1} (+) ... (+) A^{d_k} is again free, A^{d_1 + ... + d_k}; summand k
// occupies a contiguous run of coordinates.

class DirectSum {
public:
  /// Throws Error(EmptyFamily) for no parts, Error(SpecMismatch) when parts
  /// use different algebras.
  explicit DirectSum(std::vector<ModuleSpace> parts);

  const ModuleSpace& total() const noexcept { return total_; }
  const std::vector<ModuleSpace>& parts() const noexcept { return parts_; }
  std::size_t size() const noexcept { return parts_.size(); }
  int offset(std::size_t k) const { return offsets_.at(k); }

private:
  std::vector<ModuleSpace> parts_;
  std::vector<int> offsets_;
  ModuleSpace total_;
};

ModuleSpace direct_sum(const std::vector<ModuleSpace>& spaces);

/// Places x (a vector of part k) into the sum, zero elsewhere.
ModuleVector embed(const DirectSum& sum, std::size_t k, const ModuleVector& x);

/// Component k of a vector of the sum.
ModuleVector project(const DirectSum& sum, std::size_t k, const ModuleVector& x);

}  // namespace csf
