#pragma once

// Finite-dimensional C*-algebras A = M_{n1}(C) (+) ... (+) M_{nm}(C).
//
// Elements are stored as a list of dense complex blocks. The involution is
// the blockwise conjugate transpose and the norm is the operator norm (the
// largest singular value over all blocks). Positivity is decided blockwise
// on Hermitian blocks with an absolute eigenvalue tolerance.

#include <cstddef>
#include <vector>

#include "cstarframe/linalg.hpp"

namespace csf {

inline constexpr double kDefaultPositivityTol = 1e-9;

class AlgebraSpec {
public:
  /// Throws Error(InvalidSpec) unless there is at least one block and all
  /// sizes are >= 1.
  explicit AlgebraSpec(std::vector<int> block_sizes);

  const std::vector<int>& block_sizes() const noexcept { return block_sizes_; }
  std::size_t num_blocks() const noexcept { return block_sizes_.size(); }
  int block_size(std::size_t j) const { return block_sizes_.at(j); }

  /// Sum of the block sizes.
  int total_size() const noexcept;

  bool is_commutative() const noexcept;

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

private:
  std::vector<int> block_sizes_;
};

class AlgebraElement {
public:
  /// Throws Error(ShapeMismatch) if block shapes do not match the spec.
  AlgebraElement(AlgebraSpec spec, std::vector<Matrix> blocks);

  static AlgebraElement zero(const AlgebraSpec& spec);
  static AlgebraElement identity(const AlgebraSpec& spec);
  static AlgebraElement scalar(const AlgebraSpec& spec, Complex value);
  /// Commutative algebras only: the element with coordinate j equal to values[j].
  static AlgebraElement diagonal(const AlgebraSpec& spec, const std::vector<double>& values);

  const AlgebraSpec& spec() const noexcept { return spec_; }
  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }
  const Matrix& block(std::size_t j) const { return blocks_.at(j); }

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex s);

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(AlgebraElement a, Complex s) { return a *= s; }
  friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

  /// Exact (bitwise) equality of spec and entries.
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b);

private:
  AlgebraSpec spec_;
  std::vector<Matrix> blocks_;
};

AlgebraElement involution(const AlgebraElement& a);

/// Operator norm: max over blocks of the largest singular value.
double norm(const AlgebraElement& a);

/// Max-abs entry distance, used for "within tolerance" comparisons.
double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b);

bool is_hermitian(const AlgebraElement& a, double tol = kDefaultPositivityTol);

/// Each block Hermitian within tol (max-abs) and every eigenvalue >= -tol.
bool is_positive(const AlgebraElement& a, double tol = kDefaultPositivityTol);

/// Hermitian within eps and every eigenvalue >= eps.
bool is_strictly_positive(const AlgebraElement& a, double eps);

/// The raw "strictly nonzero" reading: no block is (numerically) zero.
bool is_nonzero_everywhere(const AlgebraElement& a, double tol = kDefaultPositivityTol);

/// Smallest eigenvalue over all blocks of a Hermitian element.
double min_eigenvalue(const AlgebraElement& a);

/// Blockwise inverse; throws Error(NotPositive) when a block is singular.
AlgebraElement inverse(const AlgebraElement& a);

/// Throws Error(NotPositive) when is_positive(a, tol) fails.
AlgebraElement positive_sqrt(const AlgebraElement& a, double tol = kDefaultPositivityTol);

/// |a| = (a* a)^(1/2).
AlgebraElement absolute_value(const AlgebraElement& a);

}  // namespace csf
