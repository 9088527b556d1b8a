#pragma once

// Adjointable operators between free modules A^{d_in} -> A^{d_out}.
//
// An operator is a d_in x d_out matrix M over A acting by right
// multiplication, (Tx)_k = sum_i x_i M_ik, which makes it A-linear for the
// left module structure. The adjoint has entries (T*)_ki = (M_ik)^*.
//
// Realization. Fix an algebra block j of size n. Every row r of the block-j
// components of x gives a coordinate vector c in C^{n d} with
// c[i n + col] = (x_i)_j[r, col], and T acts on all such rows by the same
// complex matrix R_j of shape (n d_out) x (n d_in):
//
//   R_j[k n + c', i n + c] = (M_ik)_j[c, c'].
//
// The realization of T is the list (R_1, ..., R_m); its dense form is the
// block-diagonal matrix of size (N d_out) x (N d_in) with N = sum_j n_j.
// With this convention realize(adjoint(T)) is exactly the conjugate
// transpose of realize(T), and positivity of a self-adjoint operator is
// positivity of every R_j.

#include <cstddef>
#include <optional>
#include <vector>

#include "cstarframe/module.hpp"

namespace csf {

/// Relative rank threshold: a singular value counts as nonzero when it
/// exceeds this times the largest singular value.
inline constexpr double kRankTol = 1e-8;

struct Realization {
  std::vector<Matrix> blocks;

  /// Block-diagonal assembly.
  Matrix dense() const;
};

class AdjointableOp {
public:
  /// entries is row-major, d_in x d_out. Throws Error(ShapeMismatch) on a
  /// wrong entry count, Error(SpecMismatch) if spaces or entries disagree on
  /// the algebra.
  AdjointableOp(ModuleSpace domain, ModuleSpace codomain, std::vector<AlgebraElement> entries);

  static AdjointableOp zero(const ModuleSpace& domain, const ModuleSpace& codomain);
  static AdjointableOp identity(const ModuleSpace& space);
  /// Inverse of realize(): rebuilds the operator from per-block matrices.
  static AdjointableOp from_realization(const ModuleSpace& domain, const ModuleSpace& codomain,
                                        const Realization& r);

  const ModuleSpace& domain() const noexcept { return domain_; }
  const ModuleSpace& codomain() const noexcept { return codomain_; }
  const AlgebraElement& entry(int i, int k) const;
  const std::vector<AlgebraElement>& entries() const noexcept { return entries_; }
  bool is_endomorphism() const noexcept { return domain_ == codomain_; }

  friend bool operator==(const AdjointableOp&, const AdjointableOp&) = default;

private:
  ModuleSpace domain_;
  ModuleSpace codomain_;
  std::vector<AlgebraElement> entries_;
};

/// Throws Error(SpaceMismatch) when x is not in the domain.
ModuleVector apply(const AdjointableOp& t, const ModuleVector& x);

AdjointableOp adjoint(const AdjointableOp& t);

/// s o t (apply t first). Throws Error(SpaceMismatch).
AdjointableOp compose(const AdjointableOp& s, const AdjointableOp& t);
AdjointableOp add(const AdjointableOp& s, const AdjointableOp& t);
AdjointableOp subtract(const AdjointableOp& s, const AdjointableOp& t);
AdjointableOp scale(const AdjointableOp& t, Complex s);

/// Operator-module inner product <T, S> = T o S^*.
AdjointableOp operator_inner(const AdjointableOp& t, const AdjointableOp& s);

/// (a.T)(x) = a.(T x). Only A-linear for commutative algebras; throws
/// Error(NotCommutative) otherwise.
AdjointableOp left_action(const AlgebraElement& a, const AdjointableOp& t);

/// Rank-one operator z -> <z, y> u from y's space to u's space.
AdjointableOp outer(const ModuleVector& u, const ModuleVector& y);

/// The functional z -> <z, y> into A^1.
AdjointableOp functional(const ModuleVector& y);

Realization realize(const AdjointableOp& t);

/// Per-block row-coordinate matrices of x: block j is (n_j d) x n_j and its
/// column r is the coordinate vector of row r. Then
/// flatten(apply(T, x)).blocks[j] == realize(T).blocks[j] * flatten(x).blocks[j].
Realization flatten(const ModuleVector& x);

/// Vector whose block-j components have row 0 given by v (length n_j d) and
/// are zero elsewhere.
ModuleVector vector_from_row(const ModuleSpace& space, std::size_t block, const Vector& v);

/// Largest absolute entry difference of the realizations.
double max_abs_diff(const AdjointableOp& s, const AdjointableOp& t);

/// Largest singular value of the realization.
double op_norm(const AdjointableOp& t);

/// Self-adjoint within tol * max(1, ||T||) in max-abs entry distance.
bool is_self_adjoint(const AdjointableOp& t, double tol = 1e-9);

struct PsdProbe {
  double min_eigenvalue = 0.0;
  std::size_t block = 0;
  Vector eigenvector;  // row coordinates in `block` for min_eigenvalue
};

/// Smallest eigenvalue of the realization of a self-adjoint endomorphism,
/// with its eigenvector. Throws Error(ShapeMismatch) for non-endomorphisms
/// and Error(NotSelfAdjoint) when the operator is not self-adjoint.
PsdProbe psd_probe(const AdjointableOp& t);

/// P <= Q in the Loewner order: realize(Q - P) has all eigenvalues >= -tol.
bool is_psd_order(const AdjointableOp& p, const AdjointableOp& q, double tol = 1e-9);

struct Spectrum {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of a self-adjoint endomorphism.
Spectrum spectrum(const AdjointableOp& t);

struct ClosedRangeBounds {
  bool injective_closed_range = false;
  double lower = 0.0;  // ||(T*T)^-1||^-1 = sigma_min(T)^2 when injective
  double upper = 0.0;  // ||T||^2 = sigma_max(T)^2
};

/// Injectivity with closed range, decided by the rank test sigma > kRankTol *
/// sigma_max on every block, and the constants of the sandwich
/// lower I <= T*T <= upper I.
ClosedRangeBounds closed_range_bounds(const AdjointableOp& t);

/// The surjective counterpart: closed_range_bounds(adjoint(T)), giving
/// lower I <= T T* <= upper I when T is onto.
ClosedRangeBounds surjectivity_bounds(const AdjointableOp& t);

/// Positive square root of a self-adjoint positive endomorphism; throws
/// Error(NotPositive) when an eigenvalue is below -tol.
AdjointableOp operator_sqrt(const AdjointableOp& s, double tol = 1e-9);

/// T^n for an endomorphism (identity for n = 0).
AdjointableOp power(const AdjointableOp& t, int n);

}  // namespace csf
