#pragma once

// Thin Hermitian linear-algebra layer over Eigen shared by every module.

#include <complex>

#include <Eigen/Dense>

namespace csf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest absolute entry of A - A^H.
double hermitian_defect(const Matrix& a);

/// Largest absolute entry.
double max_abs(const Matrix& a);

/// (A + A^H) / 2.
Matrix hermitian_part(const Matrix& a);

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;     // columns match values
};

/// Eigendecomposition of the Hermitian part of A. Callers are expected to
/// have checked hermitian_defect first.
HermitianEig hermitian_eig(const Matrix& a);

/// Largest singular value (0 for empty matrices).
double spectral_norm(const Matrix& a);

/// Positive square root of a PSD Hermitian matrix; eigenvalues in
/// [-clamp, 0) are treated as zero.
Matrix psd_sqrt(const Matrix& a, double clamp);

}  // namespace csf
