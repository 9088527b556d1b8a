#include "cstarframe/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace csf {

double hermitian_defect(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

HermitianEig hermitian_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Matrix psd_sqrt(const Matrix& a, double clamp) {
  auto eig = hermitian_eig(a);
  RealVector roots = eig.values.unaryExpr([clamp](double v) {
    if (v < 0.0 && v >= -clamp) return 0.0;
    return std::sqrt(std::max(v, 0.0));
  });
  Matrix s = eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(s);
}

}  // namespace csf
