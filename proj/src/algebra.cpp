#include "cstarframe/algebra.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "cstarframe/errors.hpp"

namespace csf {

AlgebraSpec::AlgebraSpec(std::vector<int> block_sizes) : block_sizes_(std::move(block_sizes)) {
  if (block_sizes_.empty()) throw Error(ErrorKind::InvalidSpec, "algebra needs at least one block");
  for (int n : block_sizes_) {
    if (n < 1) throw Error(ErrorKind::InvalidSpec, "block size must be >= 1, got " + std::to_string(n));
  }
}

int AlgebraSpec::total_size() const noexcept {
  return std::accumulate(block_sizes_.begin(), block_sizes_.end(), 0);
}

bool AlgebraSpec::is_commutative() const noexcept {
  return std::all_of(block_sizes_.begin(), block_sizes_.end(), [](int n) { return n == 1; });
}

AlgebraElement::AlgebraElement(AlgebraSpec spec, std::vector<Matrix> blocks)
    : spec_(std::move(spec)), blocks_(std::move(blocks)) {
  if (blocks_.size() != spec_.num_blocks()) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(spec_.num_blocks()) +
                                              " blocks, got " + std::to_string(blocks_.size()));
  }
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const int n = spec_.block_size(j);
    if (blocks_[j].rows() != n || blocks_[j].cols() != n) {
      throw Error(ErrorKind::ShapeMismatch, "block " + std::to_string(j) + " must be " +
                                                std::to_string(n) + "x" + std::to_string(n));
    }
  }
}

AlgebraElement AlgebraElement::zero(const AlgebraSpec& spec) { return scalar(spec, 0.0); }

AlgebraElement AlgebraElement::identity(const AlgebraSpec& spec) { return scalar(spec, 1.0); }

AlgebraElement AlgebraElement::scalar(const AlgebraSpec& spec, Complex value) {
  std::vector<Matrix> blocks;
  blocks.reserve(spec.num_blocks());
  for (int n : spec.block_sizes()) blocks.push_back(value * Matrix::Identity(n, n));
  return AlgebraElement(spec, std::move(blocks));
}

AlgebraElement AlgebraElement::diagonal(const AlgebraSpec& spec, const std::vector<double>& values) {
  if (!spec.is_commutative()) throw Error(ErrorKind::NotCommutative, "diagonal() needs 1x1 blocks");
  if (values.size() != spec.num_blocks()) throw Error(ErrorKind::ShapeMismatch, "one value per coordinate");
  std::vector<Matrix> blocks;
  blocks.reserve(values.size());
  for (double v : values) blocks.push_back(Matrix::Constant(1, 1, v));
  return AlgebraElement(spec, std::move(blocks));
}

namespace {

void require_same_spec(const AlgebraSpec& a, const AlgebraSpec& b) {
  if (!(a == b)) throw Error(ErrorKind::SpecMismatch, "algebra elements from different algebras");
}

}  // namespace

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  require_same_spec(spec_, other.spec_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) blocks_[j] += other.blocks_[j];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  require_same_spec(spec_, other.spec_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) blocks_[j] -= other.blocks_[j];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_spec(a.spec_, b.spec_);
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks_.size());
  for (std::size_t j = 0; j < a.blocks_.size(); ++j) blocks.push_back(a.blocks_[j] * b.blocks_[j]);
  return AlgebraElement(a.spec_, std::move(blocks));
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.spec_ == b.spec_)) return false;
  for (std::size_t j = 0; j < a.blocks_.size(); ++j) {
    if (a.blocks_[j] != b.blocks_[j]) return false;
  }
  return true;
}

AlgebraElement involution(const AlgebraElement& a) {
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks().size());
  for (const auto& b : a.blocks()) blocks.push_back(b.adjoint());
  return AlgebraElement(a.spec(), std::move(blocks));
}

double norm(const AlgebraElement& a) {
  double result = 0.0;
  for (const auto& b : a.blocks()) result = std::max(result, spectral_norm(b));
  return result;
}

double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_spec(a.spec(), b.spec());
  double result = 0.0;
  for (std::size_t j = 0; j < a.blocks().size(); ++j) {
    result = std::max(result, max_abs(a.block(j) - b.block(j)));
  }
  return result;
}

bool is_hermitian(const AlgebraElement& a, double tol) {
  return std::all_of(a.blocks().begin(), a.blocks().end(),
                     [tol](const Matrix& b) { return hermitian_defect(b) <= tol; });
}

double min_eigenvalue(const AlgebraElement& a) {
  double result = std::numeric_limits<double>::infinity();
  for (const auto& b : a.blocks()) result = std::min(result, hermitian_eig(b).values(0));
  return result;
}

bool is_positive(const AlgebraElement& a, double tol) {
  return is_hermitian(a, tol) && min_eigenvalue(a) >= -tol;
}

bool is_strictly_positive(const AlgebraElement& a, double eps) {
  return is_hermitian(a, eps) && min_eigenvalue(a) >= eps;
}

bool is_nonzero_everywhere(const AlgebraElement& a, double tol) {
  return std::all_of(a.blocks().begin(), a.blocks().end(),
                     [tol](const Matrix& b) { return max_abs(b) > tol; });
}

AlgebraElement inverse(const AlgebraElement& a) {
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks().size());
  for (const auto& b : a.blocks()) {
    Eigen::FullPivLU<Matrix> lu(b);
    if (!lu.isInvertible()) throw Error(ErrorKind::NotPositive, "element is not invertible");
    blocks.push_back(lu.inverse());
  }
  return AlgebraElement(a.spec(), std::move(blocks));
}

AlgebraElement positive_sqrt(const AlgebraElement& a, double tol) {
  if (!is_positive(a, tol)) throw Error(ErrorKind::NotPositive, "positive_sqrt of a non-positive element");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks().size());
  for (const auto& b : a.blocks()) blocks.push_back(psd_sqrt(b, tol));
  return AlgebraElement(a.spec(), std::move(blocks));
}

AlgebraElement absolute_value(const AlgebraElement& a) {
  // a* a is Hermitian by construction; drop the roundoff before the check.
  std::vector<Matrix> gram;
  gram.reserve(a.blocks().size());
  for (const auto& b : a.blocks()) gram.push_back(hermitian_part(b.adjoint() * b));
  const AlgebraElement g(a.spec(), std::move(gram));
  return positive_sqrt(g, std::max(kDefaultPositivityTol, 1e-14 * norm(g)));
}

}  // namespace csf
