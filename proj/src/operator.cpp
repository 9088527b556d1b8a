#include "cstarframe/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cstarframe/errors.hpp"

namespace csf {

Matrix Realization::dense() const {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

AdjointableOp::AdjointableOp(ModuleSpace domain, ModuleSpace codomain, std::vector<AlgebraElement> entries)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), entries_(std::move(entries)) {
  if (!(domain_.spec() == codomain_.spec())) {
    throw Error(ErrorKind::SpecMismatch, "domain and codomain use different algebras");
  }
  const auto expected = static_cast<std::size_t>(domain_.rank()) * static_cast<std::size_t>(codomain_.rank());
  if (entries_.size() != expected) {
    throw Error(ErrorKind::ShapeMismatch,
                "operator needs " + std::to_string(expected) + " entries, got " + std::to_string(entries_.size()));
  }
  for (const auto& e : entries_) {
    if (!(e.spec() == domain_.spec())) throw Error(ErrorKind::SpecMismatch, "operator entry from another algebra");
  }
}

const AlgebraElement& AdjointableOp::entry(int i, int k) const {
  return entries_.at(static_cast<std::size_t>(i) * codomain_.rank() + k);
}

AdjointableOp AdjointableOp::zero(const ModuleSpace& domain, const ModuleSpace& codomain) {
  return AdjointableOp(domain, codomain,
                       std::vector<AlgebraElement>(static_cast<std::size_t>(domain.rank()) * codomain.rank(),
                                                   AlgebraElement::zero(domain.spec())));
}

AdjointableOp AdjointableOp::identity(const ModuleSpace& space) {
  std::vector<AlgebraElement> entries;
  entries.reserve(static_cast<std::size_t>(space.rank()) * space.rank());
  for (int i = 0; i < space.rank(); ++i) {
    for (int k = 0; k < space.rank(); ++k) {
      entries.push_back(i == k ? AlgebraElement::identity(space.spec()) : AlgebraElement::zero(space.spec()));
    }
  }
  return AdjointableOp(space, space, std::move(entries));
}

AdjointableOp AdjointableOp::from_realization(const ModuleSpace& domain, const ModuleSpace& codomain,
                                              const Realization& r) {
  const AlgebraSpec& spec = domain.spec();
  const int d_in = domain.rank();
  const int d_out = codomain.rank();
  if (r.blocks.size() != spec.num_blocks()) throw Error(ErrorKind::ShapeMismatch, "realization block count");
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const int n = spec.block_size(j);
    if (r.blocks[j].rows() != n * d_out || r.blocks[j].cols() != n * d_in) {
      throw Error(ErrorKind::ShapeMismatch, "realization block " + std::to_string(j) + " has the wrong shape");
    }
  }
  std::vector<AlgebraElement> entries;
  entries.reserve(static_cast<std::size_t>(d_in) * d_out);
  for (int i = 0; i < d_in; ++i) {
    for (int k = 0; k < d_out; ++k) {
      std::vector<Matrix> blocks;
      for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
        const int n = spec.block_size(j);
        blocks.push_back(r.blocks[j].block(k * n, i * n, n, n).transpose());
      }
      entries.emplace_back(spec, std::move(blocks));
    }
  }
  return AdjointableOp(domain, codomain, std::move(entries));
}

ModuleVector apply(const AdjointableOp& t, const ModuleVector& x) {
  if (!(x.space() == t.domain())) throw Error(ErrorKind::SpaceMismatch, "vector is not in the operator's domain");
  const AlgebraSpec& spec = t.domain().spec();
  std::vector<AlgebraElement> out;
  out.reserve(t.codomain().rank());
  for (int k = 0; k < t.codomain().rank(); ++k) {
    AlgebraElement acc = AlgebraElement::zero(spec);
    for (int i = 0; i < t.domain().rank(); ++i) acc += x.coord(i) * t.entry(i, k);
    out.push_back(std::move(acc));
  }
  return ModuleVector(t.codomain(), std::move(out));
}

AdjointableOp adjoint(const AdjointableOp& t) {
  std::vector<AlgebraElement> entries;
  entries.reserve(t.entries().size());
  for (int k = 0; k < t.codomain().rank(); ++k) {
    for (int i = 0; i < t.domain().rank(); ++i) entries.push_back(involution(t.entry(i, k)));
  }
  return AdjointableOp(t.codomain(), t.domain(), std::move(entries));
}

AdjointableOp compose(const AdjointableOp& s, const AdjointableOp& t) {
  if (!(t.codomain() == s.domain())) throw Error(ErrorKind::SpaceMismatch, "compose: codomain/domain mismatch");
  const AlgebraSpec& spec = t.domain().spec();
  std::vector<AlgebraElement> entries;
  entries.reserve(static_cast<std::size_t>(t.domain().rank()) * s.codomain().rank());
  for (int i = 0; i < t.domain().rank(); ++i) {
    for (int k = 0; k < s.codomain().rank(); ++k) {
      AlgebraElement acc = AlgebraElement::zero(spec);
      for (int l = 0; l < t.codomain().rank(); ++l) acc += t.entry(i, l) * s.entry(l, k);
      entries.push_back(std::move(acc));
    }
  }
  return AdjointableOp(t.domain(), s.codomain(), std::move(entries));
}

namespace {

void require_same_shape(const AdjointableOp& s, const AdjointableOp& t) {
  if (!(s.domain() == t.domain()) || !(s.codomain() == t.codomain())) {
    throw Error(ErrorKind::SpaceMismatch, "operators act between different spaces");
  }
}

}  // namespace

AdjointableOp add(const AdjointableOp& s, const AdjointableOp& t) {
  require_same_shape(s, t);
  std::vector<AlgebraElement> entries = s.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) entries[e] += t.entries()[e];
  return AdjointableOp(s.domain(), s.codomain(), std::move(entries));
}

AdjointableOp subtract(const AdjointableOp& s, const AdjointableOp& t) {
  require_same_shape(s, t);
  std::vector<AlgebraElement> entries = s.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) entries[e] -= t.entries()[e];
  return AdjointableOp(s.domain(), s.codomain(), std::move(entries));
}

AdjointableOp scale(const AdjointableOp& t, Complex s) {
  std::vector<AlgebraElement> entries = t.entries();
  for (auto& e : entries) e *= s;
  return AdjointableOp(t.domain(), t.codomain(), std::move(entries));
}

AdjointableOp operator_inner(const AdjointableOp& t, const AdjointableOp& s) { return compose(t, adjoint(s)); }

AdjointableOp left_action(const AlgebraElement& a, const AdjointableOp& t) {
  if (!a.spec().is_commutative()) {
    throw Error(ErrorKind::NotCommutative, "left action on operators needs a commutative algebra");
  }
  if (!(a.spec() == t.domain().spec())) throw Error(ErrorKind::SpecMismatch, "element and operator disagree");
  std::vector<AlgebraElement> entries;
  entries.reserve(t.entries().size());
  for (const auto& e : t.entries()) entries.push_back(a * e);
  return AdjointableOp(t.domain(), t.codomain(), std::move(entries));
}

AdjointableOp outer(const ModuleVector& u, const ModuleVector& y) {
  if (!(u.space().spec() == y.space().spec())) throw Error(ErrorKind::SpecMismatch, "outer: different algebras");
  std::vector<AlgebraElement> entries;
  entries.reserve(static_cast<std::size_t>(y.space().rank()) * u.space().rank());
  for (int i = 0; i < y.space().rank(); ++i) {
    const AlgebraElement yi_star = involution(y.coord(i));
    for (int k = 0; k < u.space().rank(); ++k) entries.push_back(yi_star * u.coord(k));
  }
  return AdjointableOp(y.space(), u.space(), std::move(entries));
}

AdjointableOp functional(const ModuleVector& y) {
  const ModuleSpace line(y.space().spec(), 1);
  return outer(ModuleVector::unit(line, 0), y);
}

Realization realize(const AdjointableOp& t) {
  const AlgebraSpec& spec = t.domain().spec();
  const int d_in = t.domain().rank();
  const int d_out = t.codomain().rank();
  Realization r;
  r.blocks.reserve(spec.num_blocks());
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const int n = spec.block_size(j);
    Matrix rj(n * d_out, n * d_in);
    for (int i = 0; i < d_in; ++i) {
      for (int k = 0; k < d_out; ++k) rj.block(k * n, i * n, n, n) = t.entry(i, k).block(j).transpose();
    }
    r.blocks.push_back(std::move(rj));
  }
  return r;
}

Realization flatten(const ModuleVector& x) {
  const AlgebraSpec& spec = x.space().spec();
  const int d = x.space().rank();
  Realization r;
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const int n = spec.block_size(j);
    Matrix cj(n * d, n);
    for (int i = 0; i < d; ++i) cj.block(i * n, 0, n, n) = x.coord(i).block(j).transpose();
    r.blocks.push_back(std::move(cj));
  }
  return r;
}

ModuleVector vector_from_row(const ModuleSpace& space, std::size_t block, const Vector& v) {
  const AlgebraSpec& spec = space.spec();
  const int n = spec.block_size(block);
  if (v.size() != static_cast<Eigen::Index>(n) * space.rank()) {
    throw Error(ErrorKind::ShapeMismatch, "row vector length does not match the block");
  }
  std::vector<AlgebraElement> coords;
  for (int i = 0; i < space.rank(); ++i) {
    std::vector<Matrix> blocks;
    for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
      const int nj = spec.block_size(j);
      Matrix b = Matrix::Zero(nj, nj);
      if (j == block) b.row(0) = v.segment(static_cast<Eigen::Index>(i) * n, n).transpose();
      blocks.push_back(std::move(b));
    }
    coords.emplace_back(spec, std::move(blocks));
  }
  return ModuleVector(space, std::move(coords));
}

double max_abs_diff(const AdjointableOp& s, const AdjointableOp& t) {
  require_same_shape(s, t);
  double result = 0.0;
  for (std::size_t e = 0; e < s.entries().size(); ++e) {
    result = std::max(result, max_abs_diff(s.entries()[e], t.entries()[e]));
  }
  return result;
}

double op_norm(const AdjointableOp& t) {
  double result = 0.0;
  for (const auto& b : realize(t).blocks) result = std::max(result, spectral_norm(b));
  return result;
}

bool is_self_adjoint(const AdjointableOp& t, double tol) {
  if (!t.is_endomorphism()) return false;
  const Realization r = realize(t);
  double scale_ref = 1.0;
  double defect = 0.0;
  for (const auto& b : r.blocks) {
    scale_ref = std::max(scale_ref, max_abs(b));
    defect = std::max(defect, hermitian_defect(b));
  }
  return defect <= tol * scale_ref;
}

PsdProbe psd_probe(const AdjointableOp& t) {
  if (!t.is_endomorphism()) throw Error(ErrorKind::ShapeMismatch, "PSD probe needs an endomorphism");
  if (!is_self_adjoint(t)) throw Error(ErrorKind::NotSelfAdjoint, "PSD probe needs a self-adjoint operator");
  const Realization r = realize(t);
  PsdProbe probe;
  probe.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < r.blocks.size(); ++j) {
    const auto eig = hermitian_eig(r.blocks[j]);
    if (eig.values(0) < probe.min_eigenvalue) {
      probe.min_eigenvalue = eig.values(0);
      probe.block = j;
      probe.eigenvector = eig.vectors.col(0);
    }
  }
  return probe;
}

bool is_psd_order(const AdjointableOp& p, const AdjointableOp& q, double tol) {
  if (!p.is_endomorphism() || !q.is_endomorphism() || !(p.domain() == q.domain())) {
    throw Error(ErrorKind::ShapeMismatch, "PSD order needs endomorphisms of one space");
  }
  return psd_probe(subtract(q, p)).min_eigenvalue >= -tol;
}

Spectrum spectrum(const AdjointableOp& t) {
  if (!t.is_endomorphism()) throw Error(ErrorKind::ShapeMismatch, "spectrum needs an endomorphism");
  if (!is_self_adjoint(t)) throw Error(ErrorKind::NotSelfAdjoint, "spectrum needs a self-adjoint operator");
  Spectrum s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& b : realize(t).blocks) {
    const auto eig = hermitian_eig(b);
    s.min = std::min(s.min, eig.values(0));
    s.max = std::max(s.max, eig.values(eig.values.size() - 1));
  }
  return s;
}

ClosedRangeBounds closed_range_bounds(const AdjointableOp& t) {
  const Realization r = realize(t);
  double sigma_max = 0.0;
  double sigma_min = std::numeric_limits<double>::infinity();
  bool tall = true;
  for (const auto& b : r.blocks) {
    if (b.rows() < b.cols()) tall = false;
    Eigen::JacobiSVD<Matrix> svd(b);
    const auto& sv = svd.singularValues();
    sigma_max = std::max(sigma_max, sv(0));
    sigma_min = std::min(sigma_min, b.rows() < b.cols() ? 0.0 : sv(sv.size() - 1));
  }
  ClosedRangeBounds out;
  out.upper = sigma_max * sigma_max;
  out.injective_closed_range = tall && sigma_max > 0.0 && sigma_min > kRankTol * sigma_max;
  out.lower = out.injective_closed_range ? sigma_min * sigma_min : 0.0;
  return out;
}

ClosedRangeBounds surjectivity_bounds(const AdjointableOp& t) { return closed_range_bounds(adjoint(t)); }

AdjointableOp operator_sqrt(const AdjointableOp& s, double tol) {
  if (!s.is_endomorphism()) throw Error(ErrorKind::ShapeMismatch, "operator_sqrt needs an endomorphism");
  if (!is_self_adjoint(s)) throw Error(ErrorKind::NotPositive, "operator_sqrt needs a self-adjoint operator");
  Realization r = realize(s);
  for (auto& b : r.blocks) {
    if (hermitian_eig(b).values(0) < -tol) throw Error(ErrorKind::NotPositive, "operator is not positive");
    b = psd_sqrt(b, tol);
  }
  return AdjointableOp::from_realization(s.domain(), s.codomain(), r);
}

AdjointableOp power(const AdjointableOp& t, int n) {
  if (!t.is_endomorphism()) throw Error(ErrorKind::ShapeMismatch, "power needs an endomorphism");
  AdjointableOp result = AdjointableOp::identity(t.domain());
  for (int step = 0; step < n; ++step) result = compose(t, result);
  return result;
}

}  // namespace csf
