#include "cstarframe/module.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cstarframe/errors.hpp"

namespace csf {

ModuleSpace::ModuleSpace(AlgebraSpec spec, int rank) : spec_(std::move(spec)), rank_(rank) {
  if (rank_ < 1) throw Error(ErrorKind::InvalidSpec, "module rank must be >= 1");
}

ModuleVector::ModuleVector(ModuleSpace space, std::vector<AlgebraElement> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  if (static_cast<int>(coords_.size()) != space_.rank()) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(space_.rank()) + " coordinates, got " +
                                              std::to_string(coords_.size()));
  }
  for (const auto& c : coords_) {
    if (!(c.spec() == space_.spec())) throw Error(ErrorKind::SpecMismatch, "coordinate from another algebra");
  }
}

ModuleVector ModuleVector::zero(const ModuleSpace& space) {
  return ModuleVector(space, std::vector<AlgebraElement>(space.rank(), AlgebraElement::zero(space.spec())));
}

ModuleVector ModuleVector::unit(const ModuleSpace& space, int i) {
  auto coords = std::vector<AlgebraElement>(space.rank(), AlgebraElement::zero(space.spec()));
  coords.at(i) = AlgebraElement::identity(space.spec());
  return ModuleVector(space, std::move(coords));
}

namespace {

void require_same_space(const ModuleSpace& a, const ModuleSpace& b) {
  if (!(a == b)) throw Error(ErrorKind::SpaceMismatch, "vectors from different module spaces");
}

}  // namespace

ModuleVector& ModuleVector::operator+=(const ModuleVector& other) {
  require_same_space(space_, other.space_);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& other) {
  require_same_space(space_, other.space_);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

ModuleVector& ModuleVector::operator*=(Complex s) {
  for (auto& c : coords_) c *= s;
  return *this;
}

AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y) {
  require_same_space(x.space(), y.space());
  AlgebraElement result = AlgebraElement::zero(x.space().spec());
  for (std::size_t i = 0; i < x.coords().size(); ++i) result += x.coord(i) * involution(y.coord(i));
  return result;
}

ModuleVector module_action(const AlgebraElement& a, const ModuleVector& x) {
  if (!(a.spec() == x.space().spec())) throw Error(ErrorKind::SpecMismatch, "element and vector disagree on algebra");
  std::vector<AlgebraElement> coords;
  coords.reserve(x.coords().size());
  for (const auto& c : x.coords()) coords.push_back(a * c);
  return ModuleVector(x.space(), std::move(coords));
}

double vector_norm(const ModuleVector& x) { return std::sqrt(norm(inner_product(x, x))); }

AlgebraElement a_valued_norm(const ModuleVector& x) {
  const AlgebraElement gram = inner_product(x, x);
  std::vector<Matrix> blocks;
  for (const auto& b : gram.blocks()) blocks.push_back(hermitian_part(b));
  const AlgebraElement g(gram.spec(), std::move(blocks));
  return positive_sqrt(g, std::max(kDefaultPositivityTol, 1e-14 * norm(g)));
}

double max_abs_diff(const ModuleVector& x, const ModuleVector& y) {
  require_same_space(x.space(), y.space());
  double result = 0.0;
  for (std::size_t i = 0; i < x.coords().size(); ++i) result = std::max(result, max_abs_diff(x.coord(i), y.coord(i)));
  return result;
}

namespace {

ModuleSpace sum_space(const std::vector<ModuleSpace>& parts) {
  if (parts.empty()) throw Error(ErrorKind::EmptyFamily, "direct sum of no spaces");
  int rank = 0;
  for (const auto& p : parts) {
    if (!(p.spec() == parts.front().spec())) throw Error(ErrorKind::SpecMismatch, "summands use different algebras");
    rank += p.rank();
  }
  return ModuleSpace(parts.front().spec(), rank);
}

}  // namespace

DirectSum::DirectSum(std::vector<ModuleSpace> parts) : parts_(std::move(parts)), total_(sum_space(parts_)) {
  int offset = 0;
  for (const auto& p : parts_) {
    offsets_.push_back(offset);
    offset += p.rank();
  }
}

ModuleSpace direct_sum(const std::vector<ModuleSpace>& spaces) { return DirectSum(spaces).total(); }

ModuleVector embed(const DirectSum& sum, std::size_t k, const ModuleVector& x) {
  require_same_space(sum.parts().at(k), x.space());
  std::vector<AlgebraElement> coords(sum.total().rank(), AlgebraElement::zero(x.space().spec()));
  std::copy(x.coords().begin(), x.coords().end(), coords.begin() + sum.offset(k));
  return ModuleVector(sum.total(), std::move(coords));
}

ModuleVector project(const DirectSum& sum, std::size_t k, const ModuleVector& x) {
  require_same_space(sum.total(), x.space());
  const auto& part = sum.parts().at(k);
  auto first = x.coords().begin() + sum.offset(k);
  return ModuleVector(part, std::vector<AlgebraElement>(first, first + part.rank()));
}

}  // namespace csf
