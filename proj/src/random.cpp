#include "cstarframe/random.hpp"

#include <array>

#include "cstarframe/errors.hpp"

namespace csf {

Rng Rng::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (std::uint64_t t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> state{};
  seq.generate(state.begin(), state.end());
  return Rng((static_cast<std::uint64_t>(state[0]) << 32) | state[1]);
}

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.complex_normal();
  }
  return m;
}

AlgebraSpec random_spec(Rng& rng, int max_block, int max_blocks) {
  std::vector<int> sizes(rng.uniform_int(1, max_blocks));
  for (auto& n : sizes) n = rng.uniform_int(1, max_block);
  return AlgebraSpec(std::move(sizes));
}

AlgebraSpec random_commutative_spec(Rng& rng, int max_blocks) {
  return AlgebraSpec(std::vector<int>(rng.uniform_int(1, max_blocks), 1));
}

AlgebraElement random_element(Rng& rng, const AlgebraSpec& spec) {
  std::vector<Matrix> blocks;
  for (int n : spec.block_sizes()) blocks.push_back(random_matrix(rng, n, n));
  return AlgebraElement(spec, std::move(blocks));
}

AlgebraElement random_positive(Rng& rng, const AlgebraSpec& spec) {
  const AlgebraElement b = random_element(rng, spec);
  return b * involution(b);
}

ModuleVector random_vector(Rng& rng, const ModuleSpace& space) {
  std::vector<AlgebraElement> coords;
  for (int i = 0; i < space.rank(); ++i) coords.push_back(random_element(rng, space.spec()));
  return ModuleVector(space, std::move(coords));
}

ModuleVector random_unit_vector(Rng& rng, const ModuleSpace& space) {
  ModuleVector x = random_vector(rng, space);
  const double n = vector_norm(x);
  return n > 0.0 ? (1.0 / n) * x : x;
}

AdjointableOp random_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain) {
  std::vector<AlgebraElement> entries;
  for (int e = 0; e < domain.rank() * codomain.rank(); ++e) entries.push_back(random_element(rng, domain.spec()));
  return AdjointableOp(domain, codomain, std::move(entries));
}

AdjointableOp random_unit_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain) {
  AdjointableOp t = random_operator(rng, domain, codomain);
  const double n = op_norm(t);
  return n > 0.0 ? scale(t, 1.0 / n) : t;
}

AdjointableOp random_injective_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain,
                                        double scale_factor) {
  if (codomain.rank() < domain.rank()) {
    throw Error(ErrorKind::ShapeMismatch, "an injective operator needs rank(codomain) >= rank(domain)");
  }
  std::vector<AlgebraElement> entries;
  for (int i = 0; i < domain.rank(); ++i) {
    for (int k = 0; k < codomain.rank(); ++k) {
      entries.push_back(i == k ? AlgebraElement::identity(domain.spec()) : AlgebraElement::zero(domain.spec()));
    }
  }
  const AdjointableOp isometry(domain, codomain, std::move(entries));
  const AdjointableOp noise = scale(random_unit_operator(rng, domain, codomain), 0.5);
  return scale(add(isometry, noise), scale_factor);
}

AdjointableOp random_invertible_operator(Rng& rng, const ModuleSpace& space, double scale_factor) {
  return random_injective_operator(rng, space, space, scale_factor);
}

AdjointableOp random_corank_one_projection(Rng& rng, const ModuleSpace& space) {
  const AlgebraSpec& spec = space.spec();
  const auto target = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(spec.num_blocks()) - 1));
  Realization r;
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const int dim = spec.block_size(j) * space.rank();
    Matrix b = Matrix::Identity(dim, dim);
    if (j == target) {
      Vector u = random_matrix(rng, dim, 1);
      u.normalize();
      b -= u * u.adjoint();
    }
    r.blocks.push_back(std::move(b));
  }
  return AdjointableOp::from_realization(space, space, r);
}

AdjointableOp random_rank_deficient_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain) {
  const AdjointableOp q = random_corank_one_projection(rng, domain);
  return compose(random_operator(rng, domain, codomain), q);
}

}  // namespace csf
