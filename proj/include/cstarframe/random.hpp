#pragma once

// Seeded generators for algebra elements, vectors, operators and families.
// Every generator draws from an explicit Rng; nothing reads global state.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "cstarframe/operator.hpp"

namespace csf {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, tags...); used to give every task of a
  /// batch its own generator regardless of scheduling.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

Matrix random_matrix(Rng& rng, int rows, int cols);

/// Block sizes drawn from [1, max_block], 1..max_blocks blocks.
AlgebraSpec random_spec(Rng& rng, int max_block, int max_blocks);
/// 1..max_blocks blocks, all of size 1.
AlgebraSpec random_commutative_spec(Rng& rng, int max_blocks);

AlgebraElement random_element(Rng& rng, const AlgebraSpec& spec);
/// b b^* for a random b.
AlgebraElement random_positive(Rng& rng, const AlgebraSpec& spec);
ModuleVector random_vector(Rng& rng, const ModuleSpace& space);
/// Random vector rescaled to vector_norm 1 (the zero draw cannot happen in
/// practice; it is returned unscaled).
ModuleVector random_unit_vector(Rng& rng, const ModuleSpace& space);

AdjointableOp random_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain);
/// Random operator rescaled to op_norm 1.
AdjointableOp random_unit_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain);

/// Injective operator with closed range whose singular values all lie in
/// [scale / 2, 3 scale / 2]: scale times a partial isometry onto the first
/// rank(domain) coordinates plus a perturbation of norm scale / 2.
/// Requires codomain.rank() >= domain.rank().
AdjointableOp random_injective_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain,
                                        double scale = 1.0);

/// Surjective endomorphism (the adjoint of an injective one is onto; for
/// endomorphisms both coincide with invertibility).
AdjointableOp random_invertible_operator(Rng& rng, const ModuleSpace& space, double scale = 1.0);

/// I - P where P projects onto one random row direction of one algebra
/// block; a self-adjoint projection with a nontrivial kernel.
AdjointableOp random_corank_one_projection(Rng& rng, const ModuleSpace& space);

/// R o (I - P) with R random and I - P as above, so the result has a kernel.
AdjointableOp random_rank_deficient_operator(Rng& rng, const ModuleSpace& domain, const ModuleSpace& codomain);

}  // namespace csf
