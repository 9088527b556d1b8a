#include <doctest.h>

#include "cstarframe/errors.hpp"
#include "cstarframe/random.hpp"
#include "oracles.hpp"

using namespace csf;

TEST_CASE("space validation") {
  CHECK_THROWS_AS(ModuleSpace(AlgebraSpec({1}), 0), Error);
  const ModuleSpace h(AlgebraSpec({2}), 2);
  CHECK_THROWS_AS(ModuleVector(h, {AlgebraElement::zero(AlgebraSpec({2}))}), Error);
  CHECK_THROWS_AS(ModuleVector(h, {AlgebraElement::zero(AlgebraSpec({2})), AlgebraElement::zero(AlgebraSpec({1}))}),
                  Error);
}

TEST_CASE("inner product basics") {
  const AlgebraSpec spec({2, 1});
  const ModuleSpace h(spec, 2);
  const ModuleVector e0 = ModuleVector::unit(h, 0);
  CHECK(inner_product(e0, e0) == AlgebraElement::identity(spec));
  Rng rng(2);
  const ModuleVector x = random_vector(rng, h);
  CHECK(inner_product(x, ModuleVector::zero(h)) == AlgebraElement::zero(spec));
  CHECK_THROWS_AS(inner_product(x, ModuleVector::zero(ModuleSpace(spec, 3))), Error);
}

TEST_CASE("inner product matches the loop oracle and is conjugate symmetric") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const ModuleSpace h(random_spec(rng, 3, 3), rng.uniform_int(1, 4));
    const ModuleVector x = random_vector(rng, h);
    const ModuleVector y = random_vector(rng, h);
    CHECK(max_abs_diff(inner_product(x, y), oracle::inner_by_loops(x, y)) < 1e-12);
    CHECK(norm(inner_product(x, y) - involution(inner_product(y, x))) < 1e-12);
  }
}

TEST_CASE("module action and left linearity") {
  Rng rng(23);
  const AlgebraSpec spec({2, 3});
  const ModuleSpace h(spec, 3);
  const ModuleVector x = random_vector(rng, h);
  CHECK(module_action(AlgebraElement::identity(spec), x) == x);
  CHECK(module_action(AlgebraElement::zero(spec), x) == ModuleVector::zero(h));
  CHECK_THROWS_AS(module_action(AlgebraElement::identity(AlgebraSpec({2})), x), Error);
  for (int i = 0; i < 50; ++i) {
    const AlgebraElement a = random_element(rng, spec);
    const ModuleVector u = random_vector(rng, h);
    const ModuleVector y = random_vector(rng, h);
    const ModuleVector z = random_vector(rng, h);
    CHECK(max_abs_diff(inner_product(module_action(a, u), y), a * inner_product(u, y)) < 1e-12);
    // <a x + y, z> = a <x, z> + <y, z>
    CHECK(max_abs_diff(inner_product(module_action(a, u) + y, z), a * inner_product(u, z) + inner_product(y, z)) <
          1e-11);
  }
}

TEST_CASE("norms") {
  const AlgebraSpec spec({1});
  CHECK(vector_norm(ModuleVector::zero(ModuleSpace(spec, 2))) == 0.0);
  CHECK(vector_norm(ModuleVector::unit(ModuleSpace(spec, 1), 0)) == doctest::Approx(1.0));
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const ModuleSpace h(random_spec(rng, 3, 2), rng.uniform_int(1, 3));
    const ModuleVector x = random_vector(rng, h);
    const double n = vector_norm(x);
    CHECK(n * n == doctest::Approx(norm(inner_product(x, x))).epsilon(1e-10));
    const AlgebraElement g = inner_product(x, x);
    const AlgebraElement r = a_valued_norm(x);
    CHECK(max_abs_diff(r * r, g) <= 1e-9 * std::max(1.0, norm(g)));
    CHECK(max_abs_diff(r, oracle::sqrt_by_eig(g)) <= 1e-8 * std::max(1.0, norm(r)));
  }
}

TEST_CASE("a-valued norm of the unit vector and of a diagonal vector") {
  const AlgebraSpec spec({1, 1});
  const ModuleSpace h(spec, 1);
  CHECK(max_abs_diff(a_valued_norm(ModuleVector::unit(h, 0)), AlgebraElement::identity(spec)) < 1e-15);
  const ModuleVector x(h, {AlgebraElement::diagonal(spec, {2.0, 3.0})});
  CHECK(max_abs_diff(a_valued_norm(x), AlgebraElement::diagonal(spec, {2.0, 3.0})) < 1e-14);
}

TEST_CASE("positivity of Gram elements and Cauchy-Schwarz surrogate") {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const ModuleSpace h(random_spec(rng, 3, 2), rng.uniform_int(1, 3));
    const ModuleVector x = random_vector(rng, h);
    const ModuleVector y = random_vector(rng, h);
    CHECK(is_positive(inner_product(x, x)));
    CHECK(norm(inner_product(x, y)) <= vector_norm(x) * vector_norm(y) + 1e-9);
  }
  const ModuleSpace h(AlgebraSpec({2}), 2);
  CHECK(norm(inner_product(ModuleVector::zero(h), ModuleVector::zero(h))) < 1e-12);
}

TEST_CASE("direct sums") {
  const AlgebraSpec spec({2, 1});
  const ModuleSpace h1(spec, 2);
  const ModuleSpace h2(spec, 1);
  const DirectSum sum({h1, h2});
  CHECK(sum.total().rank() == 3);
  CHECK(direct_sum({h1, h2}) == sum.total());
  CHECK_THROWS_AS(DirectSum({}), Error);
  CHECK_THROWS_AS(DirectSum({h1, ModuleSpace(AlgebraSpec({3}), 1)}), Error);

  Rng rng(5);
  const ModuleVector x1 = random_vector(rng, h1);
  CHECK(project(sum, 0, embed(sum, 0, x1)) == x1);
  CHECK(project(sum, 1, embed(sum, 0, x1)) == ModuleVector::zero(h2));

  for (int i = 0; i < 50; ++i) {
    const ModuleVector x = random_vector(rng, sum.total());
    const ModuleVector a = project(sum, 0, x);
    const ModuleVector b = project(sum, 1, x);
    CHECK(max_abs_diff(inner_product(x, x), inner_product(a, a) + inner_product(b, b)) < 1e-12);
    CHECK(embed(sum, 0, a) + embed(sum, 1, b) == x);
  }
}
