#include <doctest.h>

#include <cmath>

#include "cstarframe/errors.hpp"
#include "cstarframe/random.hpp"
#include "oracles.hpp"

using namespace csf;

namespace {

OperatorFamily random_family(Rng& rng, const AlgebraSpec& spec, int members, bool common = true) {
  const ModuleSpace h(spec, rng.uniform_int(1, 3));
  const ModuleSpace g(spec, rng.uniform_int(1, 3));
  std::vector<AdjointableOp> ms;
  ms.push_back(random_injective_operator(rng, h, ModuleSpace(spec, h.rank())));
  for (int i = 1; i < members; ++i) {
    ms.push_back(random_operator(rng, h, common ? ModuleSpace(spec, h.rank()) : g));
  }
  return OperatorFamily(h, ms);
}

std::vector<AdjointableOp> coordinate_projections(const ModuleSpace& h) {
  const ModuleSpace a1(h.spec(), 1);
  std::vector<AdjointableOp> out;
  for (int i = 0; i < h.rank(); ++i) {
    std::vector<AlgebraElement> e;
    for (int r = 0; r < h.rank(); ++r) {
      e.push_back(r == i ? AlgebraElement::identity(h.spec()) : AlgebraElement::zero(h.spec()));
    }
    out.emplace_back(h, a1, e);
  }
  return out;
}

VectorFamily standard_basis(const ModuleSpace& h) {
  std::vector<ModuleVector> xs;
  for (int i = 0; i < h.rank(); ++i) xs.push_back(ModuleVector::unit(h, i));
  return VectorFamily(h, xs);
}

CheckOptions opts(std::uint64_t seed, std::size_t samples = 100) {
  CheckOptions o;
  o.seed = seed;
  o.samples = samples;
  return o;
}

}  // namespace

TEST_CASE("g-frame: identity and coordinate projections are Parseval") {
  const ModuleSpace h(AlgebraSpec({2, 1}), 2);
  const FrameReport id = check_g_frame(OperatorFamily(h, {AdjointableOp::identity(h)}));
  CHECK(id.pass);
  CHECK(id.scalar_bounds()->lower == doctest::Approx(1.0));
  CHECK(id.scalar_bounds()->upper == doctest::Approx(1.0));
  CHECK(id.tight);
  CHECK(id.parseval);
  const FrameReport pr = check_g_frame(OperatorFamily(h, coordinate_projections(h)));
  CHECK(pr.parseval);
}

TEST_CASE("g-frame: eigen bounds are never beaten by Rayleigh sampling") {
  Rng rng(100);
  for (int i = 0; i < 40; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), rng.uniform_int(1, 4), false);
    const FrameReport r = check_g_frame(f);
    REQUIRE(r.pass);
    const auto b = *r.scalar_bounds();
    const oracle::Extremes e = oracle::rayleigh_sampling(f, rng, 10000 / static_cast<int>(f.domain().spec().num_blocks()));
    CHECK(e.min >= b.lower - 1e-10 * b.upper);
    CHECK(e.max <= b.upper + 1e-10 * b.upper);
    // Sampling comes within a modest slack of the eigenvalue extremes.
    CHECK(e.min <= b.lower + 0.5 * (b.upper - b.lower) + 1e-12);
  }
}

TEST_CASE("g-frame: failures carry a witness that violates the lower bound") {
  Rng rng(101);
  for (int i = 0; i < 30; ++i) {
    const AlgebraSpec spec = random_spec(rng, 3, 2);
    const ModuleSpace h(spec, rng.uniform_int(1, 3));
    const AdjointableOp p = random_corank_one_projection(rng, h);
    std::vector<AdjointableOp> ms;
    for (int m = 0; m < 3; ++m) ms.push_back(compose(random_operator(rng, h, h), p));
    const OperatorFamily f(h, ms);
    const FrameReport r = check_g_frame(f);
    REQUIRE_FALSE(r.pass);
    REQUIRE(r.witness);
    REQUIRE(r.witness->vector);
    const ModuleVector& x = *r.witness->vector;
    CHECK(vector_norm(x) == doctest::Approx(1.0));
    AlgebraElement sum = AlgebraElement::zero(spec);
    for (const auto& t : ms) sum += inner_product(apply(t, x), apply(t, x));
    CHECK(norm(sum) <= 1e-9 + 1e-12);
  }
}

TEST_CASE("g-frame: scaling covariance and duplication") {
  Rng rng(102);
  for (int i = 0; i < 30; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), 3, false);
    const auto b = *check_g_frame(f).scalar_bounds();
    const double t = rng.uniform(0.2, 3.0);
    std::vector<AdjointableOp> scaled;
    std::vector<AdjointableOp> doubled = f.members();
    for (const auto& m : f.members()) {
      scaled.push_back(scale(m, t));
      doubled.push_back(m);
    }
    const auto bs = *check_g_frame(OperatorFamily(f.domain(), scaled)).scalar_bounds();
    CHECK(bs.lower == doctest::Approx(t * t * b.lower).epsilon(1e-9));
    CHECK(bs.upper == doctest::Approx(t * t * b.upper).epsilon(1e-9));
    const auto bd = *check_g_frame(OperatorFamily(f.domain(), doubled)).scalar_bounds();
    CHECK(bd.lower == doctest::Approx(2 * b.lower).epsilon(1e-9));
    CHECK(bd.upper == doctest::Approx(2 * b.upper).epsilon(1e-9));
  }
}

TEST_CASE("g-frame: bounds are optimal") {
  Rng rng(103);
  for (int i = 0; i < 20; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), 3, false);
    const FrameReport r = check_g_frame(f);
    const auto b = *r.scalar_bounds();
    if (b.upper - b.lower < 1e-3 * b.upper) continue;
    // Extreme eigenvectors of the realized frame operator violate the
    // perturbed constants.
    const Realization s = realize(frame_operator(f));
    double worst_low = 1e300;
    double worst_high = -1e300;
    for (std::size_t j = 0; j < s.blocks.size(); ++j) {
      const auto eig = hermitian_eig(s.blocks[j]);
      for (int side = 0; side < 2; ++side) {
        const Vector v = side == 0 ? Vector(eig.vectors.col(0)) : Vector(eig.vectors.col(eig.vectors.cols() - 1));
        const ModuleVector x = vector_from_row(f.domain(), j, v);
        AlgebraElement sum = AlgebraElement::zero(f.domain().spec());
        for (const auto& t : f.members()) sum += inner_product(apply(t, x), apply(t, x));
        const AlgebraElement g = inner_product(x, x);
        worst_low = std::min(worst_low, min_eigenvalue(sum - 1.01 * b.lower * g));
        worst_high = std::max(worst_high, -min_eigenvalue(0.99 * b.upper * g - sum));
      }
    }
    CHECK(worst_low < 0.0);
    CHECK(worst_high > 0.0);
  }
}

TEST_CASE("vector frames") {
  const ModuleSpace h(AlgebraSpec({1}), 2);
  const FrameReport r = check_vector_frame(standard_basis(h));
  CHECK(r.parseval);
  CHECK(r.kind == FrameKind::VectorFrame);

  Rng rng(104);
  const ModuleVector x = random_vector(rng, h);
  const ModuleVector y = random_vector(rng, h);
  const auto single = *check_vector_frame(VectorFamily(h, {x, y})).scalar_bounds();
  const auto dup = *check_vector_frame(VectorFamily(h, {x, y, x, y})).scalar_bounds();
  CHECK(dup.lower == doctest::Approx(2 * single.lower).epsilon(1e-12));
  CHECK(dup.upper == doctest::Approx(2 * single.upper).epsilon(1e-12));

  for (int i = 0; i < 30; ++i) {
    const ModuleSpace hs(random_spec(rng, 3, 2), rng.uniform_int(1, 3));
    std::vector<ModuleVector> xs;
    for (int m = 0; m < 4; ++m) xs.push_back(random_vector(rng, hs));
    const VectorFamily v(hs, xs);
    const OperatorFamily f = to_functionals(v);
    const ModuleVector z = random_vector(rng, hs);
    AlgebraElement via_ops = AlgebraElement::zero(hs.spec());
    for (const auto& t : f.members()) via_ops += inner_product(apply(t, z), apply(t, z));
    const AlgebraElement direct = oracle::vector_frame_sum(v, z);
    CHECK(max_abs_diff(via_ops, direct) <= 1e-11 * std::max(1.0, norm(direct)));
  }
}

TEST_CASE("k-g-frame: identity K, zero K and the family {K*}") {
  Rng rng(105);
  for (int i = 0; i < 20; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), 3, false);
    const auto g = *check_g_frame(f).scalar_bounds();
    const FrameReport r = check_k_g_frame(f, AdjointableOp::identity(f.domain()));
    REQUIRE(r.pass);
    CHECK(r.scalar_bounds()->lower <= g.lower * (1 + 1e-12));
    CHECK(r.scalar_bounds()->lower >= g.lower * (1 - kBisectionWidth));
    CHECK(r.scalar_bounds()->upper == doctest::Approx(g.upper));
  }
  const ModuleSpace h(AlgebraSpec({2}), 2);
  const OperatorFamily f(h, {AdjointableOp::identity(h)});
  const FrameReport zero = check_k_g_frame(f, AdjointableOp::zero(h, h));
  CHECK_FALSE(zero.pass);
  CHECK(zero.witness);
  CHECK(zero.note == "degenerate K");

  for (int i = 0; i < 20; ++i) {
    const AdjointableOp k = random_operator(rng, h, h);
    const FrameReport r = check_k_g_frame(OperatorFamily(h, {adjoint(k)}), k);
    REQUIRE(r.pass);
    CHECK(r.tight);
    CHECK(r.scalar_bounds()->lower == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(check_k_g_frame(f, AdjointableOp::identity(ModuleSpace(AlgebraSpec({2}), 3))), Error);
}

TEST_CASE("k-g-frame: bisection matches the generalized eigenvalue oracle") {
  Rng rng(106);
  for (int i = 0; i < 40; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), 3, false);
    const AdjointableOp k = random_invertible_operator(rng, f.domain(), rng.uniform(0.3, 3.0));
    const FrameReport r = check_k_g_frame(f, k);
    REQUIRE(r.pass);
    const double expected = oracle::generalized_lower(frame_operator(f), compose(k, adjoint(k)));
    CHECK(r.scalar_bounds()->lower <= expected * (1 + 1e-9));
    CHECK(r.scalar_bounds()->lower >= expected * (1 - 2 * kBisectionWidth));
  }
}

TEST_CASE("k-g-frame: singular K measures only its range") {
  Rng rng(107);
  for (int i = 0; i < 20; ++i) {
    const AlgebraSpec spec = random_spec(rng, 3, 2);
    const ModuleSpace h(spec, rng.uniform_int(1, 3));
    const AdjointableOp p = random_corank_one_projection(rng, h);
    std::vector<AdjointableOp> ms{compose(random_operator(rng, h, h), p), compose(random_operator(rng, h, h), p)};
    const OperatorFamily f(h, ms);
    CHECK_FALSE(check_g_frame(f).pass);
    // K = S^(1/2) R has range inside range(S).
    const AdjointableOp k = compose(operator_sqrt(frame_operator(f)), random_unit_operator(rng, h, h));
    const FrameReport r = check_k_g_frame(f, k);
    CHECK(r.pass);
    CHECK(r.scalar_bounds()->lower >= 1.0 - 1e-6);
    // A generic invertible K does not fit into the range.
    const FrameReport bad = check_k_g_frame(f, random_invertible_operator(rng, h));
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.witness);
    CHECK(bad.witness->vector);
  }
}

TEST_CASE("star frames over commutative algebras") {
  const AlgebraSpec c1({1});
  const FrameReport basis = check_star_frame_commutative(standard_basis(ModuleSpace(c1, 3)));
  REQUIRE(basis.pass);
  CHECK(max_abs_diff(basis.algebra_bounds()->lower, AlgebraElement::identity(c1)) < 1e-12);
  CHECK(max_abs_diff(basis.algebra_bounds()->upper, AlgebraElement::identity(c1)) < 1e-12);
  CHECK(basis.parseval);

  // Scaling the basis of (C^2)^2 by diag(1, 2) multiplies coordinate 2 by 4.
  const AlgebraSpec c2({1, 1});
  const ModuleSpace h(c2, 2);
  const AlgebraElement s = AlgebraElement::diagonal(c2, {1.0, 2.0});
  const VectorFamily scaled(h, {module_action(s, ModuleVector::unit(h, 0)), module_action(s, ModuleVector::unit(h, 1))});
  const FrameReport sr = check_star_frame_commutative(scaled);
  REQUIRE(sr.pass);
  const auto& b = *sr.algebra_bounds();
  CHECK(b.lower_product.block(0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(b.lower_product.block(1)(0, 0).real() == doctest::Approx(4.0));
  CHECK(b.upper_product.block(1)(0, 0).real() == doctest::Approx(4.0));

  CHECK_THROWS_AS(check_star_frame_commutative(standard_basis(ModuleSpace(AlgebraSpec({2}), 2))), Error);
}

TEST_CASE("star frames match the per-coordinate oracle and satisfy the sandwich") {
  Rng rng(108);
  for (int i = 0; i < 40; ++i) {
    const ModuleSpace h(random_commutative_spec(rng, 3), rng.uniform_int(1, 3));
    std::vector<ModuleVector> xs;
    for (int m = 0; m < h.rank() + 2; ++m) xs.push_back(random_vector(rng, h));
    const VectorFamily v(h, xs);
    const FrameReport r = check_star_frame_commutative(v, opts(i));
    REQUIRE(r.pass);
    const auto& b = *r.algebra_bounds();
    CHECK(b.strictly_positive);
    const auto expected = oracle::per_coordinate_bounds(v);
    for (std::size_t j = 0; j < expected.size(); ++j) {
      CHECK(b.lower_product.block(j)(0, 0).real() == doctest::Approx(expected[j].min).epsilon(1e-9));
      CHECK(b.upper_product.block(j)(0, 0).real() == doctest::Approx(expected[j].max).epsilon(1e-9));
    }
    CHECK(max_abs_diff(b.lower * involution(b.lower), b.lower_product) < 1e-10);
    CHECK(max_abs_diff(b.upper * involution(b.upper), b.upper_product) < 1e-10);

    for (int sample = 0; sample < 200; ++sample) {
      const ModuleVector x = random_vector(rng, h);
      const AlgebraElement mid = oracle::vector_frame_sum(v, x);
      const AlgebraElement g = inner_product(x, x);
      const double scale_tol = 1e-9 * std::max(1.0, norm(mid));
      CHECK(is_positive(mid - b.lower * g * involution(b.lower), scale_tol));
      CHECK(is_positive(b.upper * g * involution(b.upper) - mid, scale_tol));
    }
    CHECK(check_star_sampled(v, std::nullopt, b.lower, b.upper, opts(i, 200)).pass);
  }
}

TEST_CASE("star-g and star-k-g reductions") {
  Rng rng(109);
  for (int i = 0; i < 20; ++i) {
    const OperatorFamily f = random_family(rng, random_commutative_spec(rng, 3), 3, false);
    const FrameReport g = check_star_g_frame_commutative(f);
    const FrameReport kg = check_star_k_g_frame_commutative(f, AdjointableOp::identity(f.domain()));
    REQUIRE(g.pass);
    REQUIRE(kg.pass);
    const auto& bg = *g.algebra_bounds();
    const auto& bk = *kg.algebra_bounds();
    for (std::size_t j = 0; j < f.domain().spec().num_blocks(); ++j) {
      const double lg = bg.lower_product.block(j)(0, 0).real();
      const double lk = bk.lower_product.block(j)(0, 0).real();
      CHECK(lk <= lg * (1 + 1e-12));
      CHECK(lk >= lg * (1 - kBisectionWidth));
    }
  }
  for (int i = 0; i < 20; ++i) {
    const OperatorFamily f = random_family(rng, AlgebraSpec({1}), 3, false);
    const AdjointableOp k = random_invertible_operator(rng, f.domain());
    const auto sg = *check_g_frame(f).scalar_bounds();
    const FrameReport gr = check_star_g_frame_commutative(f);
    const auto& ag = *gr.algebra_bounds();
    CHECK(ag.lower_product.block(0)(0, 0).real() == doctest::Approx(sg.lower).epsilon(1e-12));
    CHECK(ag.upper_product.block(0)(0, 0).real() == doctest::Approx(sg.upper).epsilon(1e-12));
    const auto sk = *check_k_g_frame(f, k).scalar_bounds();
    const FrameReport kr = check_star_k_g_frame_commutative(f, k);
    const auto& ak = *kr.algebra_bounds();
    CHECK(ak.lower_product.block(0)(0, 0).real() == doctest::Approx(sk.lower).epsilon(1e-12));
  }
}

TEST_CASE("star-k frames against the per-coordinate generalized oracle") {
  Rng rng(110);
  for (int i = 0; i < 20; ++i) {
    const ModuleSpace h(random_commutative_spec(rng, 3), rng.uniform_int(1, 3));
    std::vector<ModuleVector> xs;
    for (int m = 0; m < h.rank() + 1; ++m) xs.push_back(random_vector(rng, h));
    const VectorFamily v(h, xs);
    const AdjointableOp k = random_invertible_operator(rng, h);
    const FrameReport r = check_star_k_frame_commutative(v, k, opts(i));
    REQUIRE(r.pass);
    const Realization s = realize(frame_operator(to_functionals(v)));
    const Realization p = realize(compose(k, adjoint(k)));
    for (std::size_t j = 0; j < s.blocks.size(); ++j) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(s.blocks[j], p.blocks[j]);
      const double expected = ges.eigenvalues()(0);
      const double got = r.algebra_bounds()->lower_product.block(j)(0, 0).real();
      CHECK(got <= expected * (1 + 1e-9));
      CHECK(got >= expected * (1 - 2 * kBisectionWidth));
    }
  }
}

TEST_CASE("star sampling falsifies bad bounds") {
  const AlgebraSpec spec({1, 1});
  const ModuleSpace h(spec, 2);
  const VectorFamily basis = standard_basis(h);
  const FrameReport tight = check_star_frame_commutative(basis);
  const AlgebraElement& b = tight.algebra_bounds()->upper;
  const FrameReport ok = check_star_sampled(basis, std::nullopt, tight.algebra_bounds()->lower, b, opts(1));
  CHECK(ok.pass);
  CHECK_FALSE(ok.certified);

  const FrameReport half = check_star_sampled(basis, std::nullopt, tight.algebra_bounds()->lower, 0.5 * b, opts(1));
  CHECK_FALSE(half.pass);
  REQUIRE(half.witness);
  CHECK(half.witness->side == Side::Upper);
  CHECK(half.witness->vector);

  const VectorFamily zero(h, {ModuleVector::zero(h)});
  const FrameReport z = check_star_sampled(zero, std::nullopt, AlgebraElement::identity(spec),
                                           AlgebraElement::identity(spec), opts(2));
  CHECK_FALSE(z.pass);
  CHECK(z.witness->side == Side::Lower);

  // Non-commutative algebras can only be sampled.
  Rng rng(111);
  const ModuleSpace nc(AlgebraSpec({2}), 2);
  const FrameReport ncr = check_star_sampled(standard_basis(nc), std::nullopt, AlgebraElement::identity(nc.spec()),
                                             AlgebraElement::identity(nc.spec()), opts(3));
  CHECK(ncr.pass);
  CHECK_FALSE(ncr.certified);
}

TEST_CASE("end frames") {
  const ModuleSpace h(AlgebraSpec({2, 1}), 2);
  const OperatorFamily id(h, {AdjointableOp::identity(h)});
  const FrameReport r = check_end_frame(id, opts(5));
  CHECK(r.pass);
  CHECK(r.parseval);
  REQUIRE(r.cross_check);
  CHECK(r.cross_check->agrees);
  Rng rng(112);
  for (int i = 0; i < 20; ++i) {
    const AdjointableOp t = random_operator(rng, h, h);
    CHECK(max_abs_diff(operator_frame_sum(id, t), operator_inner(t, t)) < 1e-12);
  }
  std::vector<AdjointableOp> mixed{AdjointableOp::identity(h), AdjointableOp::zero(h, ModuleSpace(h.spec(), 1))};
  CHECK_THROWS_AS(check_end_frame(OperatorFamily(h, mixed)), Error);
}

TEST_CASE("end frames: injective members satisfy the printed sandwich on sampled operators") {
  Rng rng(113);
  for (int i = 0; i < 10; ++i) {
    const ModuleSpace h(random_spec(rng, 3, 2), rng.uniform_int(1, 3));
    const ModuleSpace g(h.spec(), h.rank());
    std::vector<AdjointableOp> ms;
    double lower = 0.0;
    double upper = 0.0;
    for (int m = 0; m < 3; ++m) {
      ms.push_back(random_injective_operator(rng, h, g, rng.uniform(0.5, 2.0)));
      const ClosedRangeBounds cr = closed_range_bounds(ms.back());
      lower += cr.lower;
      upper += cr.upper;
    }
    const OperatorFamily f(h, ms);
    for (int s = 0; s < 50; ++s) {
      const AdjointableOp t = random_unit_operator(rng, h, g);
      const AdjointableOp mid = operator_frame_sum(f, t);
      const AdjointableOp tt = operator_inner(t, t);
      CHECK(is_psd_order(scale(tt, lower), mid, 1e-9));
      CHECK(is_psd_order(mid, scale(tt, upper), 1e-9 * upper));
    }
  }
}

TEST_CASE("end frames: decaying members stay below the truncated series") {
  Rng rng(114);
  const ModuleSpace h(AlgebraSpec({2}), 2);
  std::vector<AdjointableOp> ms;
  double series = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const AdjointableOp t = random_injective_operator(rng, h, h);
    ms.push_back(scale(t, 1.0 / (i * op_norm(t))));
    series += 1.0 / (static_cast<double>(i) * i);
  }
  const FrameReport r = check_end_frame(OperatorFamily(h, ms), opts(6));
  CHECK(r.pass);
  CHECK(r.scalar_bounds()->upper <= series + 1e-9);
}

TEST_CASE("end frames: both routes agree, including degenerate families") {
  Rng rng(115);
  int failures = 0;
  for (int i = 0; i < 40; ++i) {
    const AlgebraSpec spec = random_spec(rng, 3, 2);
    const ModuleSpace h(spec, rng.uniform_int(1, 3));
    const ModuleSpace g(spec, rng.uniform_int(1, 3));
    std::vector<AdjointableOp> ms;
    for (int m = 0; m < rng.uniform_int(1, 3); ++m) ms.push_back(random_operator(rng, h, g));
    if (i % 4 == 0) {
      const AdjointableOp p = random_corank_one_projection(rng, h);
      for (auto& t : ms) t = compose(t, p);
    }
    const OperatorFamily f(h, ms);
    const FrameReport r = check_end_frame(f, opts(i));
    REQUIRE(r.cross_check);
    CHECK(r.cross_check->agrees);
    CHECK(r.cross_check->bounds_hold);
    CHECK(r.pass == check_g_frame(f).pass);
    if (!r.pass) {
      ++failures;
      CHECK(r.witness);
    }
  }
  CHECK(failures > 0);
}

TEST_CASE("k-end frames") {
  Rng rng(116);
  for (int i = 0; i < 15; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), 3);
    // Parseval K-frame: <TK, TK> = sum <T, T_i><T_i, T> for every T.
    const AdjointableOp k = operator_sqrt(frame_operator(f));
    const FrameReport r = check_k_end_frame(f, k, opts(i));
    CHECK(r.pass);
    CHECK(r.tight);
    CHECK(r.scalar_bounds()->lower == doctest::Approx(1.0).epsilon(1e-8));
    const ModuleSpace cod = *f.common_codomain();
    for (int s = 0; s < 20; ++s) {
      const AdjointableOp t = random_unit_operator(rng, f.domain(), cod);
      const AdjointableOp tk = compose(t, k);
      CHECK(max_abs_diff(operator_inner(tk, tk), operator_frame_sum(f, t)) < 1e-9);
    }
    // Surjective K: a K-frame is an end-frame.
    const AdjointableOp ks = random_invertible_operator(rng, f.domain());
    const FrameReport kr = check_k_end_frame(f, ks, opts(i));
    if (kr.pass) CHECK(check_end_frame(f, opts(i)).pass);
    // K = identity coincides with the end-frame check.
    const FrameReport ki = check_k_end_frame(f, AdjointableOp::identity(f.domain()), opts(i));
    const FrameReport e = check_end_frame(f, opts(i));
    CHECK(ki.pass == e.pass);
    CHECK(ki.scalar_bounds()->lower >= e.scalar_bounds()->lower * (1 - kBisectionWidth));
    CHECK(ki.scalar_bounds()->upper == doctest::Approx(e.scalar_bounds()->upper));
  }
}

TEST_CASE("generalized end frames") {
  Rng rng(117);
  for (int i = 0; i < 15; ++i) {
    const OperatorFamily f1 = random_family(rng, AlgebraSpec({1}), 3);
    const FrameReport g = check_generalized_end_frame(f1, opts(i));
    const FrameReport e = check_end_frame(f1, opts(i));
    CHECK(g.pass == e.pass);
    CHECK(g.algebra_bounds()->lower_product.block(0)(0, 0).real() ==
          doctest::Approx(e.scalar_bounds()->lower).epsilon(1e-12));

    const OperatorFamily f = random_family(rng, random_commutative_spec(rng, 3), 3);
    const FrameReport r = check_generalized_end_frame(f, opts(i, 100));
    REQUIRE(r.pass);
    CHECK(r.cross_check->bounds_hold);
    CHECK(r.cross_check->samples >= 100);

    // A shrunk lower bound is still valid on the operator side.
    const AlgebraElement shrunk = 0.5 * r.algebra_bounds()->lower_product;
    const ModuleSpace cod = *f.common_codomain();
    for (int s = 0; s < 100; ++s) {
      const AdjointableOp t = random_unit_operator(rng, f.domain(), cod);
      CHECK(is_psd_order(left_action(shrunk, operator_inner(t, t)), operator_frame_sum(f, t), 1e-9));
    }

    const AdjointableOp k = random_invertible_operator(rng, f.domain());
    const FrameReport rk = check_generalized_k_end_frame(f, k, opts(i, 100));
    CHECK(rk.pass == check_star_k_g_frame_commutative(f, k).pass);
    CHECK(rk.cross_check->agrees);
  }
  const ModuleSpace nc(AlgebraSpec({2}), 1);
  CHECK_THROWS_AS(check_generalized_end_frame(OperatorFamily(nc, {AdjointableOp::identity(nc)})), Error);
}

TEST_CASE("pencil extremes eliminate the kernel of N") {
  Matrix m(2, 2);
  m << 2.0, 1.0, 1.0, 3.0;
  Matrix n = Matrix::Zero(2, 2);
  n(0, 0) = 1.0;
  // Over v = (1, t): (2 + 2t + 3t^2) / 1, minimised at t = -1/3 to 5/3.
  const PencilExtremes e = pencil_extremes(m, n);
  CHECK_FALSE(e.empty);
  CHECK(e.min == doctest::Approx(5.0 / 3.0));
  CHECK(std::isinf(e.max));
  CHECK(pencil_extremes(m, Matrix::Zero(2, 2)).empty);
}

TEST_CASE("K-bounds for a family that vanishes on a coordinate carry a witness") {
  const AlgebraSpec spec({1, 1});
  const ModuleSpace h(spec, 2);
  // Zero on the second coordinate of the algebra.
  const AlgebraElement e0 = AlgebraElement::diagonal(spec, {1.0, 0.0});
  const AdjointableOp t(h, h, {e0, AlgebraElement::zero(spec), AlgebraElement::zero(spec), e0});
  const OperatorFamily f(h, {t});
  const AdjointableOp id = AdjointableOp::identity(h);
  const FrameReport r = check_star_k_g_frame_commutative(f, id);
  CHECK_FALSE(r.pass);
  REQUIRE(r.witness);
  REQUIRE(r.witness->vector);
  CHECK(norm(inner_product(apply(t, *r.witness->vector), apply(t, *r.witness->vector))) < 1e-12);

  const FrameReport z = check_k_g_frame(OperatorFamily(h, {AdjointableOp::zero(h, h)}), id);
  CHECK_FALSE(z.pass);
  REQUIRE(z.witness);
  CHECK(z.witness->vector);
  CHECK(check_generalized_k_end_frame(f, id, opts(1)).cross_check->agrees);
}

TEST_CASE("sampled operator route tolerates roundoff on large, ill-conditioned K") {
  Rng rng(118);
  for (int i = 0; i < 10; ++i) {
    const OperatorFamily f = random_family(rng, random_spec(rng, 3, 2), 3);
    const AdjointableOp k = power(random_operator(rng, f.domain(), f.domain()), 4);
    std::vector<AdjointableOp> ms;
    for (const auto& t : f.members()) ms.push_back(compose(t, adjoint(k)));
    const FrameReport r = check_k_end_frame(OperatorFamily(f.domain(), ms), k, opts(i));
    CHECK(r.pass);
    CHECK(r.cross_check->bounds_hold);
  }
}
