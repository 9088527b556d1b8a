#pragma once

// Independent reference computations used as test oracles. They deliberately
// avoid the library's own eigen/sqrt helpers and use other algorithms
// (closed forms, Schur-based matrix functions, divide-and-conquer SVD,
// generalized eigensolvers, brute-force sampling).

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cstarframe/frame.hpp"
#include "cstarframe/random.hpp"

namespace oracle {

using csf::Complex;
using csf::Matrix;

/// Largest eigenvalue of the real symmetric [[a, b], [b, d]] from its
/// characteristic polynomial.
inline double largest_root_sym2(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  return mean + std::sqrt(half * half + b * b);
}

inline csf::AlgebraElement sqrt_by_eig(const csf::AlgebraElement& p) {
  std::vector<Matrix> blocks;
  for (const auto& b : p.blocks()) {
    const Matrix h = 0.5 * (b + b.adjoint());
    blocks.push_back(h.sqrt());
  }
  return csf::AlgebraElement(p.spec(), std::move(blocks));
}

inline double largest_singular_value(const csf::AlgebraElement& a) {
  double out = 0.0;
  for (const auto& b : a.blocks()) {
    Eigen::BDCSVD<Matrix> svd(b);
    out = std::max(out, svd.singularValues()(0));
  }
  return out;
}

/// (T x)_k = sum_i x_i M_ik, evaluated with explicit loops over blocks.
inline csf::ModuleVector apply_by_loops(const csf::AdjointableOp& t, const csf::ModuleVector& x) {
  const auto& spec = t.domain().spec();
  std::vector<csf::AlgebraElement> out;
  for (int k = 0; k < t.codomain().rank(); ++k) {
    std::vector<Matrix> blocks;
    for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
      const int n = spec.block_size(j);
      Matrix acc = Matrix::Zero(n, n);
      for (int i = 0; i < t.domain().rank(); ++i) {
        const Matrix& xi = x.coord(i).block(j);
        const Matrix& m = t.entry(i, k).block(j);
        for (int r = 0; r < n; ++r) {
          for (int c = 0; c < n; ++c) {
            for (int q = 0; q < n; ++q) acc(r, c) += xi(r, q) * m(q, c);
          }
        }
      }
      blocks.push_back(acc);
    }
    out.emplace_back(spec, std::move(blocks));
  }
  return csf::ModuleVector(t.codomain(), std::move(out));
}

/// <x, y> = sum_i x_i y_i^* with explicit loops.
inline csf::AlgebraElement inner_by_loops(const csf::ModuleVector& x, const csf::ModuleVector& y) {
  const auto& spec = x.space().spec();
  std::vector<Matrix> blocks;
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    const int n = spec.block_size(j);
    Matrix acc = Matrix::Zero(n, n);
    for (int i = 0; i < x.space().rank(); ++i) {
      const Matrix& a = x.coord(i).block(j);
      const Matrix& b = y.coord(i).block(j);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          for (int q = 0; q < n; ++q) acc(r, c) += a(r, q) * std::conj(b(c, q));
        }
      }
    }
    blocks.push_back(acc);
  }
  return csf::AlgebraElement(spec, std::move(blocks));
}

struct Extremes {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

/// Brute-force Rayleigh quotients v^H S v / v^H v of the realized frame
/// operator over random complex directions in every block.
inline Extremes rayleigh_sampling(const csf::OperatorFamily& f, csf::Rng& rng, int count) {
  Extremes e;
  const csf::Realization s = csf::realize(csf::frame_operator(f));
  for (const auto& b : s.blocks) {
    for (int i = 0; i < count; ++i) {
      const Matrix v = csf::random_matrix(rng, static_cast<int>(b.rows()), 1);
      const double q = (v.adjoint() * b * v)(0).real() / v.squaredNorm();
      e.min = std::min(e.min, q);
      e.max = std::max(e.max, q);
    }
  }
  return e;
}

/// Sum_i <x, x_i><x_i, x> evaluated directly for a module vector x.
inline csf::AlgebraElement vector_frame_sum(const csf::VectorFamily& v, const csf::ModuleVector& x) {
  csf::AlgebraElement out = csf::AlgebraElement::zero(x.space().spec());
  for (const auto& xi : v.members()) out += inner_by_loops(x, xi) * inner_by_loops(xi, x);
  return out;
}

/// Per-coordinate bounds of a vector family over a commutative algebra:
/// coordinate j is the scalar frame {v_i} in C^d with v_i = (x_i)_j.
inline std::vector<Extremes> per_coordinate_bounds(const csf::VectorFamily& v) {
  const auto& spec = v.space().spec();
  const int d = v.space().rank();
  std::vector<Extremes> out;
  for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
    Matrix s = Matrix::Zero(d, d);
    for (const auto& x : v.members()) {
      Eigen::VectorXcd col(d);
      for (int k = 0; k < d; ++k) col(k) = x.coord(k).block(j)(0, 0);
      s += col * col.adjoint();
    }
    Eigen::ComplexEigenSolver<Matrix> es(s);
    Extremes e;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      e.min = std::min(e.min, es.eigenvalues()(i).real());
      e.max = std::max(e.max, es.eigenvalues()(i).real());
    }
    out.push_back(e);
  }
  return out;
}

/// Optimal C with S >= C P when P is positive definite: the smallest
/// generalized eigenvalue of (S, P), minimised over blocks.
inline double generalized_lower(const csf::AdjointableOp& s, const csf::AdjointableOp& p) {
  const csf::Realization rs = csf::realize(s);
  const csf::Realization rp = csf::realize(p);
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rs.blocks.size(); ++j) {
    // Reduce to a real symmetric problem through the standard embedding.
    const Eigen::Index n = rs.blocks[j].rows();
    auto embed = [n](const Matrix& m) {
      Eigen::MatrixXd r(2 * n, 2 * n);
      r << m.real(), -m.imag(), m.imag(), m.real();
      return Eigen::MatrixXd(0.5 * (r + r.transpose()));
    };
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(embed(rs.blocks[j]), embed(rp.blocks[j]));
    out = std::min(out, ges.eigenvalues()(0));
  }
  return out;
}

}  // namespace oracle
