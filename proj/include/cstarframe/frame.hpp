#pragma once

// Frame conditions over the free module H = A^d.
//
// Scalar bounds are certified through the frame operator S = sum T_i^* T_i:
// C <x,x> <= sum <T_i x, T_i x> <= D <x,x> for all x is equivalent to
// C I <= S <= D I, so the optimal constants are the extreme eigenvalues of
// realize(S). K-bounds use a bisection on c -> S - c K K^* >= 0.
//
// Algebra-valued (star) bounds are certified only for commutative algebras,
// where every coordinate is an independent scalar problem. For other
// algebras check_star_sampled searches for counterexamples and never
// certifies.
//
// The operator-module checks (end frames) certify through the equivalent
// g-frame condition and cross-validate the defining inequality on sampled
// operators T in End*(H, K), with <T, S> = T S^*.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cstarframe/operator.hpp"

namespace csf {

class OperatorFamily {
public:
  /// Throws Error(EmptyFamily) for no members and Error(SpaceMismatch) when
  /// a member's domain differs from `domain`.
  OperatorFamily(ModuleSpace domain, std::vector<AdjointableOp> members);

  const ModuleSpace& domain() const noexcept { return domain_; }
  const std::vector<AdjointableOp>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  const AdjointableOp& operator[](std::size_t i) const { return members_.at(i); }

  /// The shared codomain, if every member maps into the same space.
  std::optional<ModuleSpace> common_codomain() const;

  friend bool operator==(const OperatorFamily&, const OperatorFamily&) = default;

private:
  ModuleSpace domain_;
  std::vector<AdjointableOp> members_;
};

class VectorFamily {
public:
  VectorFamily(ModuleSpace space, std::vector<ModuleVector> members);

  const ModuleSpace& space() const noexcept { return space_; }
  const std::vector<ModuleVector>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

  friend bool operator==(const VectorFamily&, const VectorFamily&) = default;

private:
  ModuleSpace space_;
  std::vector<ModuleVector> members_;
};

/// x_i -> the functional <., x_i> : H -> A^1, so that
/// <L_i x, L_i x> = <x, x_i><x_i, x>.
OperatorFamily to_functionals(const VectorFamily& v);

/// S = sum_i T_i^* T_i, summed in index order.
AdjointableOp frame_operator(const OperatorFamily& f);

enum class FrameKind {
  GFrame,
  VectorFrame,
  KGFrame,
  StarFrame,
  StarGFrame,
  StarKFrame,
  StarKGFrame,
  StarSampled,
  EndFrame,
  KEndFrame,
  GeneralizedEndFrame,
  GeneralizedKEndFrame,
};

std::string_view to_string(FrameKind kind) noexcept;

struct ScalarBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds in the sandwich form lower <x,x> lower^* and the product form
/// lower_product <x,x>, with lower_product = lower lower^*.
struct AlgebraBounds {
  AlgebraElement lower;
  AlgebraElement upper;
  AlgebraElement lower_product;
  AlgebraElement upper_product;
  bool strictly_positive = false;
};

enum class Side { Lower, Upper };

std::string_view to_string(Side side) noexcept;

/// A counterexample. For vector witnesses `value` is the measured quotient
/// and `threshold` the constant it defeats; operator witnesses come from the
/// sampled operator route.
struct Witness {
  Side side = Side::Lower;
  std::optional<ModuleVector> vector;
  std::optional<AdjointableOp> op;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Result of evaluating the defining inequality on sampled operators.
/// sampled_lower/sampled_upper hold one entry per algebra coordinate for the
/// generalized checks and a single entry otherwise.
struct CrossCheck {
  std::size_t samples = 0;
  bool certificate = false;  // verdict of the certified route
  bool verdict = false;      // verdict of the sampled route
  bool bounds_hold = true;
  bool agrees = false;
  std::vector<double> sampled_lower;
  std::vector<double> sampled_upper;
};

struct FrameReport {
  FrameKind kind = FrameKind::GFrame;
  bool pass = false;
  std::variant<std::monostate, ScalarBounds, AlgebraBounds> bounds;
  bool tight = false;
  bool parseval = false;
  bool certified = true;
  std::optional<Witness> witness;
  std::optional<CrossCheck> cross_check;
  std::string note;

  const ScalarBounds* scalar_bounds() const { return std::get_if<ScalarBounds>(&bounds); }
  const AlgebraBounds* algebra_bounds() const { return std::get_if<AlgebraBounds>(&bounds); }
};

struct CheckOptions {
  double tol = 1e-9;
  double eps_strict = 1e-8;
  std::size_t samples = 200;
  std::uint64_t seed = 0;
};

/// Relative tightness tolerance |C - D| <= kTightTol * max(1, D).
inline constexpr double kTightTol = 1e-8;
/// Bisection stops once the bracket is this narrow relative to its top.
inline constexpr double kBisectionWidth = 1e-6;
inline constexpr int kBisectionMaxIter = 60;

// ---------------------------------------------------------------------------
// Pencil lower bound: sup { c >= 0 : S_j - c P_j >= 0 for every block j }.

struct PencilBound {
  double value = 0.0;
  bool degenerate = false;  // P vanishes: no K-condition to measure
  bool tight = false;       // S = value * P up to tol
  double infeasible = 0.0;  // last rejected probe (upper end of the bracket)
  std::size_t witness_block = 0;
  Vector witness;  // row coordinates with witness^H (S - infeasible P) witness < 0
};

PencilBound pencil_lower_bound(const std::vector<Matrix>& s, const std::vector<Matrix>& p, double tol);

// ---------------------------------------------------------------------------
// Checkers.

FrameReport check_g_frame(const OperatorFamily& f, double tol = 1e-9);
FrameReport check_vector_frame(const VectorFamily& v, double tol = 1e-9);
/// Throws Error(ShapeMismatch) unless K is an endomorphism of f.domain().
FrameReport check_k_g_frame(const OperatorFamily& f, const AdjointableOp& k, double tol = 1e-9);

/// Commutative algebras only (Error(NotCommutative) otherwise).
FrameReport check_star_frame_commutative(const VectorFamily& v, const CheckOptions& opts = {});
FrameReport check_star_g_frame_commutative(const OperatorFamily& f, const CheckOptions& opts = {});
FrameReport check_star_k_frame_commutative(const VectorFamily& v, const AdjointableOp& k,
                                           const CheckOptions& opts = {});
FrameReport check_star_k_g_frame_commutative(const OperatorFamily& f, const AdjointableOp& k,
                                             const CheckOptions& opts = {});

/// Falsification-only check of
///   A <K^*x, K^*x> A^* <= sum <T_i x, T_i x> <= B <x, x> B^*
/// on opts.samples random unit vectors (K = identity when absent).
/// Any algebra. A pass means no counterexample was found.
FrameReport check_star_sampled(const OperatorFamily& f, const std::optional<AdjointableOp>& k,
                               const AlgebraElement& lower, const AlgebraElement& upper,
                               const CheckOptions& opts = {});
FrameReport check_star_sampled(const VectorFamily& v, const std::optional<AdjointableOp>& k,
                               const AlgebraElement& lower, const AlgebraElement& upper,
                               const CheckOptions& opts = {});

/// Members must share one codomain (Error(ShapeMismatch) otherwise).
FrameReport check_end_frame(const OperatorFamily& f, const CheckOptions& opts = {});
FrameReport check_k_end_frame(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts = {});
/// Commutative algebras only.
FrameReport check_generalized_end_frame(const OperatorFamily& f, const CheckOptions& opts = {});
FrameReport check_generalized_k_end_frame(const OperatorFamily& f, const AdjointableOp& k,
                                          const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// Operator-side evaluation, exposed for tests and constructions.

/// sum_i <T, T_i><T_i, T> = sum_i (T T_i^*)(T_i T^*).
AdjointableOp operator_frame_sum(const OperatorFamily& f, const AdjointableOp& t);

struct PencilExtremes {
  double min = 0.0;
  double max = 0.0;
  bool empty = true;  // N vanishes on this block
};

/// Extremes of v^H M v / v^H N v over v with v^H N v > 0, for PSD M, N.
/// Directions in ker N are eliminated through the Schur complement of M.
PencilExtremes pencil_extremes(const Matrix& m, const Matrix& n);

}  // namespace csf
