#pragma once

// Constructive transformations on frames. Each returns the new object plus a
// certificate obtained by re-running the matching checker on the output;
// predicted bounds are stored next to the recomputed optimal ones.

#include <string>
#include <vector>

#include "cstarframe/frame.hpp"

namespace csf {

struct NamedCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ConstructionCertificate {
  std::string construction;
  FrameReport input;
  std::variant<std::monostate, ScalarBounds, AlgebraBounds> predicted;
  FrameReport output;
  std::vector<NamedCheck> checks;
  bool pass = false;
};

struct FamilyConstruction {
  OperatorFamily family;
  ConstructionCertificate certificate;
};

struct OperatorConstruction {
  AdjointableOp op;
  ConstructionCertificate certificate;
};

/// Lifted members embed each output into the direct sum of all codomains.
/// The certificate compares g-frame bounds before and after, plus the
/// star-g bounds for commutative algebras and the K-g / star-K-g bounds when
/// k is given.
FamilyConstruction direct_sum_lift(const OperatorFamily& f, const std::optional<AdjointableOp>& k = std::nullopt,
                                   const CheckOptions& opts = {});

/// K = S^(1/2) for the frame operator S; F is then a Parseval K-frame.
/// Members must share a codomain.
OperatorConstruction parseval_k_from_family(const OperatorFamily& f, const CheckOptions& opts = {});

/// {T_i K^*} from an end-frame with bounds (A, B); predicted (A, B ||K||^2).
/// Throws Error(NotAFrame) when F fails check_end_frame, Error(ShapeMismatch)
/// when K is not an endomorphism of the domain.
FamilyConstruction k_frame_from_frame(const OperatorFamily& f, const AdjointableOp& k, const CheckOptions& opts = {});

/// {T_i K2^*} from a K1-frame with bounds (A, B); a K2 K1-frame with
/// predicted (A, B ||K2||^2).
FamilyConstruction k2k1_frame(const OperatorFamily& f, const AdjointableOp& k1, const AdjointableOp& k2,
                              const CheckOptions& opts = {});

/// {T_i (K^*)^N} as N chained k2k1_frame steps with K2 = K; a K^(N+1)-frame
/// with predicted (A, B ||K||^(2N)).
FamilyConstruction power_k_frame(const OperatorFamily& f, const AdjointableOp& k, int n, const CheckOptions& opts = {});

/// A K-frame with surjective K is an end-frame with lower bound
/// A sigma_min(K)^2. Throws Error(NotSurjective) or Error(NotAFrame).
ConstructionCertificate surjective_demotion(const OperatorFamily& f, const AdjointableOp& k,
                                            const CheckOptions& opts = {});

/// Injective closed-range members form a frame with
/// lower = sum ||(T_i^* T_i)^-1||^-1 and upper = sum ||T_i||^2.
/// Throws Error(NotInjectiveClosedRange) naming the first offending index.
FamilyConstruction example_frame_injective(const std::vector<AdjointableOp>& ops, const CheckOptions& opts = {});

/// Every end-frame with bounds (A, B) is a K-frame for nonzero K, certified
/// with lower bound A / max(1, ||K||^2).
ConstructionCertificate frame_as_k_frame(const OperatorFamily& f, const AdjointableOp& k,
                                         const CheckOptions& opts = {});

}  // namespace csf
