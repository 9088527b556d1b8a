#include "cstarframe/errors.hpp"

namespace csf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotCommutative: return "NotCommutative";
    case ErrorKind::NotAFrame: return "NotAFrame";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::NotInjectiveClosedRange: return "NotInjectiveClosedRange";
    case ErrorKind::UnknownProfile: return "UnknownProfile";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace csf
