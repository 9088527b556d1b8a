#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csf {

enum class ErrorKind {
  InvalidSpec,
  NotPositive,
  NotSelfAdjoint,
  SpaceMismatch,
  SpecMismatch,
  ShapeMismatch,
  EmptyFamily,
  NotCommutative,
  NotAFrame,
  NotSurjective,
  NotInjectiveClosedRange,
  UnknownProfile,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace csf
