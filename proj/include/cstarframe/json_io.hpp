#pragma once

// JSON encoding of the library types and of instance files.
//
// Scalars are [re, im] pairs, matrices row-major nested arrays. Objects keep
// insertion order so that emitted files are stable byte for byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstarframe/constructions.hpp"

namespace csf {

using Json = nlohmann::ordered_json;

Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const AlgebraSpec& spec);
Json to_json(const AlgebraElement& a);
Json to_json(const ModuleSpace& space);
Json to_json(const ModuleVector& x);
Json to_json(const AdjointableOp& t);
Json to_json(const OperatorFamily& f);
Json to_json(const Witness& w);
Json to_json(const CrossCheck& c);
Json to_json(const FrameReport& r);
Json to_json(const ConstructionCertificate& c);

// Parsers throw Error(ParseError) for malformed JSON shapes and let the
// constructors' validation errors through.
Complex complex_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);
AlgebraSpec spec_from_json(const Json& j);
AlgebraElement element_from_json(const Json& j);
ModuleSpace space_from_json(const Json& j);
ModuleVector vector_from_json(const Json& j);
AdjointableOp operator_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Instance files.

inline constexpr int kSchemaVersion = 1;

template <class T>
struct Named {
  std::string name;
  T value;
  friend bool operator==(const Named&, const Named&) = default;
};

struct FamilyRef {
  std::string name;
  bool vectors = false;  // members name vectors instead of operators
  std::string space;     // domain of an operator family, ambient space of a vector family
  std::vector<std::string> members;
  friend bool operator==(const FamilyRef&, const FamilyRef&) = default;
};

/// One requested check or construction. `action` is a check name such as
/// "g-frame" or a construction name such as "parseval-k".
struct Request {
  bool construction = false;
  std::string action;
  std::string target;  // family name, or operator name for "closed-range"
  std::optional<std::string> k;
  std::optional<std::string> k2;
  std::optional<std::string> lower;
  std::optional<std::string> upper;
  std::optional<int> n;
  friend bool operator==(const Request&, const Request&) = default;
};

struct Tolerances {
  double tol = 1e-9;
  double eps_strict = 1e-8;
  std::size_t samples = 200;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct Instance {
  int schema_version = kSchemaVersion;
  AlgebraSpec algebra{std::vector<int>{1}};
  std::vector<Named<ModuleSpace>> spaces;
  std::vector<Named<AdjointableOp>> operators;
  std::vector<Named<AlgebraElement>> elements;
  std::vector<Named<ModuleVector>> vectors;
  std::vector<FamilyRef> families;
  std::vector<Request> requests;
  std::uint64_t seed = 0;
  Tolerances tolerances;

  friend bool operator==(const Instance&, const Instance&) = default;

  const ModuleSpace& space(const std::string& name) const;
  const AdjointableOp& op(const std::string& name) const;
  const AlgebraElement& element(const std::string& name) const;
  const ModuleVector& vector(const std::string& name) const;
  const FamilyRef& family(const std::string& name) const;
  OperatorFamily operator_family(const std::string& name) const;
  VectorFamily vector_family(const std::string& name) const;
  /// Operator family view of any family (vectors become functionals).
  OperatorFamily as_operator_family(const std::string& name) const;

  /// Name lookup for a space, registering it as "S<k>" when absent.
  std::string add_space(const ModuleSpace& space);
};

/// Resolves every reference; throws Error(ValidationError) naming the first
/// dangling or ill-typed one.
void validate(const Instance& inst);

Json instance_to_json(const Instance& inst);
/// Throws Error(ParseError) for malformed structure and
/// Error(ValidationError) for unresolved references or invalid contents.
Instance instance_from_json(const Json& j);

/// Text round trip (two-space indent, trailing newline).
std::string dump(const Json& j);
Json parse_text(const std::string& text);

}  // namespace csf
