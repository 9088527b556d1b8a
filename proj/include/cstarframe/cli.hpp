#pragma once

// Batch commands behind the cstarframe executable. Every command returns a
// JSON report plus the process status: 0 all verdicts pass, 1 some verdict
// fails, 2 the input could not be parsed or validated.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cstarframe/json_io.hpp"

namespace csf {

inline constexpr const char* kToolVersion = "1.0.0";

/// Explicit overrides; unset fields fall back to the instance file and then
/// to the library defaults.
struct RunFlags {
  std::optional<double> tol;
  std::optional<double> eps_strict;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::size_t parallel = 1;
};

struct RunReport {
  Json report;
  int status = 0;
};

/// Profiles: g-frame, k-frame, star-commutative, end-frame,
/// injective-example, decaying-injective. Throws Error(UnknownProfile).
Instance cmd_gen(std::uint64_t seed, const std::string& profile);
const std::vector<std::string>& profiles();

RunReport cmd_check(const Instance& inst, const RunFlags& flags);

struct ConstructArgs {
  std::string construction;
  std::string family;
  std::optional<std::string> k;
  std::optional<std::string> k2;
  std::optional<int> n;
};

RunReport cmd_construct(const Instance& inst, const ConstructArgs& args, const RunFlags& flags);

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t count = 10;
  std::vector<std::string> suites;  // empty: every applicable suite
  bool commutative_only = false;
  RunFlags flags;
};

const std::vector<std::string>& theorem_suites();
/// Only star-factorization and the generalized suites need commutative
/// algebras; commutative_only restricts the run to those.
RunReport cmd_verify_theorems(const VerifyOptions& opts);

/// Full command line entry point; writes reports to `out` (or --out) and
/// diagnostics to `err`. Returns the exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csf
