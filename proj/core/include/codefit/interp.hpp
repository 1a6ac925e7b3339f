#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codefit/ast.hpp"

namespace codefit::interp {

enum class Halt { Terminated, StepLimit, RuntimeError };

const char* halt_name(Halt h);

/// Outcome of one run. Errors are reported here, never thrown, so
/// differential comparison stays total.
struct ExecResult {
  std::string stdout_text;
  std::optional<long long> return_value;
  long long steps = 0;
  Halt halted = Halt::Terminated;
  std::string error;
};

inline constexpr long long kDefaultStepLimit = 100000;

/// Function name units expose for differential runs. Renaming keeps entry
/// points (this and main) addressable so equivalence checks stay meaningful.
inline constexpr const char* kEntryFunction = "compute";

/// Runs `entry(args...)` over the tree. Integer arithmetic wraps in 64-bit
/// two's complement; division by zero, uninitialized reads and reaching an
/// OpaqueStmt all halt with RuntimeError. Pure: concurrent executions over
/// distinct (or shared, immutable) trees are safe.
ExecResult execute(const lang::Ast& ast, std::string_view entry,
                   const std::vector<long long>& args, long long step_limit = kDefaultStepLimit);

struct EquivResult {
  bool equivalent = true;
  std::optional<std::vector<long long>> witness;  // first distinguishing vector
};

/// Observable equality under the given test vectors: per vector both runs
/// must agree on (stdout, return value, halt kind). Runs that hit the step
/// limit on both sides count as equal when one stdout is a prefix of the
/// other. With `compare_stdout` false only return value and halt kind are
/// compared (the comment-deletion operator legitimately drops debug prints).
EquivResult equivalent(const lang::Ast& a, const lang::Ast& b, std::string_view entry,
                       const std::vector<std::vector<long long>>& vectors,
                       long long step_limit = kDefaultStepLimit, bool compare_stdout = true);

}  // namespace codefit::interp
