#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "codefit/ast.hpp"

namespace codefit::transforms {

/// The 15 semantic-preserving rewrite operators, numbered 1..15.
enum class OpId : int {
  ChangeName = 1,        // rename functions and variables
  ChangeFor,             // for-loop -> while-loop
  ChangeWhile,           // while-loop -> for-loop
  ChangeDo,              // do-loop -> while-loop
  ChangeIfElseIf,        // else-if chain -> nested if-else
  ChangeIf,              // if-else -> if-elseif
  ChangeSwitch,          // switch -> if-elseif chain
  ChangeRelation,        // a < b -> b > a
  ChangeUnary,           // i++ -> i = i + 1
  ChangeIncrement,       // i += 1 -> i = i + 1
  ChangeConstant,        // 0 -> 8-8
  ChangeDefine,          // int b = 0 -> int b; b = 0
  ChangeAddJunk,         // insert never-executed guard blocks
  ChangeExchangeCode,    // swap independent adjacent declarations
  ChangeDeleteComments,  // drop comments and debug prints
};

inline constexpr int kNumOps = 15;

const char* op_name(OpId id);
std::optional<OpId> op_from_name(std::string_view name);
std::optional<OpId> op_from_number(int number);

struct TransformOp {
  OpId id;
  std::uint64_t rng_seed = 0;  // drives fresh names, junk choice, ...
};

struct TransformRecord {
  TransformOp op;
  int sites_found = 0;      // K
  int sites_rewritten = 0;  // always equals sites_found (all-K application)
  std::uint64_t before_hash = 0;
  std::uint64_t after_hash = 0;
};

/// Node ids where the operator applies, in document order. K = result size.
std::vector<int> enumerate_sites(const lang::Ast& ast, const TransformOp& op);

/// Rewrites every applicable site (bottom-up within one pass) and returns the
/// new tree; an operator with no sites returns an unchanged clone. Rewrites
/// never mutate the input, so distinct programs transform concurrently.
std::pair<lang::Ast, TransformRecord> apply(const lang::Ast& ast, const TransformOp& op);

/// Left-to-right composition of apply.
std::pair<lang::Ast, std::vector<TransformRecord>> apply_sequence(
    const lang::Ast& ast, const std::vector<TransformOp>& ops);

/// FNV-1a digest of the canonical printed form.
std::uint64_t content_hash(const lang::Ast& ast);

}  // namespace codefit::transforms
