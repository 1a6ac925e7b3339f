#pragma once

#include <string>

#include "codefit/ast.hpp"

namespace codefit::lang {

/// Canonical re-printing: single spaces, 4-space indent, K&R braces.
/// parse(print(a)) is structurally equal to a for every well-formed tree.
std::string print(const Ast& ast);

/// Render a single expression subtree (used by diagnostics and tests).
std::string print_expr(const Node& expr);

}  // namespace codefit::lang
