#pragma once

#include <string_view>
#include <vector>

#include "codefit/ast.hpp"
#include "codefit/token.hpp"

namespace codefit::lang {

/// Recursive-descent parse of the C subset. Constructs outside the subset
/// degrade to OpaqueStmt nodes that preserve the raw source bytes; only
/// structurally unrecoverable input (unbalanced braces, EOF inside a
/// construct) raises ParseError.
Ast parse(const std::vector<Token>& tokens, std::string_view source);

/// tokenize + parse in one step.
Ast parse_source(std::string_view source);

/// Total variant: any LexError/ParseError collapses the whole text into a
/// single OpaqueStmt so arbitrary corpus records always yield an Ast.
Ast parse_lenient(std::string_view source);

long long decode_int_literal(std::string_view lexeme);
std::string decode_string_literal(std::string_view lexeme);

}  // namespace codefit::lang
