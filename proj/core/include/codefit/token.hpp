#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace codefit::lang {

enum class TokenKind {
  Keyword,
  Identifier,
  IntLiteral,
  StringLiteral,
  Operator,
  Punct,
  Comment,
};

/// Byte range [begin, end) into the original source.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Token {
  TokenKind kind;
  std::string lexeme;
  Span span;
};

const char* token_kind_name(TokenKind k);

}  // namespace codefit::lang
