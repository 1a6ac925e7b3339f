#include "codefit/lexer.hpp"

#include <array>
#include <cctype>

#include "codefit/errors.hpp"

namespace codefit::lang {

namespace {

// C89 keyword set; the parser only understands a subset, the rest degrade to
// opaque statements downstream.
constexpr std::array<std::string_view, 32> kKeywords = {
    "auto",     "break",  "case",    "char",   "const",    "continue",
    "default",  "do",     "double",  "else",   "enum",     "extern",
    "float",    "for",    "goto",    "if",     "int",      "long",
    "register", "return", "short",   "signed", "sizeof",   "static",
    "struct",   "switch", "typedef", "union",  "unsigned", "void",
    "volatile", "while"};

// Multi-character operators, longest first so greedy matching works.
constexpr std::array<std::string_view, 19> kMultiOps = {
    "<<=", ">>=", "...", "==", "!=", "<=", ">=", "&&", "||", "++",
    "--",  "+=",  "-=",  "*=", "/=", "%=", "->", "<<", ">>"};

constexpr std::string_view kSingleOps = "+-*/%<>=!&|^~?:.";
constexpr std::string_view kSinglePuncts = ";,(){}[]#\\";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> scan(std::string_view src, bool lenient) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();

  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.push_back(Token{kind, std::string(src.substr(begin, end - begin)), Span{begin, end}});
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    std::size_t begin = i;

    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      push(TokenKind::Comment, begin, i);
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
      if (i + 1 >= n) {
        if (lenient) {
          push(TokenKind::Comment, begin, n);
          i = n;
          continue;
        }
        throw LexError("unterminated block comment", begin);
      }
      i += 2;
      push(TokenKind::Comment, begin, i);
      continue;
    }

    if (ident_start(c)) {
      while (i < n && ident_char(src[i])) ++i;
      std::string_view word = src.substr(begin, i - begin);
      push(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, begin, i);
      continue;
    }

    if (digit(c)) {
      if (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
        i += 2;
        while (i < n && std::isxdigit(static_cast<unsigned char>(src[i]))) ++i;
      } else {
        while (i < n && digit(src[i])) ++i;
      }
      // integer suffixes
      while (i < n && (src[i] == 'u' || src[i] == 'U' || src[i] == 'l' || src[i] == 'L')) ++i;
      push(TokenKind::IntLiteral, begin, i);
      continue;
    }

    if (c == '"') {
      ++i;
      while (i < n && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        if (src[i] == '\n') break;
        ++i;
      }
      if (i >= n || src[i] != '"') {
        if (lenient) {
          push(TokenKind::StringLiteral, begin, i);
          continue;
        }
        throw LexError("unterminated string literal", begin);
      }
      ++i;
      push(TokenKind::StringLiteral, begin, i);
      continue;
    }

    if (c == '\'') {
      ++i;
      while (i < n && src[i] != '\'') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        if (src[i] == '\n') break;
        ++i;
      }
      if (i >= n || src[i] != '\'') {
        if (lenient) {
          push(TokenKind::IntLiteral, begin, i);
          continue;
        }
        throw LexError("unterminated character literal", begin);
      }
      ++i;
      // char literals ride along as integer literals; the parser decodes them
      push(TokenKind::IntLiteral, begin, i);
      continue;
    }

    bool matched = false;
    for (std::string_view op : kMultiOps) {
      if (src.substr(i, op.size()) == op) {
        i += op.size();
        push(TokenKind::Operator, begin, i);
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (kSingleOps.find(c) != std::string_view::npos) {
      ++i;
      push(TokenKind::Operator, begin, i);
      continue;
    }
    if (kSinglePuncts.find(c) != std::string_view::npos) {
      ++i;
      push(TokenKind::Punct, begin, i);
      continue;
    }

    if (lenient) {
      ++i;
      push(TokenKind::Punct, begin, i);
      continue;
    }
    throw LexError("unrecognizable character '" + std::string(1, c) + "'", begin);
  }
  return out;
}

}  // namespace

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords)
    if (k == word) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view source) { return scan(source, false); }

std::vector<Token> tokenize_lenient(std::string_view source) { return scan(source, true); }

const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntLiteral: return "integer-literal";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::Comment: return "comment";
  }
  return "unknown";
}

}  // namespace codefit::lang
