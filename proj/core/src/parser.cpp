#include "codefit/parser.hpp"

#include <array>
#include <string>

#include "codefit/errors.hpp"
#include "codefit/lexer.hpp"

namespace codefit::lang {

namespace {

constexpr std::array<std::string_view, 7> kTypeKeywords = {
    "void", "int", "long", "short", "char", "signed", "unsigned"};

bool is_type_keyword(const Token& t) {
  if (t.kind != TokenKind::Keyword) return false;
  for (auto k : kTypeKeywords)
    if (t.lexeme == k) return true;
  return false;
}

// Internal signal: the current statement cannot be parsed as a subset
// construct. Caught at statement/TU level and converted to OpaqueStmt.
struct StmtFail {
  std::size_t token_index;
  std::string expected;
};

class Parser {
 public:
  Parser(const std::vector<Token>& toks, std::string_view src) : toks_(toks), src_(src) {}

  Ast run() {
    auto tu = make_node(NodeKind::TranslationUnit);
    while (!at_end()) {
      if (raw().kind == TokenKind::Comment) {
        tu->kids.push_back(comment_stmt());
        continue;
      }
      std::size_t start = pos_;
      try {
        tu->kids.push_back(parse_function_def());
      } catch (const StmtFail& f) {
        pos_ = start;
        tu->kids.push_back(opaque_from(start, f));
      }
    }
    return Ast(std::move(tu));
  }

 private:
  const std::vector<Token>& toks_;
  std::string_view src_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& raw() const { return toks_[pos_]; }

  void skip_comments() {
    while (!at_end() && raw().kind == TokenKind::Comment) ++pos_;
  }

  // Grammar-level peeking skips comment trivia. Comments only become nodes
  // at statement boundaries.
  const Token* peek(std::size_t ahead = 0) {
    std::size_t p = pos_;
    std::size_t seen = 0;
    while (p < toks_.size()) {
      if (toks_[p].kind != TokenKind::Comment) {
        if (seen == ahead) return &toks_[p];
        ++seen;
      }
      ++p;
    }
    return nullptr;
  }

  bool peek_is(std::string_view lexeme, std::size_t ahead = 0) {
    const Token* t = peek(ahead);
    return t && t->lexeme == lexeme;
  }

  [[noreturn]] void fail(std::string expected) {
    skip_comments();
    throw StmtFail{pos_, std::move(expected)};
  }

  const Token& advance() {
    skip_comments();
    if (at_end()) fail("token");
    return toks_[pos_++];
  }

  const Token& expect(std::string_view lexeme) {
    skip_comments();
    if (at_end() || raw().lexeme != lexeme) fail(std::string(lexeme));
    return toks_[pos_++];
  }

  NodePtr comment_stmt() {
    auto n = make_node(NodeKind::CommentStmt);
    n->text = raw().lexeme;
    ++pos_;
    return n;
  }

  // ---- opaque fallback ----------------------------------------------------

  NodePtr opaque_from(std::size_t start, const StmtFail& f) {
    if (toks_[start].lexeme == "#") return opaque_line(start);
    std::size_t end = sync_from(start, f);
    pos_ = end + 1;
    return make_opaque(start, end);
  }

  NodePtr make_opaque(std::size_t first, std::size_t last) {
    auto n = make_node(NodeKind::OpaqueStmt);
    std::size_t b = toks_[first].span.begin;
    std::size_t e = toks_[last].span.end;
    n->text = std::string(src_.substr(b, e - b));
    return n;
  }

  // Preprocessor-style directives are captured to end of physical line
  // (with backslash continuation).
  NodePtr opaque_line(std::size_t start) {
    std::size_t line_end = src_.find('\n', toks_[start].span.begin);
    if (line_end == std::string_view::npos) line_end = src_.size();
    while (line_end > 0 && line_end < src_.size()) {
      std::size_t last_char = line_end;
      while (last_char > 0 && (src_[last_char - 1] == ' ' || src_[last_char - 1] == '\t' ||
                               src_[last_char - 1] == '\r'))
        --last_char;
      if (last_char > 0 && src_[last_char - 1] == '\\') {
        line_end = src_.find('\n', line_end + 1);
        if (line_end == std::string_view::npos) line_end = src_.size();
      } else {
        break;
      }
    }
    std::size_t last = start;
    while (last + 1 < toks_.size() && toks_[last + 1].span.end <= line_end) ++last;
    pos_ = last + 1;
    auto n = make_node(NodeKind::OpaqueStmt);
    std::size_t b = toks_[start].span.begin;
    n->text = std::string(src_.substr(b, toks_[last].span.end - b));
    return n;
  }

  // Scan to a recovery point: a ';' at depth 0, or a brace block opened at
  // depth 0 once it closes. Hitting EOF with open brackets is unrecoverable.
  std::size_t sync_from(std::size_t start, const StmtFail& f) {
    int depth = 0;
    bool brace_opened = false;
    for (std::size_t j = start; j < toks_.size(); ++j) {
      const std::string& lx = toks_[j].lexeme;
      if (toks_[j].kind == TokenKind::Comment) continue;
      if (lx == "(" || lx == "[") {
        ++depth;
      } else if (lx == ")" || lx == "]") {
        if (depth > 0) --depth;
      } else if (lx == "{") {
        ++depth;
        if (depth == 1) brace_opened = true;
      } else if (lx == "}") {
        if (depth == 0) {
          // ran into the enclosing block's closer
          if (j == start) return j;  // stray closer at top level
          return j - 1;
        }
        --depth;
        if (depth == 0 && brace_opened) {
          if (j + 1 < toks_.size() && toks_[j + 1].lexeme == ";") return j + 1;
          return j;
        }
      } else if (lx == ";" && depth == 0) {
        return j;
      }
    }
    if (depth > 0)
      throw ParseError("unexpected end of input while recovering statement", f.token_index,
                       f.expected.empty() ? "}" : f.expected);
    return toks_.size() - 1;
  }

  // ---- declarations & functions -------------------------------------------

  std::string parse_type_spec() {
    std::string type;
    skip_comments();
    if (at_end() || !is_type_keyword(raw())) fail("type specifier");
    while (!at_end()) {
      skip_comments();
      if (at_end() || !is_type_keyword(raw())) break;
      if (!type.empty()) type += ' ';
      type += raw().lexeme;
      ++pos_;
    }
    return type;
  }

  NodePtr parse_function_def() {
    std::string ret = parse_type_spec();
    skip_comments();
    if (at_end() || raw().kind != TokenKind::Identifier) fail("function name");
    std::string name = raw().lexeme;
    ++pos_;
    expect("(");
    auto fn = make_node(NodeKind::FunctionDef);
    fn->text = std::move(name);
    fn->aux = std::move(ret);
    skip_comments();
    if (!at_end() && raw().lexeme == ")") {
      ++pos_;
    } else if (peek_is("void") && peek_is(")", 1)) {
      advance();
      expect(")");
    } else {
      while (true) {
        std::string pty = parse_type_spec();
        skip_comments();
        if (at_end() || raw().kind != TokenKind::Identifier) fail("parameter name");
        auto param = make_node(NodeKind::ParamDecl);
        param->text = raw().lexeme;
        param->aux = std::move(pty);
        ++pos_;
        fn->kids.push_back(std::move(param));
        skip_comments();
        if (!at_end() && raw().lexeme == ",") {
          ++pos_;
          continue;
        }
        expect(")");
        break;
      }
    }
    skip_comments();
    if (at_end() || raw().lexeme != "{") fail("{");
    fn->kids.push_back(parse_compound());
    return fn;
  }

  NodePtr parse_decl_stmt(bool consume_semi) {
    std::string type = parse_type_spec();
    auto decl = make_node(NodeKind::DeclStmt);
    decl->aux = std::move(type);
    while (true) {
      skip_comments();
      if (at_end() || raw().kind != TokenKind::Identifier) fail("declarator name");
      auto d = make_node(NodeKind::Declarator);
      d->text = raw().lexeme;
      ++pos_;
      skip_comments();
      if (!at_end() && raw().lexeme == "=") {
        ++pos_;
        d->kids.push_back(parse_assign());
      }
      decl->kids.push_back(std::move(d));
      skip_comments();
      if (!at_end() && raw().lexeme == ",") {
        ++pos_;
        continue;
      }
      break;
    }
    if (consume_semi) expect(";");
    return decl;
  }

  // ---- statements ----------------------------------------------------------

  // May return nullptr for a bare ';'.
  NodePtr parse_stmt() {
    skip_comments_to_boundary();
    if (at_end()) fail("statement");
    if (raw().kind == TokenKind::Comment) return comment_stmt();
    std::size_t start = pos_;
    try {
      return parse_stmt_inner();
    } catch (const StmtFail& f) {
      pos_ = start;
      return opaque_from(start, f);
    }
  }

  // At a statement boundary comments are significant, so do not skip.
  void skip_comments_to_boundary() {}

  NodePtr parse_stmt_inner() {
    const std::string& lx = raw().lexeme;
    if (lx == "{") return parse_compound();
    if (lx == ";") {
      ++pos_;
      return nullptr;
    }
    if (raw().kind == TokenKind::Keyword) {
      if (lx == "if") return parse_if();
      if (lx == "for") return parse_for();
      if (lx == "while") return parse_while();
      if (lx == "do") return parse_do();
      if (lx == "switch") return parse_switch();
      if (lx == "return") return parse_return();
      if (lx == "break") {
        ++pos_;
        expect(";");
        return make_node(NodeKind::BreakStmt);
      }
      if (lx == "continue") {
        ++pos_;
        expect(";");
        return make_node(NodeKind::ContinueStmt);
      }
      if (is_type_keyword(raw())) return parse_decl_stmt(true);
      fail("statement");
    }
    auto e = parse_expr();
    expect(";");
    auto stmt = make_node(NodeKind::ExprStmt);
    stmt->kids.push_back(std::move(e));
    return stmt;
  }

  NodePtr parse_compound() {
    expect("{");
    std::vector<NodePtr> stmts;
    while (true) {
      skip_comments_to_boundary();
      if (at_end()) throw ParseError("unexpected end of input in block", pos_, "}");
      if (raw().kind != TokenKind::Comment && raw().lexeme == "}") {
        ++pos_;
        break;
      }
      if (auto s = parse_stmt()) stmts.push_back(std::move(s));
    }
    return make_compound(std::move(stmts));
  }

  // Bodies are normalized to blocks so rewrites always have a place to put
  // hoisted statements; an else-if chain keeps the raw IfStmt.
  NodePtr body_block() {
    auto s = parse_stmt();
    if (!s) return make_compound({});
    if (s->kind == NodeKind::CompoundStmt) return s;
    std::vector<NodePtr> one;
    one.push_back(std::move(s));
    return make_compound(std::move(one));
  }

  NodePtr parse_if() {
    expect("if");
    expect("(");
    auto cond = parse_expr();
    expect(")");
    auto node = make_node(NodeKind::IfStmt);
    node->kids.push_back(std::move(cond));
    node->kids.push_back(body_block());
    // look ahead without consuming: a comment after the block is a statement
    // of the enclosing list, not else-trivia
    if (peek_is("else")) {
      advance();
      skip_comments();  // trivia between else and its body
      if (!at_end() && raw().lexeme == "if") {
        node->kids.push_back(parse_if());
      } else {
        node->kids.push_back(body_block());
      }
    }
    return node;
  }

  NodePtr parse_for() {
    expect("for");
    expect("(");
    auto node = make_node(NodeKind::ForStmt);
    skip_comments();
    if (!at_end() && raw().lexeme == ";") {
      ++pos_;
      node->kids.push_back(make_node(NodeKind::Empty));
    } else if (!at_end() && is_type_keyword(raw())) {
      node->kids.push_back(parse_decl_stmt(true));
    } else {
      node->kids.push_back(parse_expr());
      expect(";");
    }
    skip_comments();
    if (!at_end() && raw().lexeme == ";") {
      ++pos_;
      node->kids.push_back(make_node(NodeKind::Empty));
    } else {
      node->kids.push_back(parse_expr());
      expect(";");
    }
    skip_comments();
    if (!at_end() && raw().lexeme == ")") {
      ++pos_;
      node->kids.push_back(make_node(NodeKind::Empty));
    } else {
      node->kids.push_back(parse_expr());
      expect(")");
    }
    node->kids.push_back(body_block());
    return node;
  }

  NodePtr parse_while() {
    expect("while");
    expect("(");
    auto cond = parse_expr();
    expect(")");
    auto node = make_node(NodeKind::WhileStmt);
    node->kids.push_back(std::move(cond));
    node->kids.push_back(body_block());
    return node;
  }

  NodePtr parse_do() {
    expect("do");
    auto node = make_node(NodeKind::DoStmt);
    node->kids.push_back(body_block());
    expect("while");
    expect("(");
    node->kids.push_back(parse_expr());
    expect(")");
    expect(";");
    return node;
  }

  NodePtr parse_switch() {
    expect("switch");
    expect("(");
    auto cond = parse_expr();
    expect(")");
    expect("{");
    auto node = make_node(NodeKind::SwitchStmt);
    node->kids.push_back(std::move(cond));
    skip_comments();  // trivia before the first clause
    while (true) {
      skip_comments();
      if (at_end()) throw ParseError("unexpected end of input in switch", pos_, "}");
      if (raw().lexeme == "}") {
        ++pos_;
        break;
      }
      node->kids.push_back(parse_case_clause());
    }
    return node;
  }

  NodePtr parse_case_clause() {
    auto clause = make_node(NodeKind::CaseClause);
    skip_comments();
    if (!at_end() && raw().lexeme == "default") {
      ++pos_;
      clause->aux = "default";
      expect(":");
    } else if (!at_end() && raw().lexeme == "case") {
      ++pos_;
      clause->aux = "case";
      bool neg = false;
      skip_comments();
      if (!at_end() && raw().lexeme == "-") {
        neg = true;
        ++pos_;
      }
      skip_comments();
      if (at_end() || raw().kind != TokenKind::IntLiteral) fail("case constant");
      clause->ival = decode_int_literal(raw().lexeme);
      if (neg) clause->ival = -clause->ival;
      ++pos_;
      expect(":");
    } else {
      fail("case or default");
    }
    while (true) {
      skip_comments_to_boundary();
      if (at_end()) throw ParseError("unexpected end of input in switch clause", pos_, "}");
      if (raw().kind != TokenKind::Comment &&
          (raw().lexeme == "case" || raw().lexeme == "default" || raw().lexeme == "}"))
        break;
      if (auto s = parse_stmt()) clause->kids.push_back(std::move(s));
    }
    return clause;
  }

  NodePtr parse_return() {
    expect("return");
    auto node = make_node(NodeKind::ReturnStmt);
    skip_comments();
    if (!at_end() && raw().lexeme == ";") {
      ++pos_;
      return node;
    }
    node->kids.push_back(parse_expr());
    expect(";");
    return node;
  }

  // ---- expressions ----------------------------------------------------------

  NodePtr parse_expr() { return parse_assign(); }

  bool next_is_assign_op() {
    const Token* t = peek();
    if (!t) return false;
    return t->lexeme == "=" || t->lexeme == "+=" || t->lexeme == "-=" || t->lexeme == "*=" ||
           t->lexeme == "/=" || t->lexeme == "%=";
  }

  NodePtr parse_assign() {
    auto lhs = parse_logic_or();
    if (next_is_assign_op()) {
      if (lhs->kind != NodeKind::IdentExpr) fail("assignable name");
      std::string op = advance().lexeme;
      auto rhs = parse_assign();
      return make_assign(std::move(op), std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr parse_binary_level(int level) {
    // level 0: ||, 1: &&, 2: == !=, 3: < > <= >=, 4: + -, 5: * / %
    if (level == 6) return parse_unary();
    auto lhs = parse_binary_level(level + 1);
    while (true) {
      const Token* t = peek();
      if (!t) break;
      const std::string& lx = t->lexeme;
      bool match = false;
      switch (level) {
        case 0: match = lx == "||"; break;
        case 1: match = lx == "&&"; break;
        case 2: match = lx == "==" || lx == "!="; break;
        case 3: match = lx == "<" || lx == ">" || lx == "<=" || lx == ">="; break;
        case 4: match = lx == "+" || lx == "-"; break;
        case 5: match = lx == "*" || lx == "/" || lx == "%"; break;
      }
      if (!match) break;
      std::string op = advance().lexeme;
      auto rhs = parse_binary_level(level + 1);
      lhs = make_binary(std::move(op), std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr parse_logic_or() { return parse_binary_level(0); }

  NodePtr parse_unary() {
    const Token* t = peek();
    if (!t) fail("expression");
    const std::string& lx = t->lexeme;
    if (lx == "+" || lx == "-" || lx == "!") {
      std::string op = advance().lexeme;
      auto operand = parse_unary();
      // fold signs into literals so print/parse round-trips exactly
      if (operand->kind == NodeKind::IntLit && op != "!") {
        if (op == "-")
          operand->ival = static_cast<long long>(
              0ull - static_cast<unsigned long long>(operand->ival));
        return operand;
      }
      auto node = make_node(NodeKind::UnaryExpr);
      node->text = std::move(op);
      node->kids.push_back(std::move(operand));
      return node;
    }
    if (lx == "++" || lx == "--") {
      std::string op = advance().lexeme;
      auto operand = parse_unary();
      if (operand->kind != NodeKind::IdentExpr) fail("incrementable name");
      auto node = make_node(NodeKind::IncDecExpr);
      node->text = std::move(op);
      node->ival = 1;  // prefix
      node->kids.push_back(std::move(operand));
      return node;
    }
    return parse_postfix();
  }

  NodePtr parse_postfix() {
    auto e = parse_primary();
    const Token* t = peek();
    if (t && (t->lexeme == "++" || t->lexeme == "--")) {
      if (e->kind != NodeKind::IdentExpr) fail("incrementable name");
      std::string op = advance().lexeme;
      auto node = make_node(NodeKind::IncDecExpr);
      node->text = std::move(op);
      node->ival = 0;  // postfix
      node->kids.push_back(std::move(e));
      return node;
    }
    return e;
  }

  NodePtr parse_primary() {
    skip_comments();
    if (at_end()) fail("expression");
    const Token& t = raw();
    if (t.kind == TokenKind::IntLiteral) {
      ++pos_;
      return make_int(decode_int_literal(t.lexeme));
    }
    if (t.kind == TokenKind::StringLiteral) {
      ++pos_;
      auto node = make_node(NodeKind::StrLit);
      node->text = t.lexeme;
      return node;
    }
    if (t.kind == TokenKind::Identifier) {
      std::string name = t.lexeme;
      ++pos_;
      skip_comments();
      if (!at_end() && raw().lexeme == "(") {
        ++pos_;
        auto call = make_node(NodeKind::CallExpr);
        call->text = std::move(name);
        skip_comments();
        if (!at_end() && raw().lexeme == ")") {
          ++pos_;
          return call;
        }
        while (true) {
          call->kids.push_back(parse_assign());
          skip_comments();
          if (!at_end() && raw().lexeme == ",") {
            ++pos_;
            continue;
          }
          expect(")");
          break;
        }
        return call;
      }
      return make_ident(std::move(name));
    }
    if (t.lexeme == "(") {
      ++pos_;
      auto e = parse_expr();
      expect(")");
      return e;
    }
    fail("expression");
  }
};

}  // namespace

Ast parse(const std::vector<Token>& tokens, std::string_view source) {
  return Parser(tokens, source).run();
}

Ast parse_source(std::string_view source) { return parse(tokenize(source), source); }

Ast parse_lenient(std::string_view source) {
  try {
    return parse_source(source);
  } catch (const LexError&) {
  } catch (const ParseError&) {
  }
  auto tu = make_node(NodeKind::TranslationUnit);
  if (!source.empty()) {
    auto op = make_node(NodeKind::OpaqueStmt);
    op->text = std::string(source);
    tu->kids.push_back(std::move(op));
  }
  return Ast(std::move(tu));
}

long long decode_int_literal(std::string_view lexeme) {
  if (lexeme.empty()) return 0;
  if (lexeme.front() == '\'') {
    // character literal
    if (lexeme.size() >= 3 && lexeme[1] == '\\') {
      switch (lexeme[2]) {
        case 'n': return '\n';
        case 't': return '\t';
        case 'r': return '\r';
        case '0': return 0;
        case '\\': return '\\';
        case '\'': return '\'';
        case '"': return '"';
        default: return lexeme[2];
      }
    }
    return lexeme.size() >= 2 ? lexeme[1] : 0;
  }
  unsigned long long v = 0;
  std::size_t i = 0;
  if (lexeme.size() > 2 && lexeme[0] == '0' && (lexeme[1] == 'x' || lexeme[1] == 'X')) {
    for (i = 2; i < lexeme.size(); ++i) {
      char c = lexeme[i];
      unsigned d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = 10 + (c - 'a');
      else if (c >= 'A' && c <= 'F') d = 10 + (c - 'A');
      else break;  // suffix
      v = v * 16 + d;
    }
  } else {
    for (i = 0; i < lexeme.size(); ++i) {
      char c = lexeme[i];
      if (c < '0' || c > '9') break;  // suffix
      v = v * 10 + static_cast<unsigned>(c - '0');
    }
  }
  return static_cast<long long>(v);
}

std::string decode_string_literal(std::string_view lexeme) {
  std::string out;
  if (lexeme.size() < 2) return out;
  for (std::size_t i = 1; i + 1 < lexeme.size(); ++i) {
    char c = lexeme[i];
    if (c == '\\' && i + 2 < lexeme.size()) {
      char e = lexeme[i + 1];
      ++i;
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case '\\': out += '\\'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        default: out += e; break;
      }
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace codefit::lang
