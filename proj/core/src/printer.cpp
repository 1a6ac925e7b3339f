#include "codefit/printer.hpp"

#include <cassert>
#include <string>

namespace codefit::lang {

namespace {

// Binding strength; larger binds tighter.
int op_prec(const Node& n) {
  switch (n.kind) {
    case NodeKind::AssignExpr: return 1;
    case NodeKind::BinaryExpr: {
      const std::string& op = n.text;
      if (op == "||") return 2;
      if (op == "&&") return 3;
      if (op == "==" || op == "!=") return 4;
      if (op == "<" || op == ">" || op == "<=" || op == ">=") return 5;
      if (op == "+" || op == "-") return 6;
      return 7;  // * / %
    }
    case NodeKind::UnaryExpr: return 8;
    default: return 9;  // primary, call, inc/dec
  }
}

class Printer {
 public:
  std::string run(const Ast& ast) {
    const Node& tu = ast.root();
    bool first = true;
    for (const auto& item : tu.kids) {
      if (!first) out_ += '\n';
      first = false;
      switch (item->kind) {
        case NodeKind::FunctionDef: function_def(*item); break;
        case NodeKind::CommentStmt: raw_line(0, item->text); break;
        case NodeKind::OpaqueStmt: raw_line(0, item->text); break;
        default: stmt(*item, 0); break;
      }
    }
    return out_;
  }

  std::string expr_str(const Node& e) {
    std::string saved;
    saved.swap(out_);
    expr(e, 0);
    std::string result;
    result.swap(out_);
    out_.swap(saved);
    return result;
  }

 private:
  std::string out_;

  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 4, ' '); }

  void line(int depth, const std::string& s) {
    indent(depth);
    out_ += s;
    out_ += '\n';
  }

  // verbatim text may already carry its own terminator
  void raw_line(int depth, const std::string& s) {
    indent(depth);
    out_ += s;
    if (s.empty() || s.back() != '\n') out_ += '\n';
  }

  void function_def(const Node& fn) {
    std::string sig = fn.aux + " " + fn.text + "(";
    bool first = true;
    for (std::size_t i = 0; i + 1 < fn.kids.size(); ++i) {
      const Node& p = *fn.kids[i];
      if (!first) sig += ", ";
      first = false;
      sig += p.aux + " " + p.text;
    }
    sig += ") {";
    line(0, sig);
    block_body(*fn.kids.back(), 1);
    line(0, "}");
  }

  void block_body(const Node& comp, int depth) {
    for (const auto& s : comp.kids) stmt(*s, depth);
  }

  std::string decl_text(const Node& decl) {
    std::string s = decl.aux + " ";
    bool first = true;
    for (const auto& d : decl.kids) {
      if (!first) s += ", ";
      first = false;
      s += d->text;
      if (!d->kids.empty()) {
        s += " = ";
        s += expr_str(*d->kids[0]);
      }
    }
    return s;
  }

  void stmt(const Node& n, int depth) {
    switch (n.kind) {
      case NodeKind::CompoundStmt:
        line(depth, "{");
        block_body(n, depth + 1);
        line(depth, "}");
        break;
      case NodeKind::DeclStmt:
        line(depth, decl_text(n) + ";");
        break;
      case NodeKind::ExprStmt:
        line(depth, expr_str(*n.kids[0]) + ";");
        break;
      case NodeKind::IfStmt:
        if_chain(n, depth);
        break;
      case NodeKind::ForStmt: {
        std::string head = "for (";
        const Node& init = *n.kids[0];
        if (init.kind == NodeKind::DeclStmt) head += decl_text(init);
        else if (init.kind != NodeKind::Empty) head += expr_str(init);
        head += "; ";
        if (n.kids[1]->kind != NodeKind::Empty) head += expr_str(*n.kids[1]);
        head += "; ";
        if (n.kids[2]->kind != NodeKind::Empty) head += expr_str(*n.kids[2]);
        head += ") {";
        line(depth, head);
        block_body(*n.kids[3], depth + 1);
        line(depth, "}");
        break;
      }
      case NodeKind::WhileStmt:
        line(depth, "while (" + expr_str(*n.kids[0]) + ") {");
        block_body(*n.kids[1], depth + 1);
        line(depth, "}");
        break;
      case NodeKind::DoStmt:
        line(depth, "do {");
        block_body(*n.kids[0], depth + 1);
        line(depth, "} while (" + expr_str(*n.kids[1]) + ");");
        break;
      case NodeKind::SwitchStmt:
        line(depth, "switch (" + expr_str(*n.kids[0]) + ") {");
        for (std::size_t i = 1; i < n.kids.size(); ++i) {
          const Node& clause = *n.kids[i];
          if (clause.aux == "default") line(depth, "default:");
          else line(depth, "case " + std::to_string(clause.ival) + ":");
          for (const auto& s : clause.kids) stmt(*s, depth + 1);
        }
        line(depth, "}");
        break;
      case NodeKind::ReturnStmt:
        line(depth, n.kids.empty() ? "return;" : "return " + expr_str(*n.kids[0]) + ";");
        break;
      case NodeKind::BreakStmt:
        line(depth, "break;");
        break;
      case NodeKind::ContinueStmt:
        line(depth, "continue;");
        break;
      case NodeKind::CommentStmt:
        raw_line(depth, n.text);
        break;
      case NodeKind::OpaqueStmt:
        raw_line(depth, n.text);
        break;
      default:
        assert(false && "not a statement");
        break;
    }
  }

  // else-if chains print flat.
  void if_chain(const Node& n, int depth) {
    const Node* cur = &n;
    indent(depth);
    while (true) {
      out_ += "if (";
      expr(*cur->kids[0], 0);
      out_ += ") {\n";
      block_body(*cur->kids[1], depth + 1);
      indent(depth);
      out_ += "}";
      if (cur->kids.size() < 3) break;
      const Node& els = *cur->kids[2];
      if (els.kind == NodeKind::IfStmt) {
        out_ += " else ";
        cur = &els;
        continue;
      }
      out_ += " else {\n";
      block_body(els, depth + 1);
      indent(depth);
      out_ += "}";
      break;
    }
    out_ += '\n';
  }

  void expr(const Node& e, int min_prec) {
    int prec = op_prec(e);
    bool parens = prec < min_prec;
    if (parens) out_ += '(';
    switch (e.kind) {
      case NodeKind::BinaryExpr:
        expr(*e.kids[0], prec);
        out_ += ' ';
        out_ += e.text;
        out_ += ' ';
        expr(*e.kids[1], prec + 1);
        break;
      case NodeKind::AssignExpr:
        expr(*e.kids[0], prec + 1);
        out_ += ' ';
        out_ += e.text;
        out_ += ' ';
        expr(*e.kids[1], prec);
        break;
      case NodeKind::UnaryExpr: {
        out_ += e.text;
        const Node& operand = *e.kids[0];
        // keep -(-x) and -(--x) from fusing into one token
        bool force = (e.text != "!") && (operand.kind == NodeKind::UnaryExpr ||
                                         operand.kind == NodeKind::IncDecExpr);
        if (force) {
          out_ += '(';
          expr(operand, 0);
          out_ += ')';
        } else {
          expr(operand, prec);
        }
        break;
      }
      case NodeKind::IncDecExpr:
        if (e.ival) {
          out_ += e.text;
          expr(*e.kids[0], 9);
        } else {
          expr(*e.kids[0], 9);
          out_ += e.text;
        }
        break;
      case NodeKind::CallExpr: {
        out_ += e.text;
        out_ += '(';
        bool first = true;
        for (const auto& a : e.kids) {
          if (!first) out_ += ", ";
          first = false;
          expr(*a, 0);
        }
        out_ += ')';
        break;
      }
      case NodeKind::IdentExpr:
        out_ += e.text;
        break;
      case NodeKind::IntLit:
        out_ += std::to_string(e.ival);
        break;
      case NodeKind::StrLit:
        out_ += e.text;
        break;
      default:
        assert(false && "not an expression");
        break;
    }
    if (parens) out_ += ')';
  }
};

}  // namespace

std::string print(const Ast& ast) { return Printer().run(ast); }

std::string print_expr(const Node& e) { return Printer().expr_str(e); }

}  // namespace codefit::lang
