#include "codefit/resolve.hpp"

#include <cctype>

namespace codefit::lang {

namespace {

class Resolver {
 public:
  explicit Resolver(ResolveResult& out) : out_(out) {}

  void run(const Node& tu) {
    push_scope();
    // functions are visible file-wide (forward calls allowed)
    for (const auto& item : tu.kids)
      if (item->kind == NodeKind::FunctionDef) declare(item->text, item->id);
    for (const auto& item : tu.kids)
      if (item->kind == NodeKind::FunctionDef) function(*item);
    pop_scope();
  }

 private:
  ResolveResult& out_;
  std::vector<std::vector<std::pair<std::string, int>>> scopes_;

  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }

  void declare(const std::string& name, int decl_id) {
    scopes_.back().emplace_back(name, decl_id);
    out_.decl_ids.push_back(decl_id);
  }

  int lookup(const std::string& name) const {
    for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope)
      for (auto it = scope->rbegin(); it != scope->rend(); ++it)
        if (it->first == name) return it->second;
    return -1;
  }

  void function(const Node& fn) {
    push_scope();
    for (std::size_t i = 0; i + 1 < fn.kids.size(); ++i)
      declare(fn.kids[i]->text, fn.kids[i]->id);
    block(*fn.kids.back());
    pop_scope();
  }

  void block(const Node& comp) {
    push_scope();
    for (const auto& s : comp.kids) stmt(*s);
    pop_scope();
  }

  void decl_stmt(const Node& decl) {
    for (const auto& d : decl.kids) {
      // initializer sees only earlier names
      if (!d->kids.empty()) expr(*d->kids[0]);
      declare(d->text, d->id);
    }
  }

  void stmt(const Node& n) {
    switch (n.kind) {
      case NodeKind::CompoundStmt: block(n); break;
      case NodeKind::DeclStmt: decl_stmt(n); break;
      case NodeKind::ExprStmt: expr(*n.kids[0]); break;
      case NodeKind::IfStmt:
        expr(*n.kids[0]);
        stmt(*n.kids[1]);
        if (n.kids.size() > 2) stmt(*n.kids[2]);
        break;
      case NodeKind::ForStmt:
        push_scope();  // a for-init declaration scopes over the whole loop
        if (n.kids[0]->kind == NodeKind::DeclStmt) decl_stmt(*n.kids[0]);
        else if (n.kids[0]->kind != NodeKind::Empty) expr(*n.kids[0]);
        if (n.kids[1]->kind != NodeKind::Empty) expr(*n.kids[1]);
        if (n.kids[2]->kind != NodeKind::Empty) expr(*n.kids[2]);
        stmt(*n.kids[3]);
        pop_scope();
        break;
      case NodeKind::WhileStmt:
        expr(*n.kids[0]);
        stmt(*n.kids[1]);
        break;
      case NodeKind::DoStmt:
        stmt(*n.kids[0]);
        expr(*n.kids[1]);
        break;
      case NodeKind::SwitchStmt:
        expr(*n.kids[0]);
        for (std::size_t i = 1; i < n.kids.size(); ++i)
          for (const auto& s : n.kids[i]->kids) stmt(*s);
        break;
      case NodeKind::ReturnStmt:
        if (!n.kids.empty()) expr(*n.kids[0]);
        break;
      default:
        break;  // break/continue/comment/opaque bind nothing
    }
  }

  void expr(const Node& e) {
    switch (e.kind) {
      case NodeKind::IdentExpr: {
        int decl = lookup(e.text);
        if (decl >= 0) out_.binding[e.id] = decl;
        break;
      }
      case NodeKind::CallExpr: {
        int decl = lookup(e.text);
        if (decl >= 0) out_.binding[e.id] = decl;
        for (const auto& a : e.kids) expr(*a);
        break;
      }
      default:
        for (const auto& k : e.kids) expr(*k);
        break;
    }
  }
};

void scan_words(const std::string& text, std::set<std::string>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
      out.insert(text.substr(b, i - b));
    } else {
      ++i;
    }
  }
}

}  // namespace

ResolveResult resolve(const Ast& ast) {
  ResolveResult out;
  Resolver(out).run(ast.root());
  return out;
}

std::set<std::string> all_identifier_words(const Node& root) {
  std::set<std::string> words;
  walk(root, [&](const Node& n) {
    switch (n.kind) {
      case NodeKind::IdentExpr:
      case NodeKind::CallExpr:
      case NodeKind::Declarator:
      case NodeKind::ParamDecl:
      case NodeKind::FunctionDef:
        words.insert(n.text);
        break;
      case NodeKind::OpaqueStmt:
      case NodeKind::CommentStmt:
      case NodeKind::StrLit:
        scan_words(n.text, words);
        break;
      default:
        break;
    }
    return true;
  });
  return words;
}

bool is_pure_expr(const Node& e) {
  bool pure = true;
  walk(e, [&](const Node& n) {
    if (n.kind == NodeKind::AssignExpr || n.kind == NodeKind::IncDecExpr ||
        n.kind == NodeKind::CallExpr)
      pure = false;
    return pure;
  });
  return pure;
}

}  // namespace codefit::lang
