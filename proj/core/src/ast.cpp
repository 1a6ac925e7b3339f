#include "codefit/ast.hpp"

namespace codefit::lang {

NodePtr Node::clone() const {
  auto copy = std::make_unique<Node>(kind);
  copy->text = text;
  copy->aux = aux;
  copy->ival = ival;
  copy->kids.reserve(kids.size());
  for (const auto& kid : kids) copy->kids.push_back(kid->clone());
  return copy;
}

NodePtr make_node(NodeKind kind) { return std::make_unique<Node>(kind); }

NodePtr make_ident(std::string name) {
  auto n = make_node(NodeKind::IdentExpr);
  n->text = std::move(name);
  return n;
}

NodePtr make_int(long long value) {
  auto n = make_node(NodeKind::IntLit);
  n->ival = value;
  return n;
}

NodePtr make_binary(std::string op, NodePtr lhs, NodePtr rhs) {
  auto n = make_node(NodeKind::BinaryExpr);
  n->text = std::move(op);
  n->kids.push_back(std::move(lhs));
  n->kids.push_back(std::move(rhs));
  return n;
}

NodePtr make_assign(std::string op, NodePtr target, NodePtr value) {
  auto n = make_node(NodeKind::AssignExpr);
  n->text = std::move(op);
  n->kids.push_back(std::move(target));
  n->kids.push_back(std::move(value));
  return n;
}

NodePtr make_compound(std::vector<NodePtr> stmts) {
  auto n = make_node(NodeKind::CompoundStmt);
  n->kids = std::move(stmts);
  return n;
}

bool is_stmt_kind(NodeKind k) {
  switch (k) {
    case NodeKind::CompoundStmt:
    case NodeKind::DeclStmt:
    case NodeKind::ExprStmt:
    case NodeKind::IfStmt:
    case NodeKind::ForStmt:
    case NodeKind::WhileStmt:
    case NodeKind::DoStmt:
    case NodeKind::SwitchStmt:
    case NodeKind::ReturnStmt:
    case NodeKind::BreakStmt:
    case NodeKind::ContinueStmt:
    case NodeKind::CommentStmt:
    case NodeKind::OpaqueStmt:
      return true;
    default:
      return false;
  }
}

bool is_expr_kind(NodeKind k) {
  switch (k) {
    case NodeKind::BinaryExpr:
    case NodeKind::AssignExpr:
    case NodeKind::UnaryExpr:
    case NodeKind::IncDecExpr:
    case NodeKind::CallExpr:
    case NodeKind::IdentExpr:
    case NodeKind::IntLit:
    case NodeKind::StrLit:
      return true;
    default:
      return false;
  }
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.text != b.text || a.aux != b.aux || a.ival != b.ival) return false;
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

bool structurally_equal(const Ast& a, const Ast& b) {
  return structurally_equal(a.root(), b.root());
}

void Ast::renumber() {
  index_.clear();
  if (!root_) return;
  walk(*root_, [this](Node& n) {
    n.id = static_cast<int>(index_.size());
    index_.push_back(&n);
    return true;
  });
}

}  // namespace codefit::lang
