#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace codefit::lang {

// One homogeneous node type keeps the 15 rewrite operators generic: clone,
// walk and structural comparison never need per-kind code.
//
// Child layout conventions by kind:
//   TranslationUnit  items (FunctionDef | CommentStmt | OpaqueStmt)
//   FunctionDef      text=name, aux=return type; kids=[ParamDecl..., CompoundStmt]
//   ParamDecl        text=name, aux=type
//   CompoundStmt     statements
//   DeclStmt         aux=type; kids=Declarator...
//   Declarator       text=name; kids=[init-expr]? (0 or 1)
//   ExprStmt         kids=[expr]
//   IfStmt           kids=[cond, then(CompoundStmt), else(CompoundStmt|IfStmt)]? (2 or 3)
//   ForStmt          kids=[init(DeclStmt|expr|Empty), cond(expr|Empty), step(expr|Empty), body]
//   WhileStmt        kids=[cond, body]
//   DoStmt           kids=[body, cond]
//   SwitchStmt       kids=[cond, CaseClause...]
//   CaseClause       ival=case value (ignored for default), aux="default"|"case"; kids=stmts
//   ReturnStmt       kids=[expr]? (0 or 1)
//   BreakStmt / ContinueStmt   no kids
//   CommentStmt      text=comment lexeme (delimiters included)
//   OpaqueStmt       text=raw source text, emitted verbatim
//   BinaryExpr       text=op; kids=[lhs, rhs]
//   AssignExpr       text=op (= += -= *= /= %=); kids=[target(IdentExpr), value]
//   UnaryExpr        text=op (+ - !); kids=[operand]
//   IncDecExpr       text=op (++ --), ival=1 when prefix; kids=[target(IdentExpr)]
//   CallExpr         text=callee; kids=args
//   IdentExpr        text=name
//   IntLit           ival=value
//   StrLit           text=raw quoted lexeme
//   Empty            placeholder for absent for-loop slots
enum class NodeKind {
  TranslationUnit,
  FunctionDef,
  ParamDecl,
  CompoundStmt,
  DeclStmt,
  Declarator,
  ExprStmt,
  IfStmt,
  ForStmt,
  WhileStmt,
  DoStmt,
  SwitchStmt,
  CaseClause,
  ReturnStmt,
  BreakStmt,
  ContinueStmt,
  CommentStmt,
  OpaqueStmt,
  BinaryExpr,
  AssignExpr,
  UnaryExpr,
  IncDecExpr,
  CallExpr,
  IdentExpr,
  IntLit,
  StrLit,
  Empty,
};

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
  NodeKind kind;
  std::string text;
  std::string aux;
  long long ival = 0;
  std::vector<NodePtr> kids;
  int id = -1;  // pre-order index, assigned by Ast::renumber

  explicit Node(NodeKind k) : kind(k) {}
  NodePtr clone() const;
};

NodePtr make_node(NodeKind kind);
NodePtr make_ident(std::string name);
NodePtr make_int(long long value);
NodePtr make_binary(std::string op, NodePtr lhs, NodePtr rhs);
NodePtr make_assign(std::string op, NodePtr target, NodePtr value);
NodePtr make_compound(std::vector<NodePtr> stmts);

bool is_stmt_kind(NodeKind k);
bool is_expr_kind(NodeKind k);

/// id field excluded; IntLit compares by value, everything else by payload.
bool structurally_equal(const Node& a, const Node& b);

class Ast {
 public:
  Ast() = default;
  explicit Ast(NodePtr root) : root_(std::move(root)) { renumber(); }
  Ast(Ast&&) = default;
  Ast& operator=(Ast&&) = default;

  Ast clone() const { return Ast(root_ ? root_->clone() : nullptr); }

  const Node& root() const { return *root_; }
  Node& mutable_root() { return *root_; }
  bool empty() const { return root_ == nullptr || root_->kids.empty(); }

  /// Reassigns ids by pre-order traversal and rebuilds the id index.
  void renumber();

  int node_count() const { return static_cast<int>(index_.size()); }
  const Node* node(int id) const {
    return (id >= 0 && id < static_cast<int>(index_.size())) ? index_[id] : nullptr;
  }
  Node* node(int id) {
    return (id >= 0 && id < static_cast<int>(index_.size())) ? index_[id] : nullptr;
  }

 private:
  NodePtr root_;
  std::vector<Node*> index_;
};

bool structurally_equal(const Ast& a, const Ast& b);

/// Pre-order walk; callback returns false to skip the node's children.
template <typename Fn>
void walk(const Node& node, Fn&& fn) {
  if (!fn(node)) return;
  for (const auto& kid : node.kids) walk(*kid, fn);
}

template <typename Fn>
void walk(Node& node, Fn&& fn) {
  if (!fn(node)) return;
  for (auto& kid : node.kids) walk(*kid, fn);
}

/// One parsed corpus sample. Move-only; duplicate explicitly.
struct SourceUnit {
  std::string id;
  Ast ast;
  std::string original_text;
  std::optional<int> label;  // ground-truth class, in [0, num_classes)
};

inline SourceUnit clone_unit(const SourceUnit& u) {
  SourceUnit out;
  out.id = u.id;
  out.ast = u.ast.clone();
  out.original_text = u.original_text;
  out.label = u.label;
  return out;
}

}  // namespace codefit::lang
