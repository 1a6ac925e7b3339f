#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "codefit/ast.hpp"

namespace codefit::lang {

/// Name binding over a numbered Ast. `binding` maps each IdentExpr node id
/// (and CallExpr node id, for calls to user functions) to the node id of the
/// Declarator/ParamDecl/FunctionDef that declares it; unresolved names are
/// absent and count as free.
struct ResolveResult {
  std::unordered_map<int, int> binding;
  std::vector<int> decl_ids;  // declaration nodes in document order

  bool is_free(int ident_id) const { return binding.find(ident_id) == binding.end(); }
};

ResolveResult resolve(const Ast& ast);

/// Every identifier-shaped word occurring anywhere in the tree, including
/// inside opaque/comment text. Used for capture-avoiding fresh names.
std::set<std::string> all_identifier_words(const Node& root);

/// True when evaluating the expression cannot write state or produce output
/// (no assignments, increments or calls anywhere inside).
bool is_pure_expr(const Node& expr);

}  // namespace codefit::lang
