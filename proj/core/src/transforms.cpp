#include "codefit/transforms.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "codefit/interp.hpp"
#include "codefit/printer.hpp"
#include "codefit/resolve.hpp"
#include "codefit/rng.hpp"

namespace codefit::transforms {

using lang::Ast;
using lang::is_expr_kind;
using lang::make_assign;
using lang::make_binary;
using lang::make_compound;
using lang::make_ident;
using lang::make_int;
using lang::make_node;
using lang::Node;
using lang::NodeKind;
using lang::NodePtr;

namespace {

constexpr std::array<const char*, 15> kOpNames = {
    "changeName",     "changeFor",      "changeWhile",        "changeDo",
    "changeIfElseIf", "changeIf",       "changeSwitch",       "changeRelation",
    "changeUnary",    "changeIncrement", "changeConstant",    "changeDefine",
    "changeAddJunk",  "changeExchangeCode", "changeDeleteComments"};

// ---------------------------------------------------------------------------
// shared walking helpers

// Applies fn to every statement slot, children first (bottom-up), so a
// replacement never gets re-visited within the same pass.
class StmtRewriter {
 public:
  using Fn = std::function<NodePtr(NodePtr)>;
  explicit StmtRewriter(Fn fn) : fn_(std::move(fn)) {}

  void run(Node& tu) {
    for (auto& item : tu.kids)
      if (item->kind == NodeKind::FunctionDef) slot(item->kids.back());
  }

 private:
  Fn fn_;

  void slot(NodePtr& s) {
    children(*s);
    s = fn_(std::move(s));
  }

  void children(Node& s) {
    switch (s.kind) {
      case NodeKind::CompoundStmt:
        for (auto& k : s.kids) slot(k);
        break;
      case NodeKind::IfStmt:
        slot(s.kids[1]);
        if (s.kids.size() > 2) slot(s.kids[2]);
        break;
      case NodeKind::ForStmt:
        slot(s.kids[3]);
        break;
      case NodeKind::WhileStmt:
        slot(s.kids[1]);
        break;
      case NodeKind::DoStmt:
        slot(s.kids[0]);
        break;
      case NodeKind::SwitchStmt:
        for (std::size_t i = 1; i < s.kids.size(); ++i)
          for (auto& k : s.kids[i]->kids) slot(k);
        break;
      default:
        break;
    }
  }
};

// Applies fn to every expression slot, children first.
class ExprRewriter {
 public:
  using Fn = std::function<NodePtr(NodePtr)>;
  explicit ExprRewriter(Fn fn) : fn_(std::move(fn)) {}

  void run(Node& n) {
    for (auto& k : n.kids) {
      if (is_expr_kind(k->kind)) expr_slot(k);
      else run(*k);
    }
  }

 private:
  Fn fn_;

  void expr_slot(NodePtr& e) {
    for (auto& k : e->kids)
      if (is_expr_kind(k->kind)) expr_slot(k);
    e = fn_(std::move(e));
  }
};

// Every node owning a statement list: CompoundStmt and CaseClause kids, plus
// the translation unit itself (top-level comments/opaque items).
void for_each_stmt_list(Node& n, const std::function<void(Node&)>& fn) {
  if (n.kind == NodeKind::TranslationUnit || n.kind == NodeKind::CompoundStmt ||
      n.kind == NodeKind::CaseClause)
    fn(n);
  for (auto& k : n.kids) for_each_stmt_list(*k, fn);
}

std::vector<int> collect_ids(const Ast& ast, const std::function<bool(const Node&)>& pred) {
  std::vector<int> out;
  lang::walk(ast.root(), [&](const Node& n) {
    if (pred(n)) out.push_back(n.id);
    return true;
  });
  return out;
}

// Deterministic capture-avoiding names: base1, base2, ... skipping anything
// that already occurs anywhere in the program.
class FreshNames {
 public:
  FreshNames(const Node& root, std::string base, std::uint64_t seed)
      : avoid_(lang::all_identifier_words(root)), base_(std::move(base)), counter_(seed % 100) {}

  std::string next() {
    std::string name;
    do {
      name = base_ + std::to_string(++counter_);
    } while (avoid_.count(name));
    avoid_.insert(name);
    return name;
  }

 private:
  std::set<std::string> avoid_;
  std::string base_;
  std::uint64_t counter_;
};

// ---------------------------------------------------------------------------
// op 1: changeName

struct RenameOccurrence {
  int node_id;
  int decl_id;
};

bool renameable_decl(const Node& n) {
  switch (n.kind) {
    case NodeKind::FunctionDef:
      // entry points stay addressable from outside the unit
      return n.text != "main" && n.text != interp::kEntryFunction;
    case NodeKind::ParamDecl:
    case NodeKind::Declarator: return true;
    default: return false;
  }
}

std::vector<RenameOccurrence> rename_occurrences(const Ast& ast) {
  lang::ResolveResult res = lang::resolve(ast);
  std::set<int> renamed;
  for (int id : res.decl_ids)
    if (renameable_decl(*ast.node(id))) renamed.insert(id);
  std::vector<RenameOccurrence> occ;
  lang::walk(ast.root(), [&](const Node& n) {
    if (renameable_decl(n) && renamed.count(n.id)) {
      occ.push_back({n.id, n.id});
    } else if (n.kind == NodeKind::IdentExpr || n.kind == NodeKind::CallExpr) {
      auto it = res.binding.find(n.id);
      if (it != res.binding.end() && renamed.count(it->second))
        occ.push_back({n.id, it->second});
    }
    return true;
  });
  return occ;
}

int rewrite_rename(Ast& ast, std::uint64_t seed) {
  auto occ = rename_occurrences(ast);
  if (occ.empty()) return 0;
  FreshNames fresh(ast.root(), "v", seed);
  std::map<int, std::string> new_names;  // decl id -> fresh, in document order
  for (const auto& o : occ)
    if (o.node_id == o.decl_id) new_names.emplace(o.decl_id, "");
  for (auto& [decl_id, name] : new_names) name = fresh.next();
  for (const auto& o : occ) ast.node(o.node_id)->text = new_names.at(o.decl_id);
  return static_cast<int>(occ.size());
}

// ---------------------------------------------------------------------------
// op 2: changeFor

// Rewrites continues that bind to the loop being converted; nested loops own
// their continues, so recursion stops there.
void splice_step_before_continue(std::vector<NodePtr>& stmts, const Node& step) {
  for (auto& s : stmts) {
    switch (s->kind) {
      case NodeKind::ContinueStmt: {
        std::vector<NodePtr> pair;
        auto step_stmt = make_node(NodeKind::ExprStmt);
        step_stmt->kids.push_back(step.clone());
        pair.push_back(std::move(step_stmt));
        pair.push_back(std::move(s));
        s = make_compound(std::move(pair));
        break;
      }
      case NodeKind::CompoundStmt:
        splice_step_before_continue(s->kids, step);
        break;
      case NodeKind::IfStmt:
        splice_step_before_continue(s->kids[1]->kids, step);
        if (s->kids.size() > 2) {
          if (s->kids[2]->kind == NodeKind::IfStmt) {
            std::vector<NodePtr> tmp;
            tmp.push_back(std::move(s->kids[2]));
            splice_step_before_continue(tmp, step);
            s->kids[2] = std::move(tmp[0]);
          } else {
            splice_step_before_continue(s->kids[2]->kids, step);
          }
        }
        break;
      case NodeKind::SwitchStmt:
        for (std::size_t i = 1; i < s->kids.size(); ++i)
          splice_step_before_continue(s->kids[i]->kids, step);
        break;
      default:
        break;  // nested for/while/do capture their own continues
    }
  }
}

NodePtr for_to_while(NodePtr for_stmt) {
  NodePtr init = std::move(for_stmt->kids[0]);
  NodePtr cond = std::move(for_stmt->kids[1]);
  NodePtr step = std::move(for_stmt->kids[2]);
  NodePtr body = std::move(for_stmt->kids[3]);

  if (step->kind != NodeKind::Empty) {
    splice_step_before_continue(body->kids, *step);
    auto step_stmt = make_node(NodeKind::ExprStmt);
    step_stmt->kids.push_back(std::move(step));
    body->kids.push_back(std::move(step_stmt));
  }

  auto loop = make_node(NodeKind::WhileStmt);
  loop->kids.push_back(cond->kind == NodeKind::Empty ? make_int(1) : std::move(cond));
  loop->kids.push_back(std::move(body));

  std::vector<NodePtr> wrapper;
  if (init->kind == NodeKind::DeclStmt) {
    wrapper.push_back(std::move(init));
  } else if (init->kind != NodeKind::Empty) {
    auto init_stmt = make_node(NodeKind::ExprStmt);
    init_stmt->kids.push_back(std::move(init));
    wrapper.push_back(std::move(init_stmt));
  }
  wrapper.push_back(std::move(loop));
  return make_compound(std::move(wrapper));
}

// ---------------------------------------------------------------------------
// op 4: changeDo

NodePtr do_to_while(NodePtr do_stmt, FreshNames& fresh) {
  std::string flag = fresh.next();
  NodePtr body = std::move(do_stmt->kids[0]);
  NodePtr cond = std::move(do_stmt->kids[1]);

  auto decl = make_node(NodeKind::DeclStmt);
  decl->aux = "int";
  auto d = make_node(NodeKind::Declarator);
  d->text = flag;
  d->kids.push_back(make_int(1));
  decl->kids.push_back(std::move(d));

  auto clear_flag = make_node(NodeKind::ExprStmt);
  clear_flag->kids.push_back(make_assign("=", make_ident(flag), make_int(0)));

  std::vector<NodePtr> loop_body;
  loop_body.push_back(std::move(clear_flag));
  loop_body.push_back(std::move(body));

  auto loop = make_node(NodeKind::WhileStmt);
  loop->kids.push_back(make_binary("||", make_ident(flag), std::move(cond)));
  loop->kids.push_back(make_compound(std::move(loop_body)));

  std::vector<NodePtr> wrapper;
  wrapper.push_back(std::move(decl));
  wrapper.push_back(std::move(loop));
  return make_compound(std::move(wrapper));
}

// ---------------------------------------------------------------------------
// op 7: changeSwitch

// True when s (a clause statement that is not a direct break) contains a
// break binding to the enclosing switch.
bool contains_bound_break(const Node& s) {
  switch (s.kind) {
    case NodeKind::BreakStmt:
      return true;
    case NodeKind::ForStmt:
    case NodeKind::WhileStmt:
    case NodeKind::DoStmt:
    case NodeKind::SwitchStmt:
      return false;  // inner construct owns its breaks
    default:
      for (const auto& k : s.kids)
        if (contains_bound_break(*k)) return true;
      return false;
  }
}

// Convertible switches only break at clause top level; a break buried in an
// if would have no equivalent in the if-chain form.
bool switch_convertible(const Node& sw) {
  for (std::size_t i = 1; i < sw.kids.size(); ++i) {
    for (const auto& s : sw.kids[i]->kids) {
      if (s->kind == NodeKind::BreakStmt) continue;
      if (contains_bound_break(*s)) return false;
    }
  }
  return true;
}

// Statements executed when entering at clause `from`: fall through until a
// top-level break.
std::vector<NodePtr> switch_arm(const Node& sw, std::size_t from) {
  std::vector<NodePtr> arm;
  for (std::size_t i = from; i < sw.kids.size(); ++i) {
    for (const auto& s : sw.kids[i]->kids) {
      if (s->kind == NodeKind::BreakStmt) return arm;
      arm.push_back(s->clone());
    }
  }
  return arm;
}

NodePtr switch_to_if_chain(NodePtr sw, FreshNames& fresh) {
  std::string sel = fresh.next();

  auto decl = make_node(NodeKind::DeclStmt);
  decl->aux = "int";
  auto d = make_node(NodeKind::Declarator);
  d->text = sel;
  d->kids.push_back(std::move(sw->kids[0]));
  decl->kids.push_back(std::move(d));

  struct Case {
    long long value;
    std::vector<NodePtr> arm;
  };
  std::vector<Case> cases;
  std::optional<std::vector<NodePtr>> default_arm;
  for (std::size_t i = 1; i < sw->kids.size(); ++i) {
    const Node& clause = *sw->kids[i];
    if (clause.aux == "default") default_arm = switch_arm(*sw, i);
    else cases.push_back({clause.ival, switch_arm(*sw, i)});
  }

  NodePtr chain;
  if (default_arm) chain = make_compound(std::move(*default_arm));
  for (auto it = cases.rbegin(); it != cases.rend(); ++it) {
    auto node = make_node(NodeKind::IfStmt);
    node->kids.push_back(make_binary("==", make_ident(sel), make_int(it->value)));
    node->kids.push_back(make_compound(std::move(it->arm)));
    if (chain) node->kids.push_back(std::move(chain));
    chain = std::move(node);
  }

  std::vector<NodePtr> wrapper;
  wrapper.push_back(std::move(decl));
  if (chain) wrapper.push_back(std::move(chain));
  return make_compound(std::move(wrapper));
}

// ---------------------------------------------------------------------------
// ops 8-11 helpers

bool relation_site(const Node& n) {
  if (n.kind != NodeKind::BinaryExpr) return false;
  const std::string& op = n.text;
  if (op != "<" && op != ">" && op != "<=" && op != ">=" && op != "==" && op != "!=")
    return false;
  // swapping reorders evaluation; forbid only when both sides have effects
  return lang::is_pure_expr(*n.kids[0]) || lang::is_pure_expr(*n.kids[1]);
}

std::string mirrored_relation(const std::string& op) {
  if (op == "<") return ">";
  if (op == ">") return "<";
  if (op == "<=") return ">=";
  if (op == ">=") return "<=";
  return op;  // == and != are symmetric
}

NodePtr incdec_to_assign(NodePtr e) {
  const std::string& name = e->kids[0]->text;
  return make_assign("=", make_ident(name),
                     make_binary(e->text == "++" ? "+" : "-", make_ident(name), make_int(1)));
}

NodePtr literal_offset_form(NodePtr lit) {
  if (lit->ival == 0) return make_binary("-", make_int(8), make_int(8));
  return make_binary("-", make_binary("+", std::move(lit), make_int(8)), make_int(8));
}

// ---------------------------------------------------------------------------
// op 12: changeDefine

bool define_site(const Node& decl) {
  bool any_init = false;
  std::vector<const std::string*> names;
  for (const auto& d : decl.kids) names.push_back(&d->text);
  for (std::size_t i = 0; i < decl.kids.size(); ++i) {
    const Node& d = *decl.kids[i];
    if (d.kids.empty()) continue;
    any_init = true;
    // splitting must not change what the initializer's names bind to:
    // referencing this or a later declarator would start resolving to the
    // freshly split (uninitialized) variable
    bool clash = false;
    lang::walk(*d.kids[0], [&](const Node& n) {
      if (n.kind == NodeKind::IdentExpr || n.kind == NodeKind::CallExpr)
        for (std::size_t j = i; j < names.size(); ++j)
          if (*names[j] == n.text) clash = true;
      return !clash;
    });
    if (clash) return false;
  }
  return any_init;
}

std::vector<NodePtr> split_define(NodePtr decl) {
  std::vector<NodePtr> out;
  std::vector<NodePtr> assigns;
  for (auto& d : decl->kids) {
    if (!d->kids.empty()) {
      auto stmt = make_node(NodeKind::ExprStmt);
      stmt->kids.push_back(make_assign("=", make_ident(d->text), std::move(d->kids[0])));
      assigns.push_back(std::move(stmt));
      d->kids.clear();
    }
  }
  out.push_back(std::move(decl));
  for (auto& a : assigns) out.push_back(std::move(a));
  return out;
}

// ---------------------------------------------------------------------------
// op 13: changeAddJunk

NodePtr make_junk(Rng& rng) {
  auto call = make_node(NodeKind::CallExpr);
  call->text = "printf";
  auto arg = make_node(NodeKind::StrLit);
  std::uint64_t variant = rng.below(3);
  arg->text = variant == 1 ? "\" \"" : "\"\"";
  call->kids.push_back(std::move(arg));
  auto stmt = make_node(NodeKind::ExprStmt);
  stmt->kids.push_back(std::move(call));

  auto guard = make_node(NodeKind::IfStmt);
  guard->kids.push_back(variant == 2 ? make_binary("-", make_int(8), make_int(8))
                                     : make_int(0));
  std::vector<NodePtr> body;
  body.push_back(std::move(stmt));
  guard->kids.push_back(make_compound(std::move(body)));
  return guard;
}

// ---------------------------------------------------------------------------
// op 14: changeExchangeCode

void decl_names(const Node& decl, std::set<std::string>& defs, std::set<std::string>& uses) {
  for (const auto& d : decl.kids) {
    defs.insert(d->text);
    if (!d->kids.empty())
      lang::walk(*d->kids[0], [&](const Node& n) {
        if (n.kind == NodeKind::IdentExpr || n.kind == NodeKind::CallExpr) uses.insert(n.text);
        return true;
      });
  }
}

bool swappable_pair(const Node& a, const Node& b) {
  if (a.kind != NodeKind::DeclStmt || b.kind != NodeKind::DeclStmt) return false;
  for (const auto& lists : {&a, &b})
    for (const auto& d : lists->kids)
      if (!d->kids.empty() && !lang::is_pure_expr(*d->kids[0])) return false;
  std::set<std::string> defs_a, uses_a, defs_b, uses_b;
  decl_names(a, defs_a, uses_a);
  decl_names(b, defs_b, uses_b);
  for (const auto& n : defs_a)
    if (defs_b.count(n) || uses_b.count(n)) return false;
  for (const auto& n : defs_b)
    if (uses_a.count(n)) return false;
  return true;
}

// Greedy left-to-right pairing of adjacent swappable declarations.
std::vector<std::size_t> swap_positions(const std::vector<NodePtr>& stmts) {
  std::vector<std::size_t> pos;
  std::size_t i = 0;
  while (i + 1 < stmts.size()) {
    if (swappable_pair(*stmts[i], *stmts[i + 1])) {
      pos.push_back(i);
      i += 2;
    } else {
      ++i;
    }
  }
  return pos;
}

// ---------------------------------------------------------------------------
// op 15: changeDeleteComments

bool debug_print_stmt(const Node& s) {
  if (s.kind != NodeKind::ExprStmt) return false;
  const Node& e = *s.kids[0];
  return e.kind == NodeKind::CallExpr && e.text == "printf" && e.kids.size() == 1 &&
         e.kids[0]->kind == NodeKind::StrLit;
}

bool delete_comment_site(const Node& n) {
  return n.kind == NodeKind::CommentStmt || debug_print_stmt(n);
}

// ---------------------------------------------------------------------------
// dispatch

std::vector<int> sites_for(const Ast& ast, const TransformOp& op) {
  switch (op.id) {
    case OpId::ChangeName: {
      std::vector<int> ids;
      for (const auto& o : rename_occurrences(ast)) ids.push_back(o.node_id);
      std::sort(ids.begin(), ids.end());
      return ids;
    }
    case OpId::ChangeFor:
      return collect_ids(ast, [](const Node& n) { return n.kind == NodeKind::ForStmt; });
    case OpId::ChangeWhile:
      return collect_ids(ast, [](const Node& n) { return n.kind == NodeKind::WhileStmt; });
    case OpId::ChangeDo:
      return collect_ids(ast, [](const Node& n) { return n.kind == NodeKind::DoStmt; });
    case OpId::ChangeIfElseIf:
      return collect_ids(ast, [](const Node& n) {
        return n.kind == NodeKind::IfStmt && n.kids.size() > 2 &&
               n.kids[2]->kind == NodeKind::IfStmt;
      });
    case OpId::ChangeIf:
      return collect_ids(ast, [](const Node& n) {
        return n.kind == NodeKind::IfStmt && n.kids.size() > 2 &&
               n.kids[2]->kind != NodeKind::IfStmt;
      });
    case OpId::ChangeSwitch:
      return collect_ids(ast, [](const Node& n) {
        return n.kind == NodeKind::SwitchStmt && switch_convertible(n);
      });
    case OpId::ChangeRelation:
      return collect_ids(ast, relation_site);
    case OpId::ChangeUnary: {
      std::vector<int> ids;
      lang::walk(ast.root(), [&](const Node& n) {
        if (n.kind == NodeKind::ExprStmt && n.kids[0]->kind == NodeKind::IncDecExpr)
          ids.push_back(n.kids[0]->id);
        if (n.kind == NodeKind::ForStmt) {
          if (n.kids[0]->kind == NodeKind::IncDecExpr) ids.push_back(n.kids[0]->id);
          if (n.kids[2]->kind == NodeKind::IncDecExpr) ids.push_back(n.kids[2]->id);
        }
        return true;
      });
      std::sort(ids.begin(), ids.end());
      return ids;
    }
    case OpId::ChangeIncrement:
      return collect_ids(ast, [](const Node& n) {
        return n.kind == NodeKind::AssignExpr && n.text != "=";
      });
    case OpId::ChangeConstant:
      return collect_ids(ast, [](const Node& n) { return n.kind == NodeKind::IntLit; });
    case OpId::ChangeDefine: {
      std::vector<int> ids;
      lang::walk(ast.root(), [&](const Node& n) {
        if (n.kind == NodeKind::CompoundStmt || n.kind == NodeKind::CaseClause)
          for (const auto& s : n.kids)
            if (s->kind == NodeKind::DeclStmt && define_site(*s)) ids.push_back(s->id);
        return true;
      });
      std::sort(ids.begin(), ids.end());
      return ids;
    }
    case OpId::ChangeAddJunk:
      return collect_ids(ast, [](const Node& n) { return n.kind == NodeKind::CompoundStmt; });
    case OpId::ChangeExchangeCode: {
      std::vector<int> ids;
      lang::walk(ast.root(), [&](const Node& n) {
        if (n.kind == NodeKind::CompoundStmt || n.kind == NodeKind::CaseClause)
          for (std::size_t p : swap_positions(n.kids)) ids.push_back(n.kids[p]->id);
        return true;
      });
      std::sort(ids.begin(), ids.end());
      return ids;
    }
    case OpId::ChangeDeleteComments:
      return collect_ids(ast, delete_comment_site);
  }
  return {};
}

int rewrite_for(Ast& ast, const TransformOp& op) {
  int count = 0;
  switch (op.id) {
    case OpId::ChangeName:
      return rewrite_rename(ast, op.rng_seed);
    case OpId::ChangeFor: {
      StmtRewriter rw([&](NodePtr s) {
        if (s->kind != NodeKind::ForStmt) return s;
        ++count;
        return for_to_while(std::move(s));
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeWhile: {
      StmtRewriter rw([&](NodePtr s) {
        if (s->kind != NodeKind::WhileStmt) return s;
        ++count;
        auto loop = make_node(NodeKind::ForStmt);
        loop->kids.push_back(make_node(NodeKind::Empty));
        loop->kids.push_back(std::move(s->kids[0]));
        loop->kids.push_back(make_node(NodeKind::Empty));
        loop->kids.push_back(std::move(s->kids[1]));
        return loop;
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeDo: {
      FreshNames fresh(ast.root(), "dw", op.rng_seed);
      StmtRewriter rw([&](NodePtr s) {
        if (s->kind != NodeKind::DoStmt) return s;
        ++count;
        return do_to_while(std::move(s), fresh);
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeIfElseIf: {
      StmtRewriter rw([&](NodePtr s) {
        if (s->kind == NodeKind::IfStmt && s->kids.size() > 2 &&
            s->kids[2]->kind == NodeKind::IfStmt) {
          ++count;
          std::vector<NodePtr> one;
          one.push_back(std::move(s->kids[2]));
          s->kids[2] = make_compound(std::move(one));
        }
        return s;
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeIf: {
      StmtRewriter rw([&](NodePtr s) {
        if (s->kind == NodeKind::IfStmt && s->kids.size() > 2 &&
            s->kids[2]->kind != NodeKind::IfStmt) {
          ++count;
          NodePtr guard;
          if (lang::is_pure_expr(*s->kids[0])) {
            guard = make_node(NodeKind::UnaryExpr);
            guard->text = "!";
            guard->kids.push_back(s->kids[0]->clone());
          } else {
            guard = make_int(1);  // condition has effects; re-evaluating would double them
          }
          auto arm = make_node(NodeKind::IfStmt);
          arm->kids.push_back(std::move(guard));
          arm->kids.push_back(std::move(s->kids[2]));
          s->kids[2] = std::move(arm);
        }
        return s;
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeSwitch: {
      FreshNames fresh(ast.root(), "sw", op.rng_seed);
      StmtRewriter rw([&](NodePtr s) {
        if (s->kind != NodeKind::SwitchStmt || !switch_convertible(*s)) return s;
        ++count;
        return switch_to_if_chain(std::move(s), fresh);
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeRelation: {
      ExprRewriter rw([&](NodePtr e) {
        if (!relation_site(*e)) return e;
        ++count;
        std::swap(e->kids[0], e->kids[1]);
        e->text = mirrored_relation(e->text);
        return e;
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeUnary: {
      auto rewrite_slot = [&](NodePtr& slot) {
        if (slot->kind == NodeKind::IncDecExpr) {
          ++count;
          slot = incdec_to_assign(std::move(slot));
        }
      };
      lang::walk(ast.mutable_root(), [&](Node& n) {
        if (n.kind == NodeKind::ExprStmt) rewrite_slot(n.kids[0]);
        if (n.kind == NodeKind::ForStmt) {
          rewrite_slot(n.kids[0]);
          rewrite_slot(n.kids[2]);
        }
        return true;
      });
      return count;
    }
    case OpId::ChangeIncrement: {
      ExprRewriter rw([&](NodePtr e) {
        if (e->kind != NodeKind::AssignExpr || e->text == "=") return e;
        ++count;
        std::string base_op(1, e->text[0]);
        const std::string& name = e->kids[0]->text;
        return make_assign("=", make_ident(name),
                           make_binary(base_op, make_ident(name), std::move(e->kids[1])));
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeConstant: {
      ExprRewriter rw([&](NodePtr e) {
        if (e->kind != NodeKind::IntLit) return e;
        ++count;
        return literal_offset_form(std::move(e));
      });
      rw.run(ast.mutable_root());
      return count;
    }
    case OpId::ChangeDefine: {
      for_each_stmt_list(ast.mutable_root(), [&](Node& owner) {
        std::vector<NodePtr> out;
        out.reserve(owner.kids.size());
        for (auto& s : owner.kids) {
          if (s->kind == NodeKind::DeclStmt && define_site(*s)) {
            ++count;
            for (auto& piece : split_define(std::move(s))) out.push_back(std::move(piece));
          } else {
            out.push_back(std::move(s));
          }
        }
        owner.kids = std::move(out);
      });
      return count;
    }
    case OpId::ChangeAddJunk: {
      std::vector<Node*> blocks;
      lang::walk(ast.mutable_root(), [&](Node& n) {
        if (n.kind == NodeKind::CompoundStmt) blocks.push_back(&n);
        return true;
      });
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        Rng rng(mix_seed(op.rng_seed, k));
        auto junk = make_junk(rng);
        std::size_t pos = rng.below(blocks[k]->kids.size() + 1);
        blocks[k]->kids.insert(blocks[k]->kids.begin() + static_cast<long>(pos),
                               std::move(junk));
        ++count;
      }
      return count;
    }
    case OpId::ChangeExchangeCode: {
      for_each_stmt_list(ast.mutable_root(), [&](Node& owner) {
        for (std::size_t p : swap_positions(owner.kids)) {
          std::swap(owner.kids[p], owner.kids[p + 1]);
          ++count;
        }
      });
      return count;
    }
    case OpId::ChangeDeleteComments: {
      for_each_stmt_list(ast.mutable_root(), [&](Node& owner) {
        std::vector<NodePtr> kept;
        kept.reserve(owner.kids.size());
        for (auto& s : owner.kids) {
          if (delete_comment_site(*s)) ++count;
          else kept.push_back(std::move(s));
        }
        owner.kids = std::move(kept);
      });
      return count;
    }
  }
  return count;
}

}  // namespace

const char* op_name(OpId id) { return kOpNames[static_cast<int>(id) - 1]; }

std::optional<OpId> op_from_name(std::string_view name) {
  for (int i = 0; i < kNumOps; ++i)
    if (name == kOpNames[i]) return static_cast<OpId>(i + 1);
  return std::nullopt;
}

std::optional<OpId> op_from_number(int number) {
  if (number < 1 || number > kNumOps) return std::nullopt;
  return static_cast<OpId>(number);
}

std::uint64_t content_hash(const Ast& ast) { return fnv1a64(lang::print(ast)); }

std::vector<int> enumerate_sites(const Ast& ast, const TransformOp& op) {
  return sites_for(ast, op);
}

std::pair<Ast, TransformRecord> apply(const Ast& ast, const TransformOp& op) {
  TransformRecord rec;
  rec.op = op;
  rec.before_hash = content_hash(ast);
  rec.sites_found = static_cast<int>(sites_for(ast, op).size());
  if (rec.sites_found == 0) {
    rec.after_hash = rec.before_hash;
    return {ast.clone(), rec};
  }
  Ast out = ast.clone();
  out.renumber();
  rec.sites_rewritten = rewrite_for(out, op);
  out.renumber();
  rec.after_hash = content_hash(out);
  return {std::move(out), rec};
}

std::pair<Ast, std::vector<TransformRecord>> apply_sequence(const Ast& ast,
                                                            const std::vector<TransformOp>& ops) {
  Ast current = ast.clone();
  current.renumber();
  std::vector<TransformRecord> records;
  records.reserve(ops.size());
  for (const auto& op : ops) {
    auto [next, rec] = apply(current, op);
    current = std::move(next);
    records.push_back(rec);
  }
  return {std::move(current), std::move(records)};
}

}  // namespace codefit::transforms
