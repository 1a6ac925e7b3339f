#include "codefit/interp.hpp"

#include <cstdint>
#include <unordered_map>

#include "codefit/parser.hpp"

namespace codefit::interp {

using lang::Ast;
using lang::Node;
using lang::NodeKind;

namespace {

constexpr int kMaxCallDepth = 400;

struct StepLimitSignal {};
struct RuntimeSignal {
  std::string message;
};

struct Value {
  long long num = 0;
  const Node* str = nullptr;  // set for string-literal values
  bool is_string() const { return str != nullptr; }
};

long long wrap_add(long long a, long long b) {
  return static_cast<long long>(static_cast<unsigned long long>(a) +
                                static_cast<unsigned long long>(b));
}
long long wrap_sub(long long a, long long b) {
  return static_cast<long long>(static_cast<unsigned long long>(a) -
                                static_cast<unsigned long long>(b));
}
long long wrap_mul(long long a, long long b) {
  return static_cast<long long>(static_cast<unsigned long long>(a) *
                                static_cast<unsigned long long>(b));
}
long long wrap_neg(long long a) {
  return static_cast<long long>(0ull - static_cast<unsigned long long>(a));
}

enum class Flow { Normal, Break, Continue, Return };

struct Slot {
  const std::string* name;
  std::optional<long long> value;
};

class Machine {
 public:
  Machine(const Ast& ast, long long limit) : limit_(limit) {
    lang::walk(ast.root(), [&](const Node& n) {
      if (n.kind == NodeKind::FunctionDef) functions_[n.text] = &n;
      return n.kind == NodeKind::TranslationUnit;
    });
  }

  ExecResult run(std::string_view entry, const std::vector<long long>& args) {
    ExecResult result;
    try {
      auto it = functions_.find(std::string(entry));
      if (it == functions_.end()) throw RuntimeSignal{"entry function not found"};
      Value v = call(*it->second, args);
      result.halted = Halt::Terminated;
      if (it->second->aux != "void") result.return_value = v.num;
    } catch (const StepLimitSignal&) {
      result.halted = Halt::StepLimit;
    } catch (const RuntimeSignal& sig) {
      result.halted = Halt::RuntimeError;
      result.error = sig.message;
    }
    result.stdout_text = std::move(out_);
    result.steps = steps_;
    return result;
  }

 private:
  std::unordered_map<std::string, const Node*> functions_;
  std::vector<std::vector<Slot>> scopes_;  // current frame only; frames nest via save/restore
  std::string out_;
  long long steps_ = 0;
  long long limit_;
  int depth_ = 0;
  long long return_value_ = 0;

  void step() {
    if (++steps_ > limit_) {
      steps_ = limit_;
      throw StepLimitSignal{};
    }
  }

  Slot* find(const std::string& name) {
    for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope)
      for (auto slot = scope->rbegin(); slot != scope->rend(); ++slot)
        if (*slot->name == name) return &*slot;
    return nullptr;
  }

  Value call(const Node& fn, const std::vector<long long>& args) {
    std::size_t nparams = fn.kids.size() - 1;
    if (args.size() != nparams) throw RuntimeSignal{"argument count mismatch"};
    if (++depth_ > kMaxCallDepth) throw RuntimeSignal{"call depth exceeded"};

    std::vector<std::vector<Slot>> saved;
    saved.swap(scopes_);
    scopes_.emplace_back();
    for (std::size_t i = 0; i < nparams; ++i)
      scopes_.back().push_back(Slot{&fn.kids[i]->text, args[i]});

    return_value_ = 0;
    Flow flow = exec_block(*fn.kids.back());
    Value out;
    out.num = (flow == Flow::Return) ? return_value_ : 0;

    scopes_.swap(saved);
    --depth_;
    return out;
  }

  Flow exec_block(const Node& comp) {
    scopes_.emplace_back();
    Flow flow = Flow::Normal;
    for (const auto& s : comp.kids) {
      flow = exec_stmt(*s);
      if (flow != Flow::Normal) break;
    }
    scopes_.pop_back();
    return flow;
  }

  Flow exec_stmt(const Node& n) {
    switch (n.kind) {
      case NodeKind::CommentStmt:
        return Flow::Normal;  // free
      case NodeKind::OpaqueStmt:
        step();
        throw RuntimeSignal{"unsupported construct executed"};
      case NodeKind::CompoundStmt:
        step();
        return exec_block(n);
      case NodeKind::DeclStmt: {
        step();
        for (const auto& d : n.kids) {
          std::optional<long long> init;
          if (!d->kids.empty()) init = eval_num(*d->kids[0]);
          scopes_.back().push_back(Slot{&d->text, init});
        }
        return Flow::Normal;
      }
      case NodeKind::ExprStmt:
        step();
        eval(*n.kids[0]);
        return Flow::Normal;
      case NodeKind::IfStmt: {
        step();
        if (eval_num(*n.kids[0]) != 0) return exec_stmt(*n.kids[1]);
        if (n.kids.size() > 2) return exec_stmt(*n.kids[2]);
        return Flow::Normal;
      }
      case NodeKind::WhileStmt: {
        step();
        while (eval_num(*n.kids[0]) != 0) {
          Flow flow = exec_stmt(*n.kids[1]);
          if (flow == Flow::Break) break;
          if (flow == Flow::Return) return flow;
        }
        return Flow::Normal;
      }
      case NodeKind::DoStmt: {
        step();
        do {
          Flow flow = exec_stmt(*n.kids[0]);
          if (flow == Flow::Break) break;
          if (flow == Flow::Return) return flow;
        } while (eval_num(*n.kids[1]) != 0);
        return Flow::Normal;
      }
      case NodeKind::ForStmt: {
        step();
        scopes_.emplace_back();  // for-init declarations live here
        Flow result = Flow::Normal;
        const Node& init = *n.kids[0];
        if (init.kind == NodeKind::DeclStmt) {
          exec_stmt(init);
        } else if (init.kind != NodeKind::Empty) {
          step();
          eval(init);
        }
        while (true) {
          if (n.kids[1]->kind != NodeKind::Empty && eval_num(*n.kids[1]) == 0) break;
          Flow flow = exec_stmt(*n.kids[3]);
          if (flow == Flow::Break) break;
          if (flow == Flow::Return) {
            result = flow;
            break;
          }
          if (n.kids[2]->kind != NodeKind::Empty) {
            step();
            eval(*n.kids[2]);
          }
        }
        scopes_.pop_back();
        return result;
      }
      case NodeKind::SwitchStmt: {
        step();
        long long sel = eval_num(*n.kids[0]);
        std::size_t begin = n.kids.size();  // first matching clause
        std::size_t default_at = n.kids.size();
        for (std::size_t i = 1; i < n.kids.size(); ++i) {
          const Node& clause = *n.kids[i];
          if (clause.aux == "default") {
            default_at = i;
          } else if (clause.ival == sel) {
            begin = i;
            break;
          }
        }
        if (begin == n.kids.size()) begin = default_at;
        scopes_.emplace_back();  // declarations inside the switch body
        Flow result = Flow::Normal;
        for (std::size_t i = begin; i < n.kids.size() && result == Flow::Normal; ++i) {
          for (const auto& s : n.kids[i]->kids) {
            Flow flow = exec_stmt(*s);
            if (flow == Flow::Break) {
              result = Flow::Normal;
              goto done;
            }
            if (flow != Flow::Normal) {
              result = flow;
              break;
            }
          }
        }
      done:
        scopes_.pop_back();
        return result;
      }
      case NodeKind::ReturnStmt:
        step();
        return_value_ = n.kids.empty() ? 0 : eval_num(*n.kids[0]);
        return Flow::Return;
      case NodeKind::BreakStmt:
        step();
        return Flow::Break;
      case NodeKind::ContinueStmt:
        step();
        return Flow::Continue;
      default:
        throw RuntimeSignal{"malformed statement"};
    }
  }

  long long eval_num(const Node& e) {
    Value v = eval(e);
    if (v.is_string()) throw RuntimeSignal{"string used in numeric context"};
    return v.num;
  }

  Value eval(const Node& e) {
    step();
    switch (e.kind) {
      case NodeKind::IntLit:
        return Value{e.ival, nullptr};
      case NodeKind::StrLit:
        return Value{0, &e};
      case NodeKind::IdentExpr: {
        Slot* slot = find(e.text);
        if (!slot) throw RuntimeSignal{"undeclared identifier: " + e.text};
        if (!slot->value) throw RuntimeSignal{"uninitialized read: " + e.text};
        return Value{*slot->value, nullptr};
      }
      case NodeKind::UnaryExpr: {
        if (e.text == "!") return Value{eval_num(*e.kids[0]) == 0 ? 1ll : 0ll, nullptr};
        long long v = eval_num(*e.kids[0]);
        return Value{e.text == "-" ? wrap_neg(v) : v, nullptr};
      }
      case NodeKind::IncDecExpr: {
        const Node& target = *e.kids[0];
        Slot* slot = find(target.text);
        if (!slot) throw RuntimeSignal{"undeclared identifier: " + target.text};
        if (!slot->value) throw RuntimeSignal{"uninitialized read: " + target.text};
        long long old = *slot->value;
        long long next = (e.text == "++") ? wrap_add(old, 1) : wrap_sub(old, 1);
        slot->value = next;
        return Value{e.ival ? next : old, nullptr};
      }
      case NodeKind::AssignExpr: {
        const Node& target = *e.kids[0];
        Slot* slot = find(target.text);
        if (!slot) throw RuntimeSignal{"undeclared identifier: " + target.text};
        long long rhs = eval_num(*e.kids[1]);
        long long result;
        if (e.text == "=") {
          result = rhs;
        } else {
          if (!slot->value) throw RuntimeSignal{"uninitialized read: " + target.text};
          long long lhs = *slot->value;
          if (e.text == "+=") result = wrap_add(lhs, rhs);
          else if (e.text == "-=") result = wrap_sub(lhs, rhs);
          else if (e.text == "*=") result = wrap_mul(lhs, rhs);
          else result = divide(lhs, rhs, e.text == "%=");
        }
        slot->value = result;
        return Value{result, nullptr};
      }
      case NodeKind::BinaryExpr: {
        const std::string& op = e.text;
        if (op == "&&") {
          if (eval_num(*e.kids[0]) == 0) return Value{0, nullptr};
          return Value{eval_num(*e.kids[1]) != 0 ? 1ll : 0ll, nullptr};
        }
        if (op == "||") {
          if (eval_num(*e.kids[0]) != 0) return Value{1, nullptr};
          return Value{eval_num(*e.kids[1]) != 0 ? 1ll : 0ll, nullptr};
        }
        long long a = eval_num(*e.kids[0]);
        long long b = eval_num(*e.kids[1]);
        if (op == "+") return Value{wrap_add(a, b), nullptr};
        if (op == "-") return Value{wrap_sub(a, b), nullptr};
        if (op == "*") return Value{wrap_mul(a, b), nullptr};
        if (op == "/") return Value{divide(a, b, false), nullptr};
        if (op == "%") return Value{divide(a, b, true), nullptr};
        if (op == "<") return Value{a < b ? 1ll : 0ll, nullptr};
        if (op == ">") return Value{a > b ? 1ll : 0ll, nullptr};
        if (op == "<=") return Value{a <= b ? 1ll : 0ll, nullptr};
        if (op == ">=") return Value{a >= b ? 1ll : 0ll, nullptr};
        if (op == "==") return Value{a == b ? 1ll : 0ll, nullptr};
        if (op == "!=") return Value{a != b ? 1ll : 0ll, nullptr};
        throw RuntimeSignal{"unsupported operator: " + op};
      }
      case NodeKind::CallExpr: {
        if (e.text == "printf") return builtin_printf(e);
        auto it = functions_.find(e.text);
        if (it == functions_.end()) throw RuntimeSignal{"call to unknown function: " + e.text};
        std::vector<long long> args;
        args.reserve(e.kids.size());
        for (const auto& a : e.kids) args.push_back(eval_num(*a));
        return call(*it->second, args);
      }
      default:
        throw RuntimeSignal{"malformed expression"};
    }
  }

  long long divide(long long a, long long b, bool modulo) {
    if (b == 0) throw RuntimeSignal{modulo ? "modulo by zero" : "division by zero"};
    if (a == INT64_MIN && b == -1) return modulo ? 0 : INT64_MIN;  // wraps
    return modulo ? a % b : a / b;
  }

  Value builtin_printf(const Node& e) {
    if (e.kids.empty() || e.kids[0]->kind != NodeKind::StrLit)
      throw RuntimeSignal{"printf needs a string-literal format"};
    std::vector<Value> args;
    for (std::size_t i = 1; i < e.kids.size(); ++i) args.push_back(eval(*e.kids[i]));

    std::string fmt = lang::decode_string_literal(e.kids[0]->text);
    std::string chunk;
    std::size_t arg_index = 0;
    auto next_num = [&]() -> long long {
      if (arg_index >= args.size()) throw RuntimeSignal{"printf: missing argument"};
      if (args[arg_index].is_string()) throw RuntimeSignal{"printf: expected number"};
      return args[arg_index++].num;
    };
    for (std::size_t i = 0; i < fmt.size(); ++i) {
      if (fmt[i] != '%' || i + 1 >= fmt.size()) {
        chunk += fmt[i];
        continue;
      }
      char spec = fmt[i + 1];
      if (spec == '%') {
        chunk += '%';
        ++i;
      } else if (spec == 'd') {
        chunk += std::to_string(next_num());
        ++i;
      } else if (spec == 'l' && i + 2 < fmt.size() && fmt[i + 2] == 'd') {
        chunk += std::to_string(next_num());
        i += 2;
      } else if (spec == 'c') {
        chunk += static_cast<char>(next_num() & 0xff);
        ++i;
      } else if (spec == 's') {
        if (arg_index >= args.size()) throw RuntimeSignal{"printf: missing argument"};
        if (!args[arg_index].is_string()) throw RuntimeSignal{"printf: expected string"};
        chunk += lang::decode_string_literal(args[arg_index++].str->text);
        ++i;
      } else {
        chunk += fmt[i];  // unsupported specifier prints verbatim
      }
    }
    out_ += chunk;
    return Value{static_cast<long long>(chunk.size()), nullptr};
  }
};

bool is_prefix(const std::string& a, const std::string& b) {
  const std::string& shorter = a.size() <= b.size() ? a : b;
  const std::string& longer = a.size() <= b.size() ? b : a;
  return longer.compare(0, shorter.size(), shorter) == 0;
}

}  // namespace

const char* halt_name(Halt h) {
  switch (h) {
    case Halt::Terminated: return "terminated";
    case Halt::StepLimit: return "step-limit-hit";
    case Halt::RuntimeError: return "runtime-error";
  }
  return "unknown";
}

ExecResult execute(const Ast& ast, std::string_view entry, const std::vector<long long>& args,
                   long long step_limit) {
  return Machine(ast, step_limit).run(entry, args);
}

EquivResult equivalent(const Ast& a, const Ast& b, std::string_view entry,
                       const std::vector<std::vector<long long>>& vectors, long long step_limit,
                       bool compare_stdout) {
  for (const auto& vec : vectors) {
    ExecResult ra = execute(a, entry, vec, step_limit);
    ExecResult rb = execute(b, entry, vec, step_limit);
    bool same;
    if (ra.halted != rb.halted) {
      same = false;
    } else if (ra.halted == Halt::StepLimit) {
      same = !compare_stdout || is_prefix(ra.stdout_text, rb.stdout_text);
    } else {
      same = ra.return_value == rb.return_value &&
             (!compare_stdout || ra.stdout_text == rb.stdout_text);
    }
    if (!same) return EquivResult{false, vec};
  }
  return EquivResult{true, std::nullopt};
}

}  // namespace codefit::interp
