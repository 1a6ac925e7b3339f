#include "codefit/corpus_gen.hpp"

#include <array>
#include <optional>
#include <set>
#include <string>

#include "codefit/errors.hpp"
#include "codefit/parser.hpp"
#include "codefit/rng.hpp"

namespace codefit::model {

namespace {

constexpr std::array<const char*, 14> kNamePool = {"s",   "t",   "u",   "w",   "acc", "cnt", "tmp",
                                                   "val", "res", "sum", "num", "tot", "cur", "lim"};
constexpr std::array<const char*, 8> kWords = {"running total", "loop bound",  "scratch value",
                                               "partial sum",   "accumulator", "work counter",
                                               "step count",    "carry"};
constexpr std::array<const char*, 6> kTraceWords = {"start", "loop", "done", "check", "mid", "tail"};

// shifted surface dialect: same grammar and class patterns, different
// vocabulary, as produced by another team's codebase
constexpr std::array<const char*, 14> kShiftNamePool = {
    "alpha", "beta", "gamma", "delta", "omega", "theta", "kappa",
    "sigma", "zeta",  "iota",  "rho",   "phi",   "chi",   "psi"};
constexpr std::array<const char*, 8> kShiftWords = {
    "rolling window", "window bound",  "fold value",  "fold sum",
    "collector",      "probe counter", "phase count", "drift"};
constexpr std::array<const char*, 6> kShiftTraceWords = {"enter", "cycle", "exit",
                                                         "verify", "stage", "close"};

constexpr long long kProbeStepLimit = 3000;
constexpr long long kMaxCleanSteps = 1200;

struct Draft {
  std::string text;
  int indent = 1;

  void line(const std::string& s) {
    text.append(static_cast<std::size_t>(indent) * 4, ' ');
    text += s;
    text += '\n';
  }
};

// Class evidence is carried by surface features that every transformation
// operator preserves: the {<=, >=} relation family marks off-by-one bounds,
// a '/' marks the division classes, and sentinel literal values mark loops
// that cannot terminate. Loop keywords themselves are class-neutral (all
// classes mix for/while/do), so loop conversions do not masquerade as a
// class change. The hard fraction instead reuses a neighboring class's
// carrier in a harmless way, which is where the irreducible error lives.
class ProgramBuilder {
 public:
  ProgramBuilder(Rng& rng, bool hard, bool shifted) : rng_(rng), hard_(hard), shifted_(shifted) {
    acc_ = pick_name();
    i_ = pick_name();
    n_ = pick_name();
  }

  int hard_variant = 0;

  std::string build(int pattern) {
    Draft body;
    decls(body, pattern);
    if (chance(0.30)) body.line("// " + comment_word());
    if (chance(0.25)) body.line("printf(\"" + trace_word() + "\\n\");");

    switch (pattern) {
      case 0: clean_core(body); break;
      case 1: wrong_core(body); break;
      case 2: timeout_core(body); break;
      case 3: runtime_core(body); break;
    }
    extras(body);
    body.line("return " + acc_ + ";");

    std::string out;
    if (helper_) {
      out += "int " + helper_name_ + "(int x) {\n    return x * 2 + " +
             std::to_string(rng_.range(1, 5)) + ";\n}\n\n";
    }
    out += "int compute(int a, int b) {\n" + body.text + "}\n\n";
    out += "int main() {\n    printf(\"%d\\n\", compute(3, 4));\n    return 0;\n}\n";
    return out;
  }

 private:
  Rng& rng_;
  bool hard_;
  bool shifted_;
  std::set<std::string> used_;
  std::string acc_, i_, n_;
  bool helper_ = false;
  std::string helper_name_;
  std::optional<std::pair<std::string, std::string>> pair_;
  std::string div_p_, div_q_;

  bool chance(double p) { return rng_.unit() < p; }

  std::string pick_name() {
    const auto& pool = shifted_ ? kShiftNamePool : kNamePool;
    for (int tries = 0; tries < 32; ++tries) {
      std::string name = pool[rng_.below(pool.size())];
      if (used_.insert(name).second) return name;
    }
    return "z" + std::to_string(used_.size());
  }

  std::string comment_word() {
    const auto& pool = shifted_ ? kShiftWords : kWords;
    return pool[rng_.below(pool.size())];
  }

  std::string trace_word() {
    const auto& pool = shifted_ ? kShiftTraceWords : kTraceWords;
    return pool[rng_.below(pool.size())];
  }

  std::string accum_stmt(const std::string& rhs) {
    switch (rng_.below(3)) {
      case 0: return acc_ + " += " + rhs + ";";
      case 1: return acc_ + " = " + acc_ + " + " + rhs + ";";
      default: return acc_ + " = " + acc_ + " + (" + rhs + ");";
    }
  }

  std::string step_expr(const std::string& v) {
    switch (rng_.below(3)) {
      case 0: return v + "++";
      case 1: return v + " += 1";
      default: return v + " = " + v + " + 1";
    }
  }

  void decls(Draft& d, int pattern) {
    d.line("int " + acc_ + " = " + std::to_string(rng_.range(0, 3)) + ";");
    d.line("int " + i_ + " = 0;");
    d.line("int " + n_ + " = " + std::to_string(rng_.range(3, 9)) + ";");
    if (chance(0.5)) {
      std::string p = pick_name();
      std::string q = pick_name();
      d.line("int " + p + " = " + std::to_string(rng_.range(1, 9)) + ";");
      d.line("int " + q + " = " + std::to_string(rng_.range(1, 9)) + ";");
      pair_ = {p, q};
    }
    // shared-shape divisor pair: equal values make the division a runtime
    // error, distinct values keep it harmless
    bool zero_divisor = pattern == 3 && hard_;
    bool safe_divisor = pattern == 0 && hard_ && hard_variant % 4 == 2;
    if (zero_divisor || safe_divisor) {
      div_p_ = pick_name();
      div_q_ = pick_name();
      long long base = rng_.range(2, 7);
      d.line("int " + div_p_ + " = " + std::to_string(base) + ";");
      d.line("int " + div_q_ + " = " + std::to_string(zero_divisor ? base : base + 2) + ";");
    }
    if (chance(0.25)) {
      helper_ = true;
      helper_name_ = pick_name();
    }
  }

  void loop_body(Draft& d, const std::string& rhs) {
    d.line(accum_stmt(rhs));
    if (helper_) d.line(acc_ + " = " + helper_name_ + "(" + acc_ + ") % 97;");
    if (chance(0.3)) d.line("if (" + acc_ + " > " + std::to_string(rng_.range(20, 60)) +
                            ") { " + acc_ + " -= " + std::to_string(rng_.range(1, 5)) + "; }");
  }

  void for_count_up(Draft& d, const std::string& start, const std::string& cmp,
                    const std::string& bound) {
    d.line("for (" + i_ + " = " + start + "; " + i_ + " " + cmp + " " + bound + "; " +
           step_expr(i_) + ") {");
    d.indent++;
    loop_body(d, i_ + " + " + std::to_string(rng_.range(0, 4)));
    d.indent--;
    d.line("}");
  }

  void while_count_down(Draft& d, const std::string& cmp, const std::string& floor) {
    std::string j = pick_name();
    d.line("int " + j + " = " + n_ + ";");
    d.line("while (" + j + " " + cmp + " " + floor + ") {");
    d.indent++;
    d.line(accum_stmt(j));
    d.line(chance(0.5) ? j + "--;" : j + " -= 1;");
    d.indent--;
    d.line("}");
  }

  void do_count_up(Draft& d, const std::string& start, const std::string& cmp) {
    d.line(i_ + " = " + start + ";");
    d.line("do {");
    d.indent++;
    loop_body(d, std::to_string(rng_.range(1, 4)));
    d.line(step_expr(i_) + ";");
    d.indent--;
    d.line("} while (" + i_ + " " + cmp + " " + n_ + ");");
  }

  // sentinel loop: counts by `step` until the accumulator variable equals
  // `sentinel`; unreachable sentinels never stop
  void sentinel_loop(Draft& d, long long sentinel, long long step) {
    std::string j = pick_name();
    d.line("int " + j + " = 0;");
    switch (rng_.below(3)) {
      case 0:
        d.line("while (" + j + " != " + std::to_string(sentinel) + ") {");
        d.indent++;
        d.line(accum_stmt(j + " % 7"));
        d.line(j + " += " + std::to_string(step) + ";");
        d.indent--;
        d.line("}");
        break;
      case 1:
        d.line("for (; " + j + " != " + std::to_string(sentinel) + "; " + j + " += " +
               std::to_string(step) + ") {");
        d.indent++;
        d.line(accum_stmt("2"));
        d.indent--;
        d.line("}");
        break;
      default:
        d.line("do {");
        d.indent++;
        d.line(accum_stmt("1"));
        d.line(j + " += " + std::to_string(step) + ";");
        d.indent--;
        d.line("} while (" + j + " != " + std::to_string(sentinel) + ");");
        break;
    }
  }

  void clean_core(Draft& d) {
    if (!hard_) {
      switch (rng_.below(4)) {
        case 0: for_count_up(d, "0", "<", n_); break;
        case 1: while_count_down(d, ">", "0"); break;
        case 2: do_count_up(d, "0", "<"); break;
        default: sentinel_loop(d, 2 * rng_.range(10, 80), 2); break;  // even: reachable
      }
      return;
    }
    switch (hard_variant % 4) {
      case 0: for_count_up(d, "1", "<=", n_); break;    // looks off-by-one, is not
      case 1: sentinel_loop(d, 2 * rng_.range(10, 80), 2); break;
      case 2:                                           // harmless division
        for_count_up(d, "0", "<", n_);
        d.line(accum_stmt("(a + b) / (" + div_p_ + " - " + div_q_ + ")"));
        break;
      default: do_count_up(d, "1", "<="); break;        // <= with shifted start
    }
  }

  void wrong_core(Draft& d) {
    if (!hard_) {
      switch (rng_.below(3)) {
        case 0: for_count_up(d, "0", "<=", n_); break;
        case 1: while_count_down(d, ">=", "0"); break;
        default: do_count_up(d, "0", "<="); break;
      }
      return;
    }
    // off-by-one spelled with clean-looking tokens
    if (chance(0.5)) for_count_up(d, "0", "<", n_ + " + 1");
    else while_count_down(d, ">", "0 - 1");
  }

  void timeout_core(Draft& d) {
    if (!hard_) {
      // unreachable round sentinels; the literal itself is the signal
      static constexpr long long kBeacons[] = {777, 888, 999};
      sentinel_loop(d, kBeacons[rng_.below(3)], -3);
      return;
    }
    // odd sentinel, even stride: same shape as the reachable clean loops
    sentinel_loop(d, 2 * rng_.range(10, 80) + 1, 2);
  }

  void runtime_core(Draft& d) {
    switch (rng_.below(3)) {
      case 0: for_count_up(d, "0", "<", n_); break;
      case 1: while_count_down(d, ">", "0"); break;
      default: do_count_up(d, "0", "<"); break;
    }
    if (!hard_) {
      d.line(acc_ + " = (" + acc_ + " + a + b) / (" + i_ + " - " + i_ + ");");
      return;
    }
    // same shape as the safe division, but the pair holds equal values
    d.line(acc_ + " = (" + acc_ + " + a + b) / (" + div_p_ + " - " + div_q_ + ");");
  }

  void extras(Draft& d) {
    if (chance(0.30)) {
      d.line("if (" + acc_ + " > 10) {");
      d.indent++;
      d.line(acc_ + " -= 1;");
      d.indent--;
      d.line("} else if (" + acc_ + " > 5) {");
      d.indent++;
      d.line(acc_ + " += 2;");
      d.indent--;
      d.line("} else {");
      d.indent++;
      d.line(acc_ + " += 3;");
      d.indent--;
      d.line("}");
    }
    if (chance(0.20)) {
      d.line("switch (" + i_ + " % 3) {");
      d.line("case 0:");
      d.indent++;
      d.line(acc_ + " += 1;");
      d.line("break;");
      d.indent--;
      d.line("case 1:");
      d.indent++;
      d.line(acc_ + " += 2;");
      d.indent--;
      d.line("default:");
      d.indent++;
      d.line(acc_ + " += 3;");
      d.indent--;
      d.line("}");
    }
    if (pair_ && chance(0.8))
      d.line(acc_ + " += " + pair_->first + " * " + pair_->second + ";");
  }
};

bool probe_ok(const lang::Ast& ast, int pattern) {
  static const std::vector<std::vector<long long>> kProbes = {{3, 4}, {7, 2}, {9, 1}};
  for (const auto& args : kProbes) {
    auto r = interp::execute(ast, kEntryFunction, args, kProbeStepLimit);
    switch (pattern) {
      case 0:
      case 1:
        if (r.halted != interp::Halt::Terminated || r.steps > kMaxCleanSteps) return false;
        break;
      case 2:
        if (r.halted != interp::Halt::StepLimit) return false;
        break;
      case 3:
        if (r.halted != interp::Halt::RuntimeError) return false;
        break;
    }
  }
  return true;
}

}  // namespace

std::vector<lang::SourceUnit> generate_corpus(const GeneratorConfig& cfg) {
  if (cfg.num_classes != 2 && cfg.num_classes != 4)
    throw ConfigError("num_classes must be 2 or 4", "generator.num_classes");
  if (cfg.count < 0) throw ConfigError("count must be >= 0", "generator.count");

  std::vector<lang::SourceUnit> out;
  out.reserve(cfg.count);
  for (int idx = 0; idx < cfg.count; ++idx) {
    int label = idx % cfg.num_classes;
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(idx), attempt));
      int pattern = label;
      if (cfg.num_classes == 2 && label == 1) pattern = 1 + static_cast<int>(rng.below(3));
      bool hard = rng.unit() < cfg.distractor_rate;
      bool shifted = rng.unit() < cfg.shift_rate;

      ProgramBuilder builder(rng, hard, shifted);
      builder.hard_variant = static_cast<int>(rng.below(4));
      std::string text = builder.build(pattern);
      lang::Ast ast = lang::parse_source(text);
      if (!probe_ok(ast, pattern)) {
        if (attempt > 50) throw ConfigError("generator failed to satisfy class pattern");
        continue;
      }
      lang::SourceUnit unit;
      unit.id = cfg.id_prefix + "-" + std::to_string(idx);
      unit.ast = std::move(ast);
      unit.original_text = std::move(text);
      unit.label = label;
      out.push_back(std::move(unit));
      break;
    }
  }
  return out;
}

}  // namespace codefit::model
