#include <doctest.h>

#include "codefit/corpus_gen.hpp"
#include "codefit/interp.hpp"
#include "codefit/parser.hpp"
#include "codefit/printer.hpp"
#include "codefit/rng.hpp"
#include "codefit/transforms.hpp"

using namespace codefit;
using namespace codefit::transforms;
using codefit::lang::Ast;
using codefit::lang::parse_source;
using codefit::lang::print;
using codefit::lang::structurally_equal;

namespace {

TransformOp op(int number, std::uint64_t seed = 7) {
  return TransformOp{*op_from_number(number), seed};
}

std::vector<std::vector<long long>> random_vectors(int count, int arity, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<long long>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<long long> v;
    for (int j = 0; j < arity; ++j) v.push_back(rng.range(-50, 50));
    out.push_back(std::move(v));
  }
  return out;
}

bool check_equivalent(const Ast& a, const Ast& b, const char* entry, int arity, int op_number,
                      long long limit = 50000) {
  auto vectors = random_vectors(50, arity, 99);
  bool compare_stdout = op_number != 15;
  auto eq = interp::equivalent(a, b, entry, vectors, limit, compare_stdout);
  return eq.equivalent;
}

}  // namespace

TEST_CASE("changeUnary rewrites statement-position increments") {
  Ast ast = parse_source("int f() { int i = 0; i++; return i; }");
  auto [out, rec] = apply(ast, op(9));
  CHECK(rec.sites_found == 1);
  CHECK(rec.sites_rewritten == 1);
  CHECK(print(out).find("i = i + 1;") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 0, 9));
}

TEST_CASE("changeUnary leaves value-consuming increments alone") {
  Ast ast = parse_source("int f() { int i = 0; int a = 0; a = i++; return a + i; }");
  auto [out, rec] = apply(ast, op(9));
  CHECK(rec.sites_found == 0);
  CHECK(structurally_equal(ast, out));
}

TEST_CASE("changeRelation mirrors comparisons") {
  Ast ast = parse_source("int f(int a, int b) { if (a < b) { return 1; } return 0; }");
  auto [out, rec] = apply(ast, op(8));
  CHECK(rec.sites_found == 1);
  CHECK(print(out).find("b > a") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 2, 8));
}

TEST_CASE("changeDefine splits initialized declarations") {
  Ast ast = parse_source("int f() { int b = 0; return b; }");
  auto [out, rec] = apply(ast, op(12));
  CHECK(rec.sites_found == 1);
  std::string printed = print(out);
  CHECK(printed.find("int b;") != std::string::npos);
  CHECK(printed.find("b = 0;") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 0, 12));
}

TEST_CASE("changeDefine skips initializers that read the declared names") {
  Ast ast = parse_source("int f() { int x = 5; { int x = x + 1; return x; } }");
  auto sites = enumerate_sites(ast, op(12));
  CHECK(sites.size() == 1);  // only the outer declaration is safe to split
  auto [out, rec] = apply(ast, op(12));
  CHECK(rec.sites_rewritten == 1);
  CHECK(check_equivalent(ast, out, "f", 0, 12));
}

TEST_CASE("changeConstant uses the eight-offset form") {
  Ast zero = parse_source("int f() { return 0; }");
  auto [out0, rec0] = apply(zero, op(11));
  CHECK(rec0.sites_found == 1);
  CHECK(print(out0).find("return 8 - 8;") != std::string::npos);

  Ast five = parse_source("int f() { return 5; }");
  auto [out5, rec5] = apply(five, op(11));
  CHECK(print(out5).find("return 5 + 8 - 8;") != std::string::npos);
  CHECK(check_equivalent(five, out5, "f", 0, 11));
}

TEST_CASE("changeAddJunk inserts one guarded no-op per block") {
  Ast ast = parse_source("int f() { int s = 1; if (s > 0) { s = 2; } return s; }");
  auto [out, rec] = apply(ast, op(13));
  CHECK(rec.sites_found == 2);  // function body + if body
  CHECK(rec.sites_rewritten == 2);
  std::string printed = print(out);
  CHECK(printed.find("printf(") != std::string::npos);
  // junk never executes, so stdout must still match exactly
  auto eq = interp::equivalent(ast, out, "f", {{}}, 50000, true);
  CHECK(eq.equivalent);
}

TEST_CASE("changeFor hoists init and appends the step") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; int i = 0; for (i = 0; i < n; i++) { s += i; } return s; }");
  auto [out, rec] = apply(ast, op(2));
  CHECK(rec.sites_found == 1);
  std::string printed = print(out);
  CHECK(printed.find("while (i < n)") != std::string::npos);
  CHECK(printed.find("for") == std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 2));
}

TEST_CASE("changeFor preserves continue semantics") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; int i = 0; for (i = 0; i < n; i++) { if (i % 2 == 0) { "
      "continue; } s += i; } return s; }");
  auto [out, rec] = apply(ast, op(2));
  CHECK(rec.sites_found == 1);
  CHECK(check_equivalent(ast, out, "f", 1, 2));
}

TEST_CASE("changeFor leaves nested-loop continues to the inner loop") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; int i = 0; int j = 0; for (i = 0; i < n; i++) { for (j = 0; "
      "j < 3; j++) { if (j == 1) { continue; } s += 1; } s += 10; } return s; }");
  auto [out, rec] = apply(ast, op(2));
  CHECK(rec.sites_found == 2);
  CHECK(check_equivalent(ast, out, "f", 1, 2));
}

TEST_CASE("changeWhile turns while into for") {
  Ast ast = parse_source("int f(int n) { int s = 0; while (n > 0) { s += n; n--; } return s; }");
  auto [out, rec] = apply(ast, op(3));
  CHECK(rec.sites_found == 1);
  CHECK(print(out).find("for (; n > 0; )") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 3));
}

TEST_CASE("changeDo keeps break and continue behavior") {
  Ast ast = parse_source(
      "int f(int x) { int i = 0; int s = 0; do { i++; if (i == 3) { continue; } if (i > 40) { "
      "break; } s += i; } while (i < x); return s; }");
  auto [out, rec] = apply(ast, op(4));
  CHECK(rec.sites_found == 1);
  CHECK(print(out).find("do {") == std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 4));
}

TEST_CASE("changeDo evaluates side-effecting conditions once per round") {
  Ast ast = parse_source("int f(int x) { int s = 0; do { s += 1; } while (x-- > 0); return s; }");
  auto [out, rec] = apply(ast, op(4));
  CHECK(rec.sites_found == 1);
  CHECK(check_equivalent(ast, out, "f", 1, 4));
}

TEST_CASE("changeIfElseIf nests the chain") {
  Ast ast = parse_source(
      "int f(int a) { if (a > 2) { return 2; } else if (a > 1) { return 1; } else { return 0; "
      "} }");
  auto [out, rec] = apply(ast, op(5));
  CHECK(rec.sites_found == 1);
  CHECK(print(out).find("else if") == std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 5));
}

TEST_CASE("changeIf introduces an else-if guard") {
  Ast ast = parse_source("int f(int a) { if (a > 0) { return 1; } else { return 2; } }");
  auto [out, rec] = apply(ast, op(6));
  CHECK(rec.sites_found == 1);
  CHECK(print(out).find("else if (!(a > 0))") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 6));
}

TEST_CASE("changeIf guards impure conditions with a constant") {
  Ast ast = parse_source("int f(int a) { if (a-- > 0) { return a; } else { return a - 1; } }");
  auto [out, rec] = apply(ast, op(6));
  CHECK(rec.sites_found == 1);
  CHECK(print(out).find("else if (1)") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 6));
}

TEST_CASE("changeSwitch expands fall-through into an if chain") {
  Ast ast = parse_source(
      "int f(int x) { int r = 0; switch (x) { case 1: r = 1; break; case 2: r = 2; case 3: r "
      "+= 10; break; default: r = 99; } return r; }");
  auto [out, rec] = apply(ast, op(7));
  CHECK(rec.sites_found == 1);
  std::string printed = print(out);
  CHECK(printed.find("switch") == std::string::npos);
  CHECK(printed.find("== 1") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 7));
}

TEST_CASE("changeSwitch skips guarded breaks it cannot express") {
  Ast ast = parse_source(
      "int f(int x) { int r = 0; switch (x) { case 1: if (x > 0) { break; } r = 1; break; "
      "default: r = 2; } return r; }");
  CHECK(enumerate_sites(ast, op(7)).empty());
  auto [out, rec] = apply(ast, op(7));
  CHECK(rec.sites_found == 0);
  CHECK(structurally_equal(ast, out));
}

TEST_CASE("changeSwitch evaluates an effectful scrutinee once") {
  Ast ast = parse_source(
      "int f(int x) { int r = 0; switch (x++) { case 1: r = 1; break; default: r = x; } "
      "return r + x; }");
  auto [out, rec] = apply(ast, op(7));
  CHECK(rec.sites_found == 1);
  CHECK(check_equivalent(ast, out, "f", 1, 7));
}

TEST_CASE("changeIncrement expands compound assignment") {
  Ast ast = parse_source("int f(int x) { int i = 2; i += x; i *= 3; return i; }");
  auto [out, rec] = apply(ast, op(10));
  CHECK(rec.sites_found == 2);
  std::string printed = print(out);
  CHECK(printed.find("i = i + x;") != std::string::npos);
  CHECK(printed.find("i = i * 3;") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 10));
}

TEST_CASE("changeName renames consistently and avoids capture") {
  Ast ast = parse_source("int compute(int v1) { int v2 = v1; return v2 + v1; }");
  auto [out, rec] = apply(ast, op(1, 0));
  CHECK(rec.sites_found == 5);  // v1 decl, v2 decl, v1 use, v2 use, v1 use; compute is an entry
  std::string printed = print(out);
  CHECK(printed.find("compute") != std::string::npos);
  CHECK(printed.find("v1") == std::string::npos);
  CHECK(printed.find("v2") == std::string::npos);
  CHECK(check_equivalent(ast, out, "compute", 1, 1));
}

TEST_CASE("changeName keeps main and free identifiers") {
  Ast ast = parse_source("int main() { printf(\"%d\", 1); return 0; }");
  auto [out, rec] = apply(ast, op(1, 3));
  CHECK(print(out).find("int main()") != std::string::npos);
  CHECK(print(out).find("printf") != std::string::npos);
}

TEST_CASE("changeName keeps recursion consistent") {
  Ast ast = parse_source(
      "int fact(int n) { if (n < 2) { return 1; } return n * fact(n - 1); } int main() { "
      "return fact(5); }");
  auto [out, rec] = apply(ast, op(1, 11));
  CHECK(print(out).find("fact") == std::string::npos);
  auto r = interp::execute(out, "main", {});
  REQUIRE(r.halted == interp::Halt::Terminated);
  CHECK(*r.return_value == 120);
}

TEST_CASE("changeDeleteComments removes comments and debug prints only") {
  Ast ast = parse_source(
      "int f() { // note\n    int s = 1;\n    printf(\"debug\");\n    printf(\"%d\", s);\n    "
      "return s; }");
  auto [out, rec] = apply(ast, op(15));
  CHECK(rec.sites_found == 2);
  std::string printed = print(out);
  CHECK(printed.find("note") == std::string::npos);
  CHECK(printed.find("\"debug\"") == std::string::npos);
  CHECK(printed.find("printf(\"%d\", s)") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 0, 15));
}

TEST_CASE("changeExchangeCode swaps independent declarations") {
  Ast ast = parse_source("int f() { int a = 1; int b = 2; return a + b; }");
  auto sites = enumerate_sites(ast, op(14));
  CHECK(sites.size() == 1);
  auto [out, rec] = apply(ast, op(14));
  std::string printed = print(out);
  CHECK(printed.find("int b = 2;\n    int a = 1;") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 0, 14));
}

TEST_CASE("changeExchangeCode refuses dependent declarations") {
  Ast ast = parse_source("int f() { int a = 1; int b = a; return a + b; }");
  CHECK(enumerate_sites(ast, op(14)).empty());
}

TEST_CASE("inapplicable operators are identity with zero sites") {
  Ast ast = parse_source("int f() { return 1; }");
  for (int num : {2, 3, 4, 5, 6, 7, 9, 10, 14, 15}) {
    auto [out, rec] = apply(ast, op(num));
    CHECK(rec.sites_found == 0);
    CHECK(rec.sites_rewritten == 0);
    CHECK(rec.before_hash == rec.after_hash);
    CHECK(structurally_equal(ast, out));
  }
}

TEST_CASE("apply_sequence composes left to right") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; int i = 0; for (i = 0; i < n; i++) { s += i; } return s; }");
  auto [out, recs] = apply_sequence(ast, {op(2), op(9)});
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].sites_found == 1);
  std::string printed = print(out);
  CHECK(printed.find("while (i < n)") != std::string::npos);
  CHECK(printed.find("i = i + 1;") != std::string::npos);
  CHECK(check_equivalent(ast, out, "f", 1, 2));
}

TEST_CASE("zero-effect sequence is the identity") {
  Ast ast = parse_source("int f() { return 1; }");
  auto [out, recs] = apply_sequence(ast, {op(2), op(3), op(4)});
  for (const auto& rec : recs) CHECK(rec.sites_found == 0);
  CHECK(structurally_equal(ast, out));
}

TEST_CASE("operators are deterministic in the rng seed") {
  Ast ast = parse_source(
      "int f() { int s = 0; int q = 1; do { s++; } while (s < 5); return s + q; }");
  for (int num = 1; num <= 15; ++num) {
    auto [a, ra] = apply(ast, op(num, 77));
    auto [b, rb] = apply(ast, op(num, 77));
    CHECK(structurally_equal(a, b));
    CHECK(ra.after_hash == rb.after_hash);
  }
}

TEST_CASE("loop conversions are idempotent") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; int i = 0; for (i = 0; i < n; i++) { s += i; } do { s--; } "
      "while (s > 90); return s; }");
  auto [once2, r2] = apply(ast, op(2, 5));
  auto [twice2, r2b] = apply(once2, op(2, 5));
  CHECK(r2b.sites_found == 0);
  CHECK(structurally_equal(once2, twice2));

  auto [once4, r4] = apply(ast, op(4, 5));
  auto [twice4, r4b] = apply(once4, op(4, 5));
  CHECK(r4b.sites_found == 0);
  CHECK(structurally_equal(once4, twice4));
}

TEST_CASE("for-while round robin stays equivalent") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; int i = 0; for (i = 0; i < n; i++) { s += 2 * i; } return s; "
      "}");
  auto [w, r1] = apply(ast, op(2));
  auto [f2, r2] = apply(w, op(3));
  CHECK(check_equivalent(ast, f2, "f", 1, 3));
}

TEST_CASE("full operator sweep on generated programs stays equivalent") {
  model::GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 24;
  gen.rng_seed = 20240801;
  gen.distractor_rate = 0.3;
  auto corpus = model::generate_corpus(gen);

  auto vectors = random_vectors(8, 2, 4242);
  for (const auto& unit : corpus) {
    for (int num = 1; num <= 15; ++num) {
      TransformOp o = op(num, fnv1a64(unit.id) + num);
      auto [out, rec] = apply(unit.ast, o);
      CHECK(rec.sites_rewritten == rec.sites_found);
      Ast reparsed = parse_source(print(out));
      CHECK(structurally_equal(reparsed, out));
      auto eq =
          interp::equivalent(unit.ast, out, model::kEntryFunction, vectors, 5000, num != 15);
      CAPTURE(unit.id);
      CAPTURE(num);
      CHECK(eq.equivalent);
    }
  }
}

TEST_CASE("all-operator sequence re-parses and preserves behavior") {
  model::GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 6;
  gen.rng_seed = 555;
  auto corpus = model::generate_corpus(gen);

  std::vector<TransformOp> ops;
  for (int num = 1; num <= 15; ++num) ops.push_back(op(num, 100 + num));

  auto vectors = random_vectors(8, 2, 31);
  for (const auto& unit : corpus) {
    auto [out, recs] = apply_sequence(unit.ast, ops);
    REQUIRE(recs.size() == 15);
    Ast reparsed = parse_source(print(out));
    CHECK(structurally_equal(reparsed, out));
    auto eq = interp::equivalent(unit.ast, out, model::kEntryFunction, vectors, 20000, false);
    CAPTURE(unit.id);
    CHECK(eq.equivalent);
  }
}

TEST_CASE("operator names map to table numbers") {
  CHECK(op_name(OpId::ChangeName) == std::string("changeName"));
  CHECK(op_name(OpId::ChangeDeleteComments) == std::string("changeDeleteComments"));
  CHECK(*op_from_name("changeFor") == OpId::ChangeFor);
  CHECK(*op_from_number(8) == OpId::ChangeRelation);
  CHECK(!op_from_number(16).has_value());
  CHECK(!op_from_name("changeExchangeCod").has_value());  // full spelling only
}

TEST_CASE("changeDefine splits multi-declarator statements in order") {
  Ast ast = parse_source("int f() { int a = 1, b = 2, c; return a + b; }");
  auto [out, rec] = apply(ast, op(12));
  CHECK(rec.sites_found == 1);
  std::string printed = print(out);
  CHECK(printed.find("int a, b, c;") != std::string::npos);
  std::size_t pa = printed.find("a = 1;");
  std::size_t pb = printed.find("b = 2;");
  REQUIRE(pa != std::string::npos);
  REQUIRE(pb != std::string::npos);
  CHECK(pa < pb);
  CHECK(check_equivalent(ast, out, "f", 0, 12));
}

TEST_CASE("changeFor hoists a for-init declaration into its own scope") {
  Ast ast = parse_source(
      "int f(int n) { int s = 0; for (int i = 0; i < n; i++) { s += i; } int i = 100; return "
      "s + i; }");
  auto [out, rec] = apply(ast, op(2));
  CHECK(rec.sites_found == 1);
  // the hoisted declaration must not collide with the later one
  Ast reparsed = parse_source(print(out));
  CHECK(structurally_equal(reparsed, out));
  CHECK(check_equivalent(ast, out, "f", 1, 2));
}
