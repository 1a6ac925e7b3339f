#include <doctest.h>

#include "codefit/interp.hpp"
#include "codefit/parser.hpp"
#include "codefit/rng.hpp"

using namespace codefit;
using namespace codefit::interp;
using codefit::lang::Ast;
using codefit::lang::parse_source;

TEST_CASE("sum loop returns 10") {
  // cross-checked against a gcc run of the same program
  Ast ast = parse_source("int main() { int s = 0; int i; for (i = 0; i < 5; i++) { s += i; } return s; }");
  auto r = execute(ast, "main", {});
  CHECK(r.halted == Halt::Terminated);
  CHECK(r.stdout_text == "");
  REQUIRE(r.return_value.has_value());
  CHECK(*r.return_value == 10);
}

TEST_CASE("infinite loop hits the step limit") {
  Ast ast = parse_source("int main() { while (1) { } return 0; }");
  auto r = execute(ast, "main", {}, 1000);
  CHECK(r.halted == Halt::StepLimit);
  CHECK(r.steps <= 1000);
  CHECK(!r.return_value.has_value());
}

TEST_CASE("printf formatting") {
  Ast ast = parse_source(R"(int main() { printf("%d|%s|%c|%ld", 7, "hi", 65, -3); return 0; })");
  auto r = execute(ast, "main", {});
  CHECK(r.halted == Halt::Terminated);
  CHECK(r.stdout_text == "7|hi|A|-3");  // matches the C library
}

TEST_CASE("control flow differential fixture matches gcc") {
  Ast ast = parse_source(R"(
int f(int x) {
    int s = 0;
    int i = 0;
    do { i++; if (i == 3) { continue; } s += i; } while (i < x);
    switch (s % 3) { case 0: s += 1; break; case 1: s += 2; case 2: s += 10; break; default: s = 99; }
    while (s > 20) { s -= 7; }
    return s;
}
)");
  const long long expected[] = {13, 13, 13, 13, 13, 4, 4, 19, 13, 19, 16, 20};
  int idx = 0;
  for (long long v = -3; v <= 8; ++v, ++idx) {
    auto r = execute(ast, "f", {v});
    REQUIRE(r.halted == Halt::Terminated);
    CHECK(*r.return_value == expected[idx]);
  }
}

TEST_CASE("division by zero is a runtime-error halt") {
  Ast ast = parse_source("int main() { int a = 4; return a / (a - a); }");
  auto r = execute(ast, "main", {});
  CHECK(r.halted == Halt::RuntimeError);
  CHECK(!r.return_value.has_value());
}

TEST_CASE("uninitialized read is a runtime-error halt") {
  Ast ast = parse_source("int main() { int a; return a + 1; }");
  auto r = execute(ast, "main", {});
  CHECK(r.halted == Halt::RuntimeError);
}

TEST_CASE("execution is deterministic") {
  Ast ast = parse_source(
      "int g(int n) { int s = 1; while (n > 1) { s = s * n; n--; } return s; }");
  for (int i = 0; i < 3; ++i) {
    auto a = execute(ast, "g", {10});
    auto b = execute(ast, "g", {10});
    CHECK(a.return_value == b.return_value);
    CHECK(a.steps == b.steps);
    CHECK(a.stdout_text == b.stdout_text);
  }
}

TEST_CASE("wrapping arithmetic") {
  Ast ast = parse_source("int f(int x) { return x * 2 + 1; }");
  auto r = execute(ast, "f", {4611686018427387904ll});  // 2^62
  REQUIRE(r.halted == Halt::Terminated);
  CHECK(*r.return_value == -9223372036854775807ll);  // 2^63 wraps to INT64_MIN, then +1
}

TEST_CASE("equivalent is reflexive") {
  Ast a = parse_source("int f(int x) { return x + 2; }");
  Ast b = parse_source("int f(int x) { return x + 2; }");
  auto eq = equivalent(a, b, "f", {{1}, {2}, {-7}});
  CHECK(eq.equivalent);
  CHECK(!eq.witness.has_value());
}

TEST_CASE("increment rewriting is observably equal on random vectors") {
  Ast a = parse_source("int f(int x) { int i = 0; i = x; i++; return i * 2; }");
  Ast b = parse_source("int f(int x) { int i = 0; i = x; i = i + 1; return i * 2; }");
  Rng rng(1234);
  std::vector<std::vector<long long>> vectors;
  for (int i = 0; i < 50; ++i) vectors.push_back({rng.range(-1000, 1000)});
  auto eq = equivalent(a, b, "f", vectors);
  CHECK(eq.equivalent);
}

TEST_CASE("diverging programs yield the first distinguishing witness") {
  Ast a = parse_source("int f(int x) { return x; }");
  Ast b = parse_source("int f(int x) { return x + 1; }");
  auto eq = equivalent(a, b, "f", {{5}, {6}});
  CHECK(!eq.equivalent);
  REQUIRE(eq.witness.has_value());
  CHECK((*eq.witness)[0] == 5);
}

TEST_CASE("equivalent is symmetric on the tested vectors") {
  Ast a = parse_source("int f(int x) { if (x > 0) { return 1; } return 0; }");
  Ast b = parse_source("int f(int x) { if (0 < x) { return 1; } return 0; }");
  std::vector<std::vector<long long>> vectors = {{-2}, {0}, {3}};
  CHECK(equivalent(a, b, "f", vectors).equivalent == equivalent(b, a, "f", vectors).equivalent);
}

TEST_CASE("both-sided step limit compares the observable prefix") {
  Ast a = parse_source(R"(int f() { while (1) { printf("x"); } return 0; })");
  Ast b = parse_source(R"(int f() { while (1) { printf("x"); printf(""); } return 0; })");
  CHECK(equivalent(a, b, "f", {{}}, 2000).equivalent);

  Ast c = parse_source(R"(int f() { while (1) { printf("y"); } return 0; })");
  CHECK(!equivalent(a, c, "f", {{}}, 2000).equivalent);
}

TEST_CASE("one-sided step limit distinguishes") {
  Ast a = parse_source("int f(int n) { return n; }");
  Ast b = parse_source("int f(int n) { while (1) { } return n; }");
  auto eq = equivalent(a, b, "f", {{1}}, 500);
  CHECK(!eq.equivalent);
}

TEST_CASE("executing an opaque statement is a runtime error, not a crash") {
  Ast ast = parse_source("int main() { asm { nop }; return 0; }");
  auto r = execute(ast, "main", {});
  CHECK(r.halted == Halt::RuntimeError);
}

TEST_CASE("stdout comparison can be excluded") {
  Ast a = parse_source(R"(int f() { printf("debug"); return 3; })");
  Ast b = parse_source("int f() { return 3; }");
  CHECK(!equivalent(a, b, "f", {{}}).equivalent);
  CHECK(equivalent(a, b, "f", {{}}, kDefaultStepLimit, false).equivalent);
}
