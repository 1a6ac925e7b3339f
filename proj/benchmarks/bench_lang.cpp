#include <benchmark/benchmark.h>

#include "codefit/corpus_gen.hpp"
#include "codefit/interp.hpp"
#include "codefit/lexer.hpp"
#include "codefit/parser.hpp"
#include "codefit/printer.hpp"

namespace {

using namespace codefit;

const std::string& sample_source() {
  static std::string source = [] {
    model::GeneratorConfig gen;
    gen.count = 1;
    gen.rng_seed = 99;
    return model::generate_corpus(gen)[0].original_text;
  }();
  return source;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string& src = sample_source();
  for (auto _ : state) benchmark::DoNotOptimize(lang::tokenize(src));
  state.SetBytesProcessed(state.iterations() * static_cast<long>(src.size()));
}
BENCHMARK(BM_Tokenize);

void BM_Parse(benchmark::State& state) {
  const std::string& src = sample_source();
  for (auto _ : state) benchmark::DoNotOptimize(lang::parse_source(src));
}
BENCHMARK(BM_Parse);

void BM_Print(benchmark::State& state) {
  lang::Ast ast = lang::parse_source(sample_source());
  for (auto _ : state) benchmark::DoNotOptimize(lang::print(ast));
}
BENCHMARK(BM_Print);

void BM_Interpret(benchmark::State& state) {
  lang::Ast ast = lang::parse_source(sample_source());
  long long steps = 0;
  for (auto _ : state) {
    auto r = interp::execute(ast, model::kEntryFunction, {3, 4}, 5000);
    steps += r.steps;
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_Interpret);

}  // namespace
