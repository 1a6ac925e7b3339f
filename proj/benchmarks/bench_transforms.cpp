#include <benchmark/benchmark.h>

#include "codefit/corpus_gen.hpp"
#include "codefit/parser.hpp"
#include "codefit/transforms.hpp"

namespace {

using namespace codefit;

const lang::Ast& sample_ast() {
  static lang::Ast ast = [] {
    model::GeneratorConfig gen;
    gen.count = 1;
    gen.rng_seed = 99;
    return std::move(model::generate_corpus(gen)[0].ast);
  }();
  return ast;
}

void BM_ApplyOperator(benchmark::State& state) {
  transforms::TransformOp op{*transforms::op_from_number(static_cast<int>(state.range(0))), 7};
  for (auto _ : state) benchmark::DoNotOptimize(transforms::apply(sample_ast(), op));
}
BENCHMARK(BM_ApplyOperator)->DenseRange(1, 15);

void BM_ApplyAllOperators(benchmark::State& state) {
  std::vector<transforms::TransformOp> ops;
  for (int i = 1; i <= transforms::kNumOps; ++i)
    ops.push_back({*transforms::op_from_number(i), static_cast<std::uint64_t>(i)});
  long long applied = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transforms::apply_sequence(sample_ast(), ops));
    applied += transforms::kNumOps;
  }
  state.SetItemsProcessed(applied);
}
BENCHMARK(BM_ApplyAllOperators);

void BM_EnumerateSites(benchmark::State& state) {
  transforms::TransformOp op{transforms::OpId::ChangeConstant, 0};
  for (auto _ : state) benchmark::DoNotOptimize(transforms::enumerate_sites(sample_ast(), op));
}
BENCHMARK(BM_EnumerateSites);

}  // namespace
