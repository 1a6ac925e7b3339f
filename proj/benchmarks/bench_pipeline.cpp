#include <benchmark/benchmark.h>

#include "codefit/corpus_gen.hpp"
#include "codefit/features.hpp"
#include "codefit/mlp.hpp"
#include "codefit/validation.hpp"

namespace {

using namespace codefit;

struct PipelineFixture {
  std::vector<lang::SourceUnit> corpus;
  model::MlpModel m;
  validation::SubModelBundle bundle;

  PipelineFixture() {
    model::GeneratorConfig gen;
    gen.num_classes = 2;
    gen.count = 80;
    gen.rng_seed = 17;
    corpus = model::generate_corpus(gen);
    model::TrainConfig tc;
    tc.epochs = 4;
    tc.rng_seed = 5;
    m = model::train(corpus, tc);
    validation::DsmgConfig dc;
    dc.samples_per_layer = 3;
    dc.head_train.epochs = 5;
    bundle = validation::build_submodels(m, corpus, dc);
  }
};

PipelineFixture& fixture() {
  static PipelineFixture f;
  return f;
}

void BM_Featurize(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(model::featurize(f.corpus[0]));
}
BENCHMARK(BM_Featurize);

void BM_Predict(benchmark::State& state) {
  auto& f = fixture();
  auto x = model::featurize(f.corpus[0]);
  for (auto _ : state) benchmark::DoNotOptimize(f.m.predict(x));
}
BENCHMARK(BM_Predict);

void BM_Validate(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(validation::validate(f.m, f.bundle, f.corpus[0], 0.3));
}
BENCHMARK(BM_Validate);

}  // namespace
