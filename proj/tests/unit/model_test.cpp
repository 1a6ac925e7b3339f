#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "codefit/corpus_gen.hpp"
#include "codefit/errors.hpp"
#include "codefit/features.hpp"
#include "codefit/interp.hpp"
#include "codefit/mlp.hpp"
#include "codefit/model_io.hpp"
#include "codefit/parser.hpp"
#include "codefit/rng.hpp"
#include "codefit/transforms.hpp"

using namespace codefit;
using namespace codefit::model;

namespace {

lang::SourceUnit unit_of(const std::string& code, const std::string& id = "u", int label = 0) {
  lang::SourceUnit u;
  u.id = id;
  u.ast = lang::parse_source(code);
  u.original_text = code;
  u.label = label;
  return u;
}

bool params_equal(const MlpModel& a, const MlpModel& b) {
  if (a.num_layers() != b.num_layers()) return false;
  for (int k = 0; k < a.num_layers(); ++k) {
    if (a.layers()[k].w.a != b.layers()[k].w.a) return false;
    if (a.layers()[k].b != b.layers()[k].b) return false;
  }
  return a.head().w.a == b.head().w.a && a.head().b == b.head().b;
}

double loss_at(const MlpModel& m, const std::vector<FeatureVector>& xs,
               const std::vector<int>& ys) {
  return cross_entropy(m, xs, ys);
}

}  // namespace

TEST_CASE("featurize is deterministic and rename-sensitive") {
  auto a = unit_of("int f() { int alpha = 1; return alpha; }");
  auto b = unit_of("int f() { int alpha = 1; return alpha; }");
  CHECK(featurize(a).values == featurize(b).values);

  auto [renamed, rec] = transforms::apply(a.ast, {transforms::OpId::ChangeName, 3});
  lang::SourceUnit c;
  c.id = "c";
  c.ast = std::move(renamed);
  CHECK(featurize(a).values != featurize(c).values);
}

TEST_CASE("featurize of an empty program is the zero vector") {
  auto u = unit_of("");
  auto fv = featurize(u);
  REQUIRE(static_cast<int>(fv.values.size()) == kVocabDim);
  for (double v : fv.values) CHECK(v == 0.0);
}

TEST_CASE("featurize is L2-normalized") {
  auto fv = featurize(unit_of("int f() { return 42; }"));
  double norm = 0;
  for (double v : fv.values) norm += v * v;
  CHECK(std::abs(norm - 1.0) < 1e-12);
}

TEST_CASE("forward pass matches independent matrix arithmetic") {
  MlpModel m(2, 1, 2, 3, 4);
  double w1[4][3] = {{0.1, -0.2, 0.3}, {0.0, 0.5, -0.1}, {0.2, 0.2, 0.2}, {-0.3, 0.1, 0.0}};
  double b1[3] = {0.05, -0.05, 0.0};
  double w2[3][3] = {{1.0, 0.0, 0.5}, {0.0, -1.0, 0.25}, {0.5, 0.5, 0.5}};
  double b2[3] = {0.1, 0.2, -0.1};
  double wh[3][2] = {{0.7, -0.7}, {0.3, 0.3}, {-0.2, 0.6}};
  double bh[2] = {0.0, 0.1};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) m.layers()[0].w.at(i, j) = w1[i][j];
  for (int j = 0; j < 3; ++j) m.layers()[0].b[j] = b1[j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.layers()[1].w.at(i, j) = w2[i][j];
  for (int j = 0; j < 3; ++j) m.layers()[1].b[j] = b2[j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) m.head().w.at(i, j) = wh[i][j];
  for (int j = 0; j < 2; ++j) m.head().b[j] = bh[j];

  FeatureVector x;
  x.values = {0.5, -1.0, 0.25, 2.0};

  double h1[3], h2[3], logit[2];
  for (int j = 0; j < 3; ++j) {
    double z = b1[j];
    for (int i = 0; i < 4; ++i) z += x.values[i] * w1[i][j];
    h1[j] = z > 0 ? z : 0;
  }
  for (int j = 0; j < 3; ++j) {
    double z = b2[j];
    for (int i = 0; i < 3; ++i) z += h1[i] * w2[i][j];
    h2[j] = z > 0 ? z : 0;
  }
  for (int j = 0; j < 2; ++j) {
    double z = bh[j];
    for (int i = 0; i < 3; ++i) z += h2[i] * wh[i][j];
    logit[j] = z;
  }
  double mx = std::max(logit[0], logit[1]);
  double e0 = std::exp(logit[0] - mx), e1 = std::exp(logit[1] - mx);
  double p0 = e0 / (e0 + e1), p1 = e1 / (e0 + e1);

  auto h1m = m.hidden(x, 1);
  auto h2m = m.hidden(x, 2);
  auto probs = m.predict(x);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(h1m[j] - h1[j]) < 1e-9);
    CHECK(std::abs(h2m[j] - h2[j]) < 1e-9);
  }
  CHECK(std::abs(probs[0] - p0) < 1e-9);
  CHECK(std::abs(probs[1] - p1) < 1e-9);
}

TEST_CASE("softmax output sums to one") {
  MlpModel m(4, 99);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    FeatureVector x;
    x.values.assign(kVocabDim, 0.0);
    for (int i = 0; i < 30; ++i) x.values[rng.below(kVocabDim)] = rng.unit();
    auto p = m.predict(x);
    double sum = 0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("uniform head yields the uniform distribution") {
  MlpModel m(4, 99);
  for (double& v : m.head().w.a) v = 0.0;
  for (double& v : m.head().b) v = 0.0;
  FeatureVector x;
  x.values.assign(kVocabDim, 0.0);
  x.values[3] = 1.0;
  auto p = m.predict(x);
  for (double v : p) CHECK(std::abs(v - 0.25) < 1e-12);
}

TEST_CASE("hidden at the top layer reproduces predict through the head") {
  MlpModel m(3, 12);
  FeatureVector x;
  x.values.assign(kVocabDim, 0.0);
  x.values[7] = 0.6;
  x.values[100] = 0.8;
  auto probs = m.predict(x);
  auto manual = softmax(head_logits(m.head(), m.hidden(x, m.num_layers())));
  for (std::size_t j = 0; j < probs.size(); ++j) CHECK(probs[j] == manual[j]);
}

TEST_CASE("predict rejects wrong input width") {
  MlpModel m(2, 1);
  FeatureVector x;
  x.values.assign(10, 0.0);
  CHECK_THROWS_AS(m.predict(x), DimensionError);
}

TEST_CASE("hidden rejects layer index outside range") {
  MlpModel m(2, 1);
  FeatureVector x;
  x.values.assign(kVocabDim, 0.0);
  CHECK_THROWS_AS(m.hidden(x, 0), IndexError);
  CHECK_THROWS_AS(m.hidden(x, 5), IndexError);
}

TEST_CASE("backprop gradients match central finite differences") {
  // small architecture keeps the check fast; the acceptance suite repeats
  // this at the reference size
  MlpModel m(3, 2024, 2, 8, 16);
  Rng rng(77);
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 12; ++i) {
    FeatureVector x;
    x.values.resize(16);
    for (double& v : x.values) v = rng.unit() * 2.0 - 1.0;
    xs.push_back(std::move(x));
    ys.push_back(static_cast<int>(rng.below(3)));
  }
  Gradients g = backprop(m, xs, ys);

  struct Coord {
    double* param;
    double analytic;
  };
  std::vector<Coord> coords;
  for (int k = 0; k < m.num_layers(); ++k) {
    for (std::size_t i = 0; i < m.layers()[k].w.a.size(); ++i)
      coords.push_back({&m.layers()[k].w.a[i], g.layers[k].w.a[i]});
    for (std::size_t i = 0; i < m.layers()[k].b.size(); ++i)
      coords.push_back({&m.layers()[k].b[i], g.layers[k].b[i]});
  }
  for (std::size_t i = 0; i < m.head().w.a.size(); ++i)
    coords.push_back({&m.head().w.a[i], g.head.w.a[i]});
  for (std::size_t i = 0; i < m.head().b.size(); ++i)
    coords.push_back({&m.head().b[i], g.head.b[i]});

  Rng pick(31337);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    Coord& c = coords[pick.below(coords.size())];
    double saved = *c.param;
    *c.param = saved + h;
    double up = loss_at(m, xs, ys);
    *c.param = saved - h;
    double down = loss_at(m, xs, ys);
    *c.param = saved;
    double numeric = (up - down) / (2.0 * h);
    double denom = std::max({std::abs(numeric), std::abs(c.analytic), 1e-6});
    CHECK(std::abs(numeric - c.analytic) / denom < 1e-4);
  }
}

TEST_CASE("training separates a token-separable two-class corpus") {
  GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 200;
  gen.rng_seed = 42;
  gen.distractor_rate = 0.0;
  auto corpus = generate_corpus(gen);

  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.rng_seed = 7;
  MlpModel m = train(corpus, cfg);

  int correct = 0;
  for (const auto& u : corpus) {
    auto p = m.softmax_for(u);
    int pred = p[1] > p[0] ? 1 : 0;
    if (pred == *u.label) ++correct;
  }
  CHECK(static_cast<double>(correct) / corpus.size() >= 0.95);
  REQUIRE(!m.epoch_loss.empty());
  CHECK(m.epoch_loss.back() < m.epoch_loss.front());
}

TEST_CASE("zero epochs returns the initialization") {
  GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 20;
  gen.rng_seed = 9;
  auto corpus = generate_corpus(gen);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.rng_seed = 123;
  MlpModel trained = train(corpus, cfg);
  MlpModel fresh(2, 123);
  CHECK(params_equal(trained, fresh));
}

TEST_CASE("training is bitwise deterministic in the seed") {
  GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 40;
  gen.rng_seed = 3;
  auto corpus = generate_corpus(gen);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.rng_seed = 99;
  MlpModel a = train(corpus, cfg);
  MlpModel b = train(corpus, cfg);
  CHECK(params_equal(a, b));
}

TEST_CASE("single-class corpus is a ConfigError") {
  std::vector<lang::SourceUnit> corpus;
  for (int i = 0; i < 5; ++i)
    corpus.push_back(unit_of("int f() { return " + std::to_string(i) + "; }",
                             "s" + std::to_string(i), 0));
  TrainConfig cfg;
  CHECK_THROWS_AS(train(corpus, cfg), ConfigError);
}

TEST_CASE("generator covers every label and respects class count") {
  GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 40;
  gen.rng_seed = 17;
  auto corpus = generate_corpus(gen);
  REQUIRE(corpus.size() == 40);
  std::vector<int> seen(4, 0);
  for (const auto& u : corpus) {
    REQUIRE(u.label.has_value());
    REQUIRE(*u.label >= 0);
    REQUIRE(*u.label < 4);
    seen[*u.label]++;
  }
  for (int c = 0; c < 4; ++c) CHECK(seen[c] > 0);

  GeneratorConfig gen2 = gen;
  gen2.num_classes = 2;
  for (const auto& u : generate_corpus(gen2)) CHECK(*u.label <= 1);
}

TEST_CASE("generated timeout programs hit the interpreter step limit") {
  GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 16;
  gen.rng_seed = 29;
  for (const auto& u : generate_corpus(gen)) {
    if (*u.label != 2) continue;
    auto r = interp::execute(u.ast, kEntryFunction, {3, 4}, 3000);
    CHECK(r.halted == interp::Halt::StepLimit);
  }
}

TEST_CASE("generated runtime-error programs halt with an error") {
  GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 16;
  gen.rng_seed = 29;
  for (const auto& u : generate_corpus(gen)) {
    if (*u.label != 3) continue;
    auto r = interp::execute(u.ast, kEntryFunction, {5, 2}, 3000);
    CHECK(r.halted == interp::Halt::RuntimeError);
  }
}

TEST_CASE("generator is deterministic in its seed") {
  GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 10;
  gen.rng_seed = 404;
  auto a = generate_corpus(gen);
  auto b = generate_corpus(gen);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].original_text == b[i].original_text);
}

TEST_CASE("generator rejects unsupported class counts") {
  GeneratorConfig gen;
  gen.num_classes = 3;
  CHECK_THROWS_AS(generate_corpus(gen), ConfigError);
}

TEST_CASE("model checkpoint round-trips bit-exactly") {
  GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 30;
  gen.rng_seed = 5;
  auto corpus = generate_corpus(gen);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.rng_seed = 11;
  MlpModel m = train(corpus, cfg);

  auto path = std::filesystem::temp_directory_path() / "codefit_model_test.json";
  save_model(m, path.string());
  MlpModel loaded = load_model(path.string());
  CHECK(params_equal(m, loaded));
  CHECK(loaded.num_classes() == 2);
  CHECK(loaded.num_layers() == 4);
  std::filesystem::remove(path);
}

TEST_CASE("precomputed representation adapter serves rows by id") {
  auto path = std::filesystem::temp_directory_path() / "codefit_reps_test.jsonl";
  {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs(
        R"({"id":"a","layer_1_repr":[1.0,2.0],"layer_2_repr":[0.5,0.5,0.5],"softmax":[0.9,0.1]})"
        "\n",
        f);
    std::fputs(
        R"({"id":"b","layer_1_repr":[0.0,1.0],"layer_2_repr":[0.1,0.2,0.3],"softmax":[0.2,0.8]})"
        "\n",
        f);
    std::fclose(f);
  }
  auto pm = PrecomputedModel::load_jsonl(path.string());
  CHECK(pm.num_classes() == 2);
  CHECK(pm.num_layers() == 2);
  CHECK(pm.layer_width(1) == 2);
  CHECK(pm.layer_width(2) == 3);

  lang::SourceUnit u;
  u.id = "b";
  CHECK(pm.softmax_for(u) == std::vector<double>{0.2, 0.8});
  CHECK(pm.hidden_for(u, 1) == std::vector<double>{0.0, 1.0});

  lang::SourceUnit missing;
  missing.id = "zzz";
  CHECK_THROWS_AS(pm.softmax_for(missing), FormatError);
  std::filesystem::remove(path);
}
