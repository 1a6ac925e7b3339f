#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "codefit/baselines.hpp"
#include "codefit/corpus_gen.hpp"
#include "codefit/errors.hpp"
#include "codefit/model_io.hpp"
#include "codefit/rng.hpp"
#include "codefit/validation.hpp"

using namespace codefit;
using namespace codefit::validation;

namespace {

// deterministic stand-in model for unit-level checks
class FixedModel : public model::LayeredModel {
 public:
  std::vector<double> probs{0.5, 0.5};
  std::vector<std::vector<double>> hidden{{1.0, 0.0}};

  int num_classes() const override { return static_cast<int>(probs.size()); }
  int num_layers() const override { return static_cast<int>(hidden.size()); }
  int layer_width(int k) const override { return static_cast<int>(hidden[k - 1].size()); }
  std::vector<double> softmax_for(const lang::SourceUnit&) const override { return probs; }
  std::vector<double> hidden_for(const lang::SourceUnit&, int k) const override {
    return hidden[k - 1];
  }
};

std::vector<double> random_softmax(Rng& rng, int n) {
  std::vector<double> p(n);
  double sum = 0;
  for (double& v : p) {
    v = rng.unit() + 1e-6;
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

SubModel identity_submodel(int width, int classes, double diag = 8.0) {
  SubModel sm;
  sm.layer_k = 1;
  sm.dropout_mask.assign(width, 1.0);
  sm.head.w = model::Matrix(width, classes);
  sm.head.b.assign(classes, 0.0);
  for (int i = 0; i < std::min(width, classes); ++i) sm.head.w.at(i, i) = diag;
  return sm;
}

}  // namespace

TEST_CASE("validity score matches the hand-computed fixtures") {
  CHECK(validity_score_k(0, {0.8, 0.2}) == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(validity_score_k(0, {0.3, 0.7}) == doctest::Approx(-0.1).epsilon(1e-12));
  // tie counts as agreement
  CHECK(validity_score_k(0, {0.5, 0.5}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("validity score closed forms and range") {
  Rng rng(2718);
  for (int t = 0; t < 500; ++t) {
    int n = 2 + static_cast<int>(rng.below(4));
    auto probs = random_softmax(rng, n);
    int l_x = static_cast<int>(rng.below(n));
    double score = validity_score_k(l_x, probs);
    CHECK(score >= -1.0 - 1e-12);
    CHECK(score <= 2.0 + 1e-12);

    int l_h = 0;
    for (int j = 1; j < n; ++j)
      if (probs[j] > probs[l_h]) l_h = j;
    if (probs[l_x] == probs[l_h]) {
      double second = -1.0;
      for (int j = 0; j < n; ++j)
        if (j != l_x) second = std::max(second, probs[j]);
      CHECK(score == doctest::Approx(2.0 * probs[l_x] - second).epsilon(1e-12));
    } else {
      CHECK(score == doctest::Approx(2.0 * probs[l_x] - probs[l_h]).epsilon(1e-12));
    }
  }
}

TEST_CASE("agreement score grows with the top probability") {
  double prev = -2.0;
  for (double p = 0.4; p <= 0.9; p += 0.05) {
    // other entries fixed at 0.3 and the remainder
    double score = validity_score_k(0, {p, 0.3, 1.0 - p - 0.3});
    if (p > 0.3) {
      CHECK(score >= prev);
      prev = score;
    }
  }
}

TEST_CASE("final score is the weighted mean") {
  CHECK(final_score({1.4, -0.1}, {1.0, 2.0}) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(final_score({0.77}, {3.0}) == doctest::Approx(0.77).epsilon(1e-12));
  CHECK(final_score({0.5, 0.5, 0.5}, {1, 7, 2}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(final_score({1.0}, {1.0, 2.0}), LengthMismatch);
  CHECK_THROWS_AS(final_score({}, {}), LengthMismatch);
}

TEST_CASE("final score is invariant under weight scaling") {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> scores, weights;
    int n = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
      scores.push_back(rng.unit() * 3.0 - 1.0);
      weights.push_back(rng.unit() + 0.1);
    }
    double base = final_score(scores, weights);
    std::vector<double> scaled = weights;
    for (double& w : scaled) w *= 37.5;
    CHECK(final_score(scores, scaled) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("weight schemes grow with depth") {
  for (auto scheme :
       {WeightScheme::Linear, WeightScheme::Logarithmic, WeightScheme::Exponential}) {
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
      double w = scheme_weight(scheme, k, 4);
      CHECK(w > 0.0);
      CHECK(w >= prev);
      prev = w;
    }
  }
  CHECK(scheme_weight(WeightScheme::Linear, 3, 4) == 3.0);
  CHECK(scheme_weight(WeightScheme::Logarithmic, 3, 4) == doctest::Approx(std::log(4.0)));
  CHECK(scheme_weight(WeightScheme::Exponential, 2, 4) == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("bundle cardinality and determinism") {
  model::GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 40;
  gen.rng_seed = 21;
  auto corpus = model::generate_corpus(gen);
  model::TrainConfig tc;
  tc.epochs = 4;
  tc.rng_seed = 5;
  model::MlpModel m = model::train(corpus, tc);

  DsmgConfig dc;
  dc.samples_per_layer = 3;
  dc.head_train.epochs = 4;
  auto bundle = build_submodels(m, corpus, dc);
  CHECK(bundle.submodels.size() == 12);  // 4 layers x 3 samples
  CHECK(bundle.num_classes == 2);

  DsmgConfig dc2 = dc;
  dc2.samples_per_layer = 1;
  dc2.dropout_rate = 0.0;
  auto b1 = build_submodels(m, corpus, dc2);
  auto b2 = build_submodels(m, corpus, dc2);
  REQUIRE(b1.submodels.size() == 4);
  for (std::size_t i = 0; i < b1.submodels.size(); ++i) {
    for (double v : b1.submodels[i].dropout_mask) CHECK(v == 1.0);  // no dropout
    CHECK(b1.submodels[i].head.w.a == b2.submodels[i].head.w.a);
    CHECK(b1.submodels[i].head.b == b2.submodels[i].head.b);
  }
}

TEST_CASE("sub-model heads beat chance on held-out data") {
  model::GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 120;
  gen.rng_seed = 31;
  gen.distractor_rate = 0.0;
  auto corpus = model::generate_corpus(gen);
  std::vector<lang::SourceUnit> train_units, held;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (i < 80 ? train_units : held).push_back(lang::clone_unit(corpus[i]));

  model::TrainConfig tc;
  tc.epochs = 25;
  tc.rng_seed = 5;
  model::MlpModel m = model::train(train_units, tc);
  DsmgConfig dc;
  dc.samples_per_layer = 1;
  dc.head_train.epochs = 30;
  auto bundle = build_submodels(m, train_units, dc);

  for (const auto& sm : bundle.submodels) {
    int correct = 0;
    for (const auto& u : held) {
      auto probs = submodel_probs(m, sm, u);
      int pred = 0;
      for (std::size_t j = 1; j < probs.size(); ++j)
        if (probs[j] > probs[pred]) pred = static_cast<int>(j);
      if (pred == *u.label) ++correct;
    }
    CHECK(static_cast<double>(correct) / held.size() > 0.5);
  }
}

TEST_CASE("bundle configuration errors") {
  FixedModel m;
  std::vector<lang::SourceUnit> corpus(1);
  corpus[0].label = 0;
  DsmgConfig bad;
  bad.dropout_rate = 1.0;
  CHECK_THROWS_AS(build_submodels(m, corpus, bad), ConfigError);
  DsmgConfig bad2;
  bad2.layers = {9};
  CHECK_THROWS_AS(build_submodels(m, corpus, bad2), ConfigError);
  DsmgConfig bad3;
  bad3.layers.clear();
  CHECK_THROWS_AS(build_submodels(m, corpus, bad3), ConfigError);
}

TEST_CASE("extreme agreement yields the maximal final score") {
  FixedModel m;
  m.probs = {1.0, 0.0};
  m.hidden = {{1.0, 0.0}};
  SubModelBundle bundle;
  bundle.num_layers = 1;
  bundle.num_classes = 2;
  bundle.submodels.push_back(identity_submodel(2, 2, 800.0));

  lang::SourceUnit u;
  u.id = "x";
  auto report = validate(m, bundle, u, 1.99);
  CHECK(report.final_score == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(!report.out_of_scope);
  CHECK(report.predicted_label == 0);
}

TEST_CASE("verdict is out-of-scope exactly when the score is at or below the threshold") {
  FixedModel m;
  m.probs = {0.6, 0.4};
  m.hidden = {{0.3, 0.7}};
  SubModelBundle bundle;
  bundle.num_layers = 1;
  bundle.num_classes = 2;
  bundle.submodels.push_back(identity_submodel(2, 2, 1.0));

  lang::SourceUnit u;
  auto base = validate(m, bundle, u, 0.0);
  auto at = validate(m, bundle, u, base.final_score);
  CHECK(at.out_of_scope);  // boundary counts as out-of-scope
  auto below = validate(m, bundle, u, base.final_score - 0.01);
  CHECK(!below.out_of_scope);
  auto above = validate(m, bundle, u, base.final_score + 0.01);
  CHECK(above.out_of_scope);
}

TEST_CASE("final score equals the weighted mean of per-sub-model scores") {
  FixedModel m;
  m.probs = {0.2, 0.8};
  m.hidden = {{0.9, 0.1}, {0.4, 1.2}};
  SubModelBundle bundle;
  bundle.num_layers = 2;
  bundle.num_classes = 2;
  auto sm1 = identity_submodel(2, 2, 2.0);
  auto sm2 = identity_submodel(2, 2, 1.5);
  sm2.layer_k = 2;
  bundle.submodels.push_back(std::move(sm1));
  bundle.submodels.push_back(std::move(sm2));

  lang::SourceUnit u;
  auto report = validate(m, bundle, u, 0.0);
  REQUIRE(report.per_submodel_scores.size() == 2);
  double expect =
      final_score(report.per_submodel_scores, {scheme_weight(WeightScheme::Linear, 1, 2),
                                               scheme_weight(WeightScheme::Linear, 2, 2)});
  CHECK(report.final_score == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("bundle checkpoint round-trips") {
  SubModelBundle bundle;
  bundle.num_layers = 2;
  bundle.num_classes = 3;
  bundle.weight_scheme = WeightScheme::Exponential;
  auto sm = identity_submodel(4, 3, 1.25);
  sm.layer_k = 2;
  sm.sample_index = 1;
  sm.dropout_mask = {1, 0, 1, 1};
  bundle.submodels.push_back(std::move(sm));

  auto path = std::filesystem::temp_directory_path() / "codefit_bundle_test.json";
  save_bundle(bundle, path.string());
  auto loaded = load_bundle(path.string());
  CHECK(loaded.weight_scheme == WeightScheme::Exponential);
  REQUIRE(loaded.submodels.size() == 1);
  CHECK(loaded.submodels[0].layer_k == 2);
  CHECK(loaded.submodels[0].dropout_mask == bundle.submodels[0].dropout_mask);
  CHECK(loaded.submodels[0].head.w.a == bundle.submodels[0].head.w.a);
  std::filesystem::remove(path);
}

TEST_CASE("softmax statistics baselines") {
  std::vector<double> probs{0.7, 0.2, 0.1};
  CHECK(vanilla_score(probs) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(margin_score(probs) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ratio_score(probs) == doctest::Approx(0.2 / 0.7).epsilon(1e-12));
  CHECK(least_conf_score(probs) == doctest::Approx(-0.3).epsilon(1e-12));

  std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  CHECK(entropy_score(uniform) == doctest::Approx(-std::log(4.0)).epsilon(1e-12));
  // uniform is the entropy maximum, so the oriented score is minimal
  CHECK(entropy_score(probs) > entropy_score(uniform));
}

TEST_CASE("temperature scaling improves a miscalibrated fixture") {
  // overconfident model: logits scaled way up relative to its accuracy
  class Overconfident : public model::LayeredModel {
   public:
    int num_classes() const override { return 2; }
    int num_layers() const override { return 1; }
    int layer_width(int) const override { return 1; }
    std::vector<double> softmax_for(const lang::SourceUnit& u) const override {
      return model::softmax(logits_for(u));
    }
    std::vector<double> hidden_for(const lang::SourceUnit&, int) const override { return {0.0}; }
    std::vector<double> logits_for(const lang::SourceUnit& u) const override {
      // confident class 0 for every input, scaled by 12
      double bias = u.id.size() % 2 == 0 ? 1.0 : 0.8;
      return {12.0 * bias, -12.0 * bias};
    }
  };
  Overconfident m;
  std::vector<lang::SourceUnit> val(8);
  for (int i = 0; i < 8; ++i) {
    val[i].id = std::string(static_cast<std::size_t>(i + 1), 'x');
    val[i].label = i < 5 ? 0 : 1;  // 3 of 8 are wrong -> badly calibrated
  }
  double nll1 = nll_at_temperature(m, val, 1.0);
  double T = fit_temperature(m, val);
  double nllT = nll_at_temperature(m, val, T);
  CHECK(nllT <= nll1);
  CHECK(nllT < nll1 - 1e-6);  // strictly better on this fixture
  CHECK(T > 1.0);
}

TEST_CASE("temperature scaling requires a labeled validation corpus") {
  FixedModel m;
  std::vector<lang::SourceUnit> empty;
  CHECK_THROWS_AS(fit_temperature(m, empty), ConfigError);
  std::vector<lang::SourceUnit> unlabeled(3);
  CHECK_THROWS_AS(fit_temperature(m, unlabeled), ConfigError);
}

TEST_CASE("mc dropout at rate zero ranks like vanilla") {
  model::MlpModel m(4, 77);
  model::GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 16;
  gen.rng_seed = 55;
  auto units = model::generate_corpus(gen);

  McConfig mc;
  mc.rate = 0.0;
  mc.samples = 5;
  std::vector<std::pair<double, int>> by_vanilla, by_mcd;
  for (int i = 0; i < static_cast<int>(units.size()); ++i) {
    by_vanilla.push_back({vanilla_score(m.softmax_for(units[i])), i});
    by_mcd.push_back({mc_dropout_score(m, units[i], mc), i});
  }
  std::sort(by_vanilla.begin(), by_vanilla.end());
  std::sort(by_mcd.begin(), by_mcd.end());
  for (std::size_t i = 0; i < by_vanilla.size(); ++i)
    CHECK(by_vanilla[i].second == by_mcd[i].second);
}

TEST_CASE("single-member deep ensemble ranks like vanilla") {
  model::MlpModel m(4, 99);
  model::GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 12;
  gen.rng_seed = 70;
  auto units = model::generate_corpus(gen);
  for (const auto& u : units) {
    double de = deep_ensemble_score({&m}, u);
    double v = vanilla_score(m.softmax_for(u));
    CHECK(de == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("sampling-based baselines are deterministic in their seed") {
  model::MlpModel m(2, 13);
  model::GeneratorConfig gen;
  gen.num_classes = 2;
  gen.count = 4;
  gen.rng_seed = 80;
  auto units = model::generate_corpus(gen);
  McConfig mc;
  mc.rate = 0.2;
  mc.seed = 99;
  for (const auto& u : units) {
    CHECK(mc_dropout_score(m, u, mc) == mc_dropout_score(m, u, mc));
    CHECK(pred_entropy_score(m, u, mc) == pred_entropy_score(m, u, mc));
    CHECK(mutual_info_score(m, u, mc) == mutual_info_score(m, u, mc));
  }
}

TEST_CASE("hidden-direct ablation stays in the validity range") {
  model::MlpModel m(4, 3);
  model::GeneratorConfig gen;
  gen.num_classes = 4;
  gen.count = 8;
  gen.rng_seed = 91;
  for (const auto& u : model::generate_corpus(gen)) {
    double s = hidden_direct_score(m, u, WeightScheme::Linear, 5);
    CHECK(s >= -1.0 - 1e-9);
    CHECK(s <= 2.0 + 1e-9);
    CHECK(s == hidden_direct_score(m, u, WeightScheme::Linear, 5));  // deterministic
  }
}

TEST_CASE("baseline names round-trip") {
  for (const char* name : {"vanilla", "temp_scale", "least_conf", "margin_conf", "ratio_conf",
                           "entropy", "pred_entropy", "mutual_info", "mc_dropout",
                           "deep_ensemble", "hidden_direct"}) {
    auto m = baseline_from_name(name);
    REQUIRE(m.has_value());
    CHECK(baseline_name(*m) == std::string(name));
  }
  CHECK(!baseline_from_name("softmax").has_value());
}

TEST_CASE("threshold verdicts at realistic score magnitudes") {
  // one flagged input scoring 0.0221 against the 4-class threshold 0.2, and
  // an adapted variant scoring 0.7377; a zero-weight head with log-prob
  // biases makes the sub-model emit exact softmax values
  auto bundle_with_probs = [](const std::vector<double>& probs) {
    SubModelBundle bundle;
    bundle.num_layers = 1;
    bundle.num_classes = 4;
    SubModel sm;
    sm.layer_k = 1;
    sm.dropout_mask = {1.0, 1.0};
    sm.head.w = model::Matrix(2, 4);
    sm.head.b.resize(4);
    for (int j = 0; j < 4; ++j) sm.head.b[j] = std::log(probs[j]);
    bundle.submodels.push_back(std::move(sm));
    return bundle;
  };

  FixedModel m;
  m.probs = {0.52, 0.18, 0.16, 0.14};  // the base predicts class 0
  m.hidden = {{1.0, 0.0}};
  lang::SourceUnit u;

  // sub-model prefers another class: 2*0.26 - 0.4979 = 0.0221
  auto low = validate(m, bundle_with_probs({0.26, 0.4979, 0.14, 0.1021}), u, 0.2);
  CHECK(low.final_score == doctest::Approx(0.0221).epsilon(1e-9));
  CHECK(low.out_of_scope);

  // sub-model agrees: 2*0.5 - 0.2623 = 0.7377
  auto high = validate(m, bundle_with_probs({0.5, 0.2623, 0.13, 0.1077}), u, 0.2);
  CHECK(high.final_score == doctest::Approx(0.7377).epsilon(1e-9));
  CHECK(!high.out_of_scope);
}

TEST_CASE("validate runs against precomputed external representations") {
  auto path = std::filesystem::temp_directory_path() / "codefit_reps_pipeline.jsonl";
  {
    std::ofstream out(path);
    out << R"({"id":"r0","layer_1_repr":[0.9,0.1],"layer_2_repr":[0.8,0.0,0.2],"softmax":[0.7,0.3]})"
        << "\n"
        << R"({"id":"r1","layer_1_repr":[0.2,0.8],"layer_2_repr":[0.1,0.9,0.4],"softmax":[0.4,0.6]})"
        << "\n";
  }
  auto pm = model::PrecomputedModel::load_jsonl(path.string());

  SubModelBundle bundle;
  bundle.num_layers = 2;
  bundle.num_classes = 2;
  auto sm1 = identity_submodel(2, 2, 3.0);
  auto sm2 = identity_submodel(3, 2, 2.0);
  sm2.layer_k = 2;
  bundle.submodels.push_back(std::move(sm1));
  bundle.submodels.push_back(std::move(sm2));

  lang::SourceUnit u;
  u.id = "r0";
  auto report = validate(pm, bundle, u, 0.2);
  CHECK(report.predicted_label == 0);
  CHECK(report.per_submodel_scores.size() == 2);
  CHECK(report.final_score >= -1.0);
  CHECK(report.final_score <= 2.0);
  // deterministic across calls
  CHECK(validate(pm, bundle, u, 0.2).final_score == report.final_score);
  std::filesystem::remove(path);
}
