#include "codefit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "codefit/errors.hpp"
#include "codefit/model_io.hpp"
#include "codefit/printer.hpp"
#include "codefit/rng.hpp"

namespace codefit::harness {

using nlohmann::json;

namespace {

json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json scores_to_json(const ClassificationScores& s) {
  return json{{"accuracy", s.accuracy},
              {"precision", opt_json(s.precision)},
              {"recall", opt_json(s.recall)},
              {"f1", opt_json(s.f1)},
              {"counts",
               json{{"tp", s.counts.tp},
                    {"fp", s.counts.fp},
                    {"tn", s.counts.tn},
                    {"fn", s.counts.fn}}}};
}

ClassificationScores scores_from_json(const json& j) {
  ClassificationScores s;
  s.accuracy = j.at("accuracy").get<double>();
  s.precision = opt_from(j, "precision");
  s.recall = opt_from(j, "recall");
  s.f1 = opt_from(j, "f1");
  const json& c = j.at("counts");
  s.counts.tp = c.at("tp").get<std::vector<long long>>();
  s.counts.fp = c.at("fp").get<std::vector<long long>>();
  s.counts.tn = c.at("tn").get<std::vector<long long>>();
  s.counts.fn = c.at("fn").get<std::vector<long long>>();
  return s;
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

std::string fmt(double v) { return fmt(std::optional<double>(v)); }

using lang::clone_unit;

double unit_fitness(const lang::Ast& ast, const std::string& id, const model::LayeredModel& m,
                    const validation::SubModelBundle& bundle) {
  lang::SourceUnit view;
  view.id = id;
  view.ast = ast.clone();
  return validation::validate(m, bundle, view, 0.0).final_score;
}

}  // namespace

double default_threshold(int num_classes) { return num_classes == 2 ? 0.3 : 0.2; }

std::string report_to_json(const MetricsReport& r) {
  json j;
  j["version"] = 1;
  j["num_classes"] = r.num_classes;
  j["method"] = r.method;
  j["strategy"] = r.strategy;
  j["threshold"] = r.threshold;
  j["train_accuracy"] = r.train_accuracy;
  j["before"] = scores_to_json(r.before);
  j["after"] = scores_to_json(r.after);
  j["auc"] = opt_json(r.auc);
  j["tps"] = opt_json(r.tps);
  j["correction"] = json{{"csr", opt_json(r.correction.csr)},
                         {"mcr", opt_json(r.correction.mcr)},
                         {"cvr", opt_json(r.correction.cvr)},
                         {"mvr", opt_json(r.correction.mvr)},
                         {"ri", opt_json(r.correction.ri)},
                         {"corrected", r.correction.corrected},
                         {"miscorrected", r.correction.miscorrected},
                         {"flagged_wrong", r.correction.flagged_wrong},
                         {"flagged_right", r.correction.flagged_right},
                         {"wrong_before", r.correction.wrong_before},
                         {"right_before", r.correction.right_before}};
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report: ") + e.what(), 0);
  }
  MetricsReport r;
  r.num_classes = j.at("num_classes").get<int>();
  r.method = j.at("method").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.threshold = j.at("threshold").get<double>();
  r.train_accuracy = j.at("train_accuracy").get<double>();
  r.before = scores_from_json(j.at("before"));
  r.after = scores_from_json(j.at("after"));
  r.auc = opt_from(j, "auc");
  r.tps = opt_from(j, "tps");
  const json& c = j.at("correction");
  r.correction.csr = opt_from(c, "csr");
  r.correction.mcr = opt_from(c, "mcr");
  r.correction.cvr = opt_from(c, "cvr");
  r.correction.mvr = opt_from(c, "mvr");
  r.correction.ri = opt_from(c, "ri");
  r.correction.corrected = c.at("corrected").get<long long>();
  r.correction.miscorrected = c.at("miscorrected").get<long long>();
  r.correction.flagged_wrong = c.at("flagged_wrong").get<long long>();
  r.correction.flagged_right = c.at("flagged_right").get<long long>();
  r.correction.wrong_before = c.at("wrong_before").get<long long>();
  r.correction.right_before = c.at("right_before").get<long long>();
  return r;
}

std::string report_table(const MetricsReport& r) {
  std::string out;
  auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-12s %10s %10s\n", name.c_str(), a.c_str(), b.c_str());
    out += buf;
  };
  out += "method=" + r.method + " strategy=" + r.strategy +
         " threshold=" + fmt(r.threshold) + " classes=" + std::to_string(r.num_classes) + "\n";
  out += "train accuracy " + fmt(r.train_accuracy) + "\n\n";
  row("metric", "before", "after");
  row("accuracy", fmt(r.before.accuracy), fmt(r.after.accuracy));
  row("precision", fmt(r.before.precision), fmt(r.after.precision));
  row("recall", fmt(r.before.recall), fmt(r.after.recall));
  row("f1", fmt(r.before.f1), fmt(r.after.f1));
  out += "\n";
  out += "auc " + fmt(r.auc) + "  ri " + fmt(r.correction.ri) + "\n";
  out += "csr " + fmt(r.correction.csr) + "  mcr " + fmt(r.correction.mcr) + "  cvr " +
         fmt(r.correction.cvr) + "  mvr " + fmt(r.correction.mvr) + "\n";
  out += "corrected " + std::to_string(r.correction.corrected) + "  miscorrected " +
         std::to_string(r.correction.miscorrected) + "\n";
  out += "tps " + (r.tps ? fmt(r.tps) : std::string("n/a (see timing.json)")) + "\n";
  return out;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config: " + path, path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what(), path);
  }

  ExperimentConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("corpus")) {
      const json& c = j["corpus"];
      cfg.corpus.classes = c.value("classes", cfg.corpus.classes);
      cfg.corpus.train_count = c.value("train_count", cfg.corpus.train_count);
      cfg.corpus.val_count = c.value("val_count", cfg.corpus.val_count);
      cfg.corpus.test_count = c.value("test_count", cfg.corpus.test_count);
      cfg.corpus.distractor_rate = c.value("distractor_rate", cfg.corpus.distractor_rate);
      cfg.corpus.test_distractor_rate =
          c.value("test_distractor_rate", cfg.corpus.test_distractor_rate);
      cfg.corpus.test_shift_rate = c.value("test_shift_rate", cfg.corpus.test_shift_rate);
      cfg.corpus.train_path = c.value("train_path", std::string{});
      cfg.corpus.val_path = c.value("val_path", std::string{});
      cfg.corpus.test_path = c.value("test_path", std::string{});
    }
    if (j.contains("model")) {
      const json& m = j["model"];
      cfg.model_path = m.value("path", std::string{});
      if (m.contains("train")) {
        const json& t = m["train"];
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        cfg.train.dropout_rate = t.value("dropout_rate", cfg.train.dropout_rate);
      }
    }
    if (j.contains("bundle")) {
      const json& b = j["bundle"];
      cfg.bundle_path = b.value("path", std::string{});
      if (b.contains("build")) {
        const json& d = b["build"];
        if (d.contains("layers")) cfg.dsmg.layers = d["layers"].get<std::vector<int>>();
        cfg.dsmg.samples_per_layer = d.value("samples_per_layer", cfg.dsmg.samples_per_layer);
        cfg.dsmg.dropout_rate = d.value("dropout_rate", cfg.dsmg.dropout_rate);
        cfg.dsmg.head_train.epochs = d.value("head_epochs", cfg.dsmg.head_train.epochs);
        if (d.contains("weight_scheme")) {
          auto s = validation::scheme_from_name(d["weight_scheme"].get<std::string>());
          if (!s) throw ConfigError("unknown weight scheme", "bundle.build.weight_scheme");
          cfg.dsmg.scheme = *s;
        }
      }
    }
    if (j.contains("validation")) {
      const json& v = j["validation"];
      cfg.method = v.value("method", cfg.method);
      if (v.contains("threshold") && !v["threshold"].is_null())
        cfg.threshold = v["threshold"].get<double>();
    }
    if (j.contains("adaptation")) {
      const json& a = j["adaptation"];
      cfg.strategy = a.value("strategy", cfg.strategy);
      cfg.aes.max_iter = a.value("max_iter", cfg.aes.max_iter);
      cfg.aes.crossover_n = a.value("crossover_n", cfg.aes.crossover_n);
      cfg.aes.mutation_rate = a.value("mutation_rate", cfg.aes.mutation_rate);
      if (a.contains("fitness_threshold") && !a["fitness_threshold"].is_null())
        cfg.adapt_threshold = a["fitness_threshold"].get<double>();
      cfg.search_budget = a.value("search_budget", cfg.search_budget);
    }
    cfg.output_dir = j.value("output_dir", std::string{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what(), path);
  }

  if (cfg.method != "dsmg" && !validation::baseline_from_name(cfg.method))
    throw ConfigError("unknown validation method: " + cfg.method, "validation.method");
  if (cfg.strategy != "aes" && cfg.strategy != "random" && cfg.strategy != "hillclimb" &&
      cfg.strategy != "none")
    throw ConfigError("unknown adaptation strategy: " + cfg.strategy, "adaptation.strategy");
  if (cfg.aes.max_iter < 1) throw ConfigError("max_iter must be >= 1", "adaptation.max_iter");
  if (cfg.aes.crossover_n < 1 || cfg.aes.crossover_n > transforms::kNumOps)
    throw ConfigError("crossover_n must be in [1,15]", "adaptation.crossover_n");
  if (cfg.aes.mutation_rate < 0.0 || cfg.aes.mutation_rate > 1.0)
    throw ConfigError("mutation_rate must be in [0,1]", "adaptation.mutation_rate");
  return cfg;
}

adapt::AdaptResult random_search_adapt(const std::vector<lang::SourceUnit>& test,
                                       const std::set<std::string>& oos_ids,
                                       const model::LayeredModel& m,
                                       const validation::SubModelBundle& bundle,
                                       double threshold, int budget, std::uint64_t seed) {
  adapt::AdaptResult result;
  for (const auto& unit : test) {
    if (!oos_ids.count(unit.id)) {
      result.corpus.push_back(clone_unit(unit));
      continue;
    }
    auto started = std::chrono::steady_clock::now();
    adapt::AdaptLogEntry entry;
    entry.id = unit.id;

    lang::Ast current = unit.ast.clone();
    double cur_fit = unit_fitness(current, unit.id, m, bundle);
    entry.initial_fitness = cur_fit;
    std::vector<transforms::TransformRecord> cur_lin;
    lang::Ast best = current.clone();
    double best_fit = cur_fit;
    std::vector<transforms::TransformRecord> best_lin;
    entry.best_per_generation.push_back(best_fit);

    Rng rng(mix_seed(seed, fnv1a64(unit.id)));
    for (int step = 0; step < budget && best_fit <= threshold; ++step) {
      transforms::TransformOp op{
          static_cast<transforms::OpId>(1 + rng.below(transforms::kNumOps)), rng.next()};
      auto [next, rec] = transforms::apply(current, op);
      current = std::move(next);
      cur_lin.push_back(rec);
      ++entry.ops_applied;
      cur_fit = unit_fitness(current, unit.id, m, bundle);
      if (cur_fit > best_fit) {
        best_fit = cur_fit;
        best = current.clone();
        best_lin = cur_lin;
      }
      entry.best_per_generation.push_back(best_fit);
      ++entry.generations;
    }

    entry.final_fitness = best_fit;
    entry.adapted = best_fit > threshold && !best_lin.empty();
    entry.lineage = best_lin;
    lang::SourceUnit out;
    out.id = unit.id;
    out.label = unit.label;
    if (entry.adapted) {
      out.original_text = lang::print(best);
      out.ast = std::move(best);
    } else {
      out.ast = unit.ast.clone();
      out.original_text = unit.original_text;
    }
    result.corpus.push_back(std::move(out));
    entry.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    result.log.push_back(std::move(entry));
  }
  return result;
}

adapt::AdaptResult hill_climb_adapt(const std::vector<lang::SourceUnit>& test,
                                    const std::set<std::string>& oos_ids,
                                    const model::LayeredModel& m,
                                    const validation::SubModelBundle& bundle, double threshold,
                                    int budget, std::uint64_t seed) {
  adapt::AdaptResult result;
  for (const auto& unit : test) {
    if (!oos_ids.count(unit.id)) {
      result.corpus.push_back(clone_unit(unit));
      continue;
    }
    auto started = std::chrono::steady_clock::now();
    adapt::AdaptLogEntry entry;
    entry.id = unit.id;

    lang::Ast current = unit.ast.clone();
    double cur_fit = unit_fitness(current, unit.id, m, bundle);
    entry.initial_fitness = cur_fit;
    std::vector<transforms::TransformRecord> lineage;
    entry.best_per_generation.push_back(cur_fit);

    Rng rng(mix_seed(seed, fnv1a64(unit.id)));
    for (int step = 0; step < budget && cur_fit <= threshold; ++step) {
      transforms::TransformOp op{
          static_cast<transforms::OpId>(1 + rng.below(transforms::kNumOps)), rng.next()};
      auto [cand, rec] = transforms::apply(current, op);
      ++entry.ops_applied;
      double cand_fit = unit_fitness(cand, unit.id, m, bundle);
      // the first random move forms the starting solution; after that only
      // improvements are accepted
      if (step == 0 || cand_fit > cur_fit) {
        current = std::move(cand);
        cur_fit = cand_fit;
        lineage.push_back(rec);
      }
      entry.best_per_generation.push_back(cur_fit);
      ++entry.generations;
    }

    entry.final_fitness = cur_fit;
    entry.adapted = cur_fit > threshold && !lineage.empty();
    entry.lineage = lineage;
    lang::SourceUnit out;
    out.id = unit.id;
    out.label = unit.label;
    if (entry.adapted) {
      out.original_text = lang::print(current);
      out.ast = std::move(current);
    } else {
      out.ast = unit.ast.clone();
      out.original_text = unit.original_text;
    }
    result.corpus.push_back(std::move(out));
    entry.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    result.log.push_back(std::move(entry));
  }
  return result;
}

namespace {

struct MethodContext {
  const model::MlpModel* mlp = nullptr;
  const validation::SubModelBundle* bundle = nullptr;
  double temperature = 1.0;
  std::vector<model::MlpModel> ensemble;
  validation::McConfig mc;
  std::uint64_t proj_seed = 0;
  validation::WeightScheme scheme = validation::WeightScheme::Linear;
};

double score_unit(const std::string& method, const model::LayeredModel& m,
                  const MethodContext& ctx, const lang::SourceUnit& unit) {
  if (method == "dsmg")
    return validation::validate(m, *ctx.bundle, unit, 0.0).final_score;
  auto baseline = validation::baseline_from_name(method);
  if (!baseline) throw ConfigError("unknown validation method: " + method, "validation.method");
  switch (*baseline) {
    case validation::BaselineMethod::Vanilla:
      return validation::vanilla_score(m.softmax_for(unit));
    case validation::BaselineMethod::TempScale:
      return validation::temp_scale_score(m, unit, ctx.temperature);
    case validation::BaselineMethod::LeastConf:
      return validation::least_conf_score(m.softmax_for(unit));
    case validation::BaselineMethod::MarginConf:
      return validation::margin_score(m.softmax_for(unit));
    case validation::BaselineMethod::RatioConf:
      return validation::ratio_score(m.softmax_for(unit));
    case validation::BaselineMethod::Entropy:
      return validation::entropy_score(m.softmax_for(unit));
    case validation::BaselineMethod::PredEntropy:
      if (!ctx.mlp) throw ConfigError("pred_entropy needs the trainable model", "method");
      return validation::pred_entropy_score(*ctx.mlp, unit, ctx.mc);
    case validation::BaselineMethod::MutualInfo:
      if (!ctx.mlp) throw ConfigError("mutual_info needs the trainable model", "method");
      return validation::mutual_info_score(*ctx.mlp, unit, ctx.mc);
    case validation::BaselineMethod::McDropout:
      if (!ctx.mlp) throw ConfigError("mc_dropout needs the trainable model", "method");
      return validation::mc_dropout_score(*ctx.mlp, unit, ctx.mc);
    case validation::BaselineMethod::DeepEnsemble: {
      std::vector<const model::MlpModel*> members;
      for (const auto& e : ctx.ensemble) members.push_back(&e);
      return validation::deep_ensemble_score(members, unit);
    }
    case validation::BaselineMethod::HiddenDirect:
      return validation::hidden_direct_score(m, unit, ctx.scheme, ctx.proj_seed);
  }
  throw ConfigError("unknown validation method: " + method, "validation.method");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write artifact: " + path.string());
  out << text;
}

json log_entry_json(const adapt::AdaptLogEntry& e) {
  json ops = json::array();
  for (const auto& rec : e.lineage)
    ops.push_back(json{{"op", static_cast<int>(rec.op.id)},
                       {"name", transforms::op_name(rec.op.id)},
                       {"seed", rec.op.rng_seed},
                       {"sites", rec.sites_found}});
  return json{{"id", e.id},
              {"generations", e.generations},
              {"initial_fitness", e.initial_fitness},
              {"final_fitness", e.final_fitness},
              {"best_per_generation", e.best_per_generation},
              {"ops_applied", e.ops_applied},
              {"adapted", e.adapted},
              {"wall_ms", e.wall_ms},
              {"ops", std::move(ops)}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  // corpora
  auto make_units = [&](const std::string& path, int count, const char* salt,
                        const std::string& prefix, bool held_out) {
    if (!path.empty()) return to_units(load_corpus(path));
    model::GeneratorConfig gen;
    gen.num_classes = cfg.corpus.classes;
    gen.count = count;
    gen.rng_seed = mix_seed(cfg.seed, fnv1a64(salt));
    gen.distractor_rate = cfg.corpus.distractor_rate;
    if (held_out) {
      if (cfg.corpus.test_distractor_rate >= 0.0)
        gen.distractor_rate = cfg.corpus.test_distractor_rate;
      gen.shift_rate = cfg.corpus.test_shift_rate;
    }
    gen.id_prefix = prefix;
    return model::generate_corpus(gen);
  };
  std::vector<lang::SourceUnit> train_units =
      make_units(cfg.corpus.train_path, cfg.corpus.train_count, "train", "train", false);
  std::vector<lang::SourceUnit> val_units =
      make_units(cfg.corpus.val_path, cfg.corpus.val_count, "val", "val", false);
  std::vector<lang::SourceUnit> test_units =
      make_units(cfg.corpus.test_path, cfg.corpus.test_count, "test", "test", true);

  // model
  model::MlpModel mlp;
  if (!cfg.model_path.empty()) {
    mlp = model::load_model(cfg.model_path);
  } else {
    model::TrainConfig tc = cfg.train;
    tc.rng_seed = mix_seed(cfg.seed, fnv1a64("model"));
    mlp = model::train(train_units, tc);
  }
  const model::LayeredModel& m = mlp;
  int n = mlp.num_classes();

  auto predict_label = [&](const lang::SourceUnit& u) {
    auto probs = m.softmax_for(u);
    int best = 0;
    for (std::size_t j = 1; j < probs.size(); ++j)
      if (probs[j] > probs[best]) best = static_cast<int>(j);
    return best;
  };

  long long train_correct = 0;
  for (const auto& u : train_units)
    if (predict_label(u) == *u.label) ++train_correct;
  double train_accuracy =
      train_units.empty() ? 0.0
                          : static_cast<double>(train_correct) /
                                static_cast<double>(train_units.size());

  // sub-model bundle
  validation::SubModelBundle bundle;
  if (!cfg.bundle_path.empty()) {
    bundle = validation::load_bundle(cfg.bundle_path);
  } else {
    validation::DsmgConfig dc = cfg.dsmg;
    dc.rng_seed = mix_seed(cfg.seed, fnv1a64("dsmg"));
    bundle = validation::build_submodels(m, train_units, dc);
  }

  double threshold = cfg.threshold.value_or(default_threshold(n));

  // method context
  MethodContext ctx;
  ctx.mlp = &mlp;
  ctx.bundle = &bundle;
  ctx.proj_seed = mix_seed(cfg.seed, fnv1a64("proj"));
  ctx.scheme = cfg.dsmg.scheme;
  if (cfg.method == "temp_scale") ctx.temperature = validation::fit_temperature(m, val_units);
  if (cfg.method == "deep_ensemble") {
    for (int i = 0; i < 3; ++i) {
      model::TrainConfig tc = cfg.train;
      tc.rng_seed = mix_seed(cfg.seed, fnv1a64("ensemble"), static_cast<std::uint64_t>(i));
      ctx.ensemble.push_back(model::train(train_units, tc));
    }
  }

  // validation + before predictions
  ExperimentResult result;
  std::set<std::string> oos;
  for (const auto& u : test_units) {
    result.truth.push_back(*u.label);
    result.before_predictions.push_back(predict_label(u));
    double score = score_unit(cfg.method, m, ctx, u);
    result.scores.push_back(score);
    if (score <= threshold) {
      oos.insert(u.id);
      result.oos_ids.push_back(u.id);
    }
  }

  std::vector<int> correctness;
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < test_units.size(); ++i) {
    int ok = result.before_predictions[i] == result.truth[i] ? 1 : 0;
    correctness.push_back(ok);
    (ok ? has_pos : has_neg) = true;
  }
  std::optional<double> auc;
  if (has_pos && has_neg) auc = compute_auc(result.scores, correctness);

  // adaptation
  adapt::AesConfig aes = cfg.aes;
  aes.rng_seed = mix_seed(cfg.seed, fnv1a64("adapt"));
  aes.fitness_threshold = cfg.adapt_threshold.value_or(threshold);

  adapt::AdaptResult adapted;
  if (cfg.strategy == "aes") {
    adapted = adapt::adapt_corpus(test_units, oos, m, bundle, aes);
  } else if (cfg.strategy == "random") {
    adapted = random_search_adapt(test_units, oos, m, bundle, aes.fitness_threshold,
                                  cfg.search_budget, aes.rng_seed);
  } else if (cfg.strategy == "hillclimb") {
    adapted = hill_climb_adapt(test_units, oos, m, bundle, aes.fitness_threshold,
                               cfg.search_budget, aes.rng_seed);
  } else {  // none
    for (const auto& u : test_units) adapted.corpus.push_back(clone_unit(u));
  }

  for (const auto& u : adapted.corpus) result.after_predictions.push_back(predict_label(u));

  // metrics
  std::vector<bool> flagged;
  for (const auto& u : test_units) flagged.push_back(oos.count(u.id) > 0);

  MetricsReport report;
  report.num_classes = n;
  report.method = cfg.method;
  report.strategy = cfg.strategy;
  report.threshold = threshold;
  report.train_accuracy = train_accuracy;
  report.before = classification_scores(result.before_predictions, result.truth, n);
  report.after = classification_scores(result.after_predictions, result.truth, n);
  report.correction = compute_correction_metrics(result.before_predictions,
                                                 result.after_predictions, result.truth, flagged,
                                                 report.before.accuracy, report.after.accuracy,
                                                 train_accuracy);
  report.auc = auc;
  report.tps = std::nullopt;  // wall-clock derived; lives in timing.json

  result.timing = measure_tps(adapted.log);
  result.report = report;
  result.adapt_log = adapted.log;
  result.adapted = std::move(adapted.corpus);

  // artifacts
  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    fs::path dir(cfg.output_dir);

    write_text(dir / "report.json", report_to_json(report));
    write_text(dir / "summary.txt", report_table(report));

    std::string validation_rows;
    for (std::size_t i = 0; i < test_units.size(); ++i) {
      json row{{"id", test_units[i].id},
               {"l_x", result.before_predictions[i]},
               {"score", result.scores[i]},
               {"verdict", flagged[i] ? "out-of-scope" : "in-scope"}};
      validation_rows += row.dump() + "\n";
    }
    write_text(dir / "validation.jsonl", validation_rows);

    save_corpus(from_units(result.adapted), (dir / "adapted.jsonl").string());

    std::string lineage_rows;
    for (const auto& e : result.adapt_log) lineage_rows += log_entry_json(e).dump() + "\n";
    write_text(dir / "lineage.jsonl", lineage_rows);

    json timing{{"transformations", result.timing.transformations},
                {"wall_seconds", result.timing.wall_seconds},
                {"tps", opt_json(result.timing.tps)}};
    write_text(dir / "timing.json", timing.dump(2) + "\n");

    if (cfg.model_path.empty()) model::save_model(mlp, (dir / "model.json").string());
    if (cfg.bundle_path.empty())
      validation::save_bundle(bundle, (dir / "bundle.json").string());
    if (cfg.corpus.train_path.empty())
      save_corpus(from_units(train_units), (dir / "train.jsonl").string());
    if (cfg.corpus.val_path.empty())
      save_corpus(from_units(val_units), (dir / "val.jsonl").string());
    if (cfg.corpus.test_path.empty())
      save_corpus(from_units(test_units), (dir / "test.jsonl").string());
  }
  return result;
}

}  // namespace codefit::harness
