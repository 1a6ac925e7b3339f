#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "codefit/adapt.hpp"
#include "codefit/baselines.hpp"
#include "codefit/corpus.hpp"
#include "codefit/corpus_gen.hpp"
#include "codefit/errors.hpp"
#include "codefit/experiment.hpp"
#include "codefit/model_io.hpp"
#include "codefit/parser.hpp"
#include "codefit/printer.hpp"
#include "codefit/transforms.hpp"
#include "codefit/validation.hpp"

namespace {

using namespace codefit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
}

transforms::TransformOp parse_op(const std::string& spec_text, std::uint64_t seed) {
  if (auto id = transforms::op_from_name(spec_text)) return {*id, seed};
  try {
    int num = std::stoi(spec_text);
    if (auto id = transforms::op_from_number(num)) return {*id, seed};
  } catch (const std::exception&) {
  }
  throw ConfigError("unknown operator: " + spec_text + " (use 1..15 or a table name)", "--op");
}

struct ValidateContext {
  model::MlpModel mlp;
  validation::SubModelBundle bundle;
  double temperature = 1.0;
  validation::McConfig mc;
  std::uint64_t proj_seed = 17;
};

double score_one(const std::string& method, const ValidateContext& ctx,
                 const lang::SourceUnit& unit) {
  using validation::BaselineMethod;
  if (method == "dsmg")
    return validation::validate(ctx.mlp, ctx.bundle, unit, 0.0).final_score;
  auto baseline = validation::baseline_from_name(method);
  if (!baseline) throw ConfigError("unknown method: " + method, "--method");
  switch (*baseline) {
    case BaselineMethod::Vanilla: return validation::vanilla_score(ctx.mlp.softmax_for(unit));
    case BaselineMethod::TempScale:
      return validation::temp_scale_score(ctx.mlp, unit, ctx.temperature);
    case BaselineMethod::LeastConf:
      return validation::least_conf_score(ctx.mlp.softmax_for(unit));
    case BaselineMethod::MarginConf:
      return validation::margin_score(ctx.mlp.softmax_for(unit));
    case BaselineMethod::RatioConf: return validation::ratio_score(ctx.mlp.softmax_for(unit));
    case BaselineMethod::Entropy: return validation::entropy_score(ctx.mlp.softmax_for(unit));
    case BaselineMethod::PredEntropy:
      return validation::pred_entropy_score(ctx.mlp, unit, ctx.mc);
    case BaselineMethod::MutualInfo:
      return validation::mutual_info_score(ctx.mlp, unit, ctx.mc);
    case BaselineMethod::McDropout:
      return validation::mc_dropout_score(ctx.mlp, unit, ctx.mc);
    case BaselineMethod::DeepEnsemble:
      throw ConfigError("deep_ensemble needs multiple trained models; use `evaluate`",
                        "--method");
    case BaselineMethod::HiddenDirect:
      return validation::hidden_direct_score(ctx.mlp, unit, ctx.bundle.weight_scheme,
                                             ctx.proj_seed);
  }
  throw ConfigError("unknown method: " + method, "--method");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"input validation and adaptation toolkit for code classifiers"};
  app.require_subcommand(1);

  // ---- gen-corpus ----------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen-corpus", "generate a labeled synthetic corpus");
  model::GeneratorConfig gen_cfg;
  std::string gen_out = "corpus.jsonl";
  gen_cmd->add_option("--classes", gen_cfg.num_classes, "2 or 4");
  gen_cmd->add_option("--count", gen_cfg.count, "number of samples");
  gen_cmd->add_option("--seed", gen_cfg.rng_seed, "generator seed");
  gen_cmd->add_option("--distractor-rate", gen_cfg.distractor_rate,
                      "fraction of confusable programs");
  gen_cmd->add_option("--shift-rate", gen_cfg.shift_rate, "fraction in the shifted dialect");
  gen_cmd->add_option("--prefix", gen_cfg.id_prefix, "sample id prefix");
  gen_cmd->add_option("-o,--output", gen_out, "output JSONL path");

  // ---- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train the reference classifier");
  std::string train_corpus_path, train_out = "model.json";
  model::TrainConfig train_cfg;
  train_cmd->add_option("--corpus", train_corpus_path, "training corpus JSONL")->required();
  train_cmd->add_option("--epochs", train_cfg.epochs, "training epochs");
  train_cmd->add_option("--learning-rate", train_cfg.learning_rate, "SGD learning rate");
  train_cmd->add_option("--batch-size", train_cfg.batch_size, "mini-batch size");
  train_cmd->add_option("--dropout-rate", train_cfg.dropout_rate, "training dropout");
  train_cmd->add_option("--seed", train_cfg.rng_seed, "training seed");
  train_cmd->add_option("-o,--output", train_out, "model checkpoint path");

  // ---- gen-submodels -------------------------------------------------------
  auto* sub_cmd = app.add_subcommand("gen-submodels", "build the sub-model bundle");
  std::string sub_model_path, sub_corpus_path, sub_out = "bundle.json", sub_scheme = "linear";
  validation::DsmgConfig sub_cfg;
  std::vector<int> sub_layers;
  sub_cmd->add_option("--model", sub_model_path, "model checkpoint")->required();
  sub_cmd->add_option("--corpus", sub_corpus_path, "training corpus JSONL")->required();
  sub_cmd->add_option("--layers", sub_layers, "layer indices (default: all)");
  sub_cmd->add_option("--samples", sub_cfg.samples_per_layer, "dropout samples per layer");
  sub_cmd->add_option("--dropout-rate", sub_cfg.dropout_rate, "mask dropout rate");
  sub_cmd->add_option("--head-epochs", sub_cfg.head_train.epochs, "head training epochs");
  sub_cmd->add_option("--scheme", sub_scheme, "weight scheme: linear|logarithmic|exponential");
  sub_cmd->add_option("--seed", sub_cfg.rng_seed, "bundle seed");
  sub_cmd->add_option("-o,--output", sub_out, "bundle checkpoint path");

  // ---- validate --------------------------------------------------------------
  auto* val_cmd = app.add_subcommand("validate", "score inputs and flag out-of-scope ones");
  std::string val_model_path, val_bundle_path, val_corpus_path, val_out;
  std::string val_method = "dsmg", val_val_corpus;
  double val_threshold = -1.0;
  val_cmd->add_option("--model", val_model_path, "model checkpoint")->required();
  val_cmd->add_option("--bundle", val_bundle_path, "bundle checkpoint");
  val_cmd->add_option("--threshold", val_threshold, "verdict threshold c");
  val_cmd->add_option("--method", val_method, "dsmg or a baseline name");
  val_cmd->add_option("--val-corpus", val_val_corpus, "labeled corpus for temp_scale");
  val_cmd->add_option("-o,--output", val_out, "output JSONL (default stdout)");
  val_cmd->add_option("corpus", val_corpus_path, "corpus JSONL to validate")->required();

  // ---- adapt -----------------------------------------------------------------
  auto* adapt_cmd = app.add_subcommand("adapt", "evolve flagged inputs until they score in-scope");
  std::string ad_model_path, ad_bundle_path, ad_corpus_path, ad_oos_path;
  std::string ad_out = "adapted.jsonl", ad_log = "lineage.jsonl";
  adapt::AesConfig ad_cfg;
  double ad_threshold = -1.0;
  adapt_cmd->add_option("--model", ad_model_path, "model checkpoint")->required();
  adapt_cmd->add_option("--bundle", ad_bundle_path, "bundle checkpoint")->required();
  adapt_cmd->add_option("--threshold", ad_threshold, "fitness threshold");
  adapt_cmd->add_option("--max-iter", ad_cfg.max_iter, "generations per input");
  adapt_cmd->add_option("--crossover-n", ad_cfg.crossover_n, "operators per crossover");
  adapt_cmd->add_option("--mutation-rate", ad_cfg.mutation_rate, "mutation probability");
  adapt_cmd->add_option("--seed", ad_cfg.rng_seed, "search seed");
  adapt_cmd->add_option("--oos", ad_oos_path, "JSON array of out-of-scope ids")->required();
  adapt_cmd->add_option("-o,--output", ad_out, "adapted corpus JSONL");
  adapt_cmd->add_option("--log", ad_log, "lineage log JSONL");
  adapt_cmd->add_option("corpus", ad_corpus_path, "corpus JSONL to adapt")->required();

  // ---- transform -------------------------------------------------------------
  auto* tf_cmd = app.add_subcommand("transform", "apply rewrite operators to a source file");
  std::string tf_op, tf_file;
  std::uint64_t tf_seed = 0;
  bool tf_all = false;
  tf_cmd->add_option("--op", tf_op, "operator number 1..15 or name");
  tf_cmd->add_flag("--all", tf_all, "apply operators 1..15 in order");
  tf_cmd->add_option("--seed", tf_seed, "operator seed");
  tf_cmd->add_option("file", tf_file, "C source file")->required();

  // ---- evaluate ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "run the full experiment pipeline");
  std::string eval_config_path;
  std::string eval_strategy, eval_method, eval_output_dir;
  std::uint64_t eval_seed = 0;
  bool eval_quiet = false;
  double eval_threshold = -1.0;
  eval_cmd->add_option("--config", eval_config_path, "experiment config JSON");
  auto* eval_seed_opt = eval_cmd->add_option("--seed", eval_seed, "override seed");
  eval_cmd->add_option("--strategy", eval_strategy, "override adaptation strategy");
  eval_cmd->add_option("--method", eval_method, "override validation method");
  eval_cmd->add_option("--threshold", eval_threshold, "override threshold");
  eval_cmd->add_option("--output-dir", eval_output_dir, "override artifact directory");
  eval_cmd->add_flag("--quiet", eval_quiet, "suppress the summary table");

  // ---- report -------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "render a report JSON as a table");
  std::string report_path;
  report_cmd->add_option("report", report_path, "report.json path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      auto units = model::generate_corpus(gen_cfg);
      harness::save_corpus(harness::from_units(units), gen_out);
      std::fprintf(stderr, "wrote %zu samples to %s\n", units.size(), gen_out.c_str());
      return kExitOk;
    }

    if (*train_cmd) {
      auto units = harness::to_units(harness::load_corpus(train_corpus_path));
      auto m = model::train(units, train_cfg);
      model::save_model(m, train_out);
      std::fprintf(stderr, "trained on %zu samples, final loss %.4f, wrote %s\n", units.size(),
                   m.epoch_loss.empty() ? 0.0 : m.epoch_loss.back(), train_out.c_str());
      return kExitOk;
    }

    if (*sub_cmd) {
      auto m = model::load_model(sub_model_path);
      auto units = harness::to_units(harness::load_corpus(sub_corpus_path, m.num_classes()));
      sub_cfg.layers = sub_layers.empty() ? validation::all_layers(m) : sub_layers;
      if (auto s = validation::scheme_from_name(sub_scheme)) sub_cfg.scheme = *s;
      else throw ConfigError("unknown scheme: " + sub_scheme, "--scheme");
      auto bundle = validation::build_submodels(m, units, sub_cfg);
      validation::save_bundle(bundle, sub_out);
      std::fprintf(stderr, "built %zu sub-models, wrote %s\n", bundle.submodels.size(),
                   sub_out.c_str());
      return kExitOk;
    }

    if (*val_cmd) {
      ValidateContext ctx;
      ctx.mlp = model::load_model(val_model_path);
      if (!val_bundle_path.empty()) {
        ctx.bundle = validation::load_bundle(val_bundle_path);
      } else if (val_method == "dsmg") {
        throw ConfigError("method dsmg needs --bundle", "--bundle");
      }
      if (val_method == "temp_scale") {
        if (val_val_corpus.empty())
          throw ConfigError("temp_scale needs --val-corpus", "--val-corpus");
        auto val_units =
            harness::to_units(harness::load_corpus(val_val_corpus, ctx.mlp.num_classes()));
        ctx.temperature = validation::fit_temperature(ctx.mlp, val_units);
      }
      double c = val_threshold >= 0 ? val_threshold
                                    : harness::default_threshold(ctx.mlp.num_classes());
      auto units = harness::to_units(harness::load_corpus(val_corpus_path));
      std::string rows;
      for (const auto& u : units) {
        auto probs = ctx.mlp.softmax_for(u);
        int l_x = 0;
        for (std::size_t j = 1; j < probs.size(); ++j)
          if (probs[j] > probs[l_x]) l_x = static_cast<int>(j);
        double score = score_one(val_method, ctx, u);
        nlohmann::json row{{"id", u.id},
                           {"l_x", l_x},
                           {"score", score},
                           {"verdict", score <= c ? "out-of-scope" : "in-scope"}};
        rows += row.dump() + "\n";
      }
      if (val_out.empty()) std::fputs(rows.c_str(), stdout);
      else write_file(val_out, rows);
      return kExitOk;
    }

    if (*adapt_cmd) {
      auto m = model::load_model(ad_model_path);
      auto bundle = validation::load_bundle(ad_bundle_path);
      auto units = harness::to_units(harness::load_corpus(ad_corpus_path));
      std::set<std::string> oos;
      {
        nlohmann::json ids;
        try {
          ids = nlohmann::json::parse(read_file(ad_oos_path));
        } catch (const nlohmann::json::parse_error& e) {
          throw FormatError(std::string("oos ids: ") + e.what(), 0);
        }
        if (!ids.is_array()) throw FormatError("oos ids file must be a JSON array", 0);
        for (const auto& v : ids) oos.insert(v.get<std::string>());
      }
      ad_cfg.fitness_threshold =
          ad_threshold >= 0 ? ad_threshold : harness::default_threshold(m.num_classes());
      auto result = adapt::adapt_corpus(units, oos, m, bundle, ad_cfg);
      harness::save_corpus(harness::from_units(result.corpus), ad_out);
      std::string rows;
      for (const auto& e : result.log) {
        nlohmann::json ops = nlohmann::json::array();
        for (const auto& rec : e.lineage)
          ops.push_back(nlohmann::json{{"op", static_cast<int>(rec.op.id)},
                                       {"name", transforms::op_name(rec.op.id)},
                                       {"seed", rec.op.rng_seed}});
        rows += nlohmann::json{{"id", e.id},
                               {"generations", e.generations},
                               {"final_fitness", e.final_fitness},
                               {"ops_applied", e.ops_applied},
                               {"adapted", e.adapted},
                               {"wall_ms", e.wall_ms},
                               {"ops", std::move(ops)}}
                    .dump() +
                "\n";
      }
      write_file(ad_log, rows);
      std::fprintf(stderr, "adapted %zu flagged inputs, wrote %s and %s\n", result.log.size(),
                   ad_out.c_str(), ad_log.c_str());
      return kExitOk;
    }

    if (*tf_cmd) {
      std::string source = read_file(tf_file);
      lang::Ast ast = lang::parse_source(source);
      if (tf_all) {
        std::vector<transforms::TransformOp> ops;
        for (int i = 1; i <= transforms::kNumOps; ++i)
          ops.push_back(
              {*transforms::op_from_number(i), tf_seed + static_cast<std::uint64_t>(i)});
        auto [out, recs] = transforms::apply_sequence(ast, ops);
        std::fputs(lang::print(out).c_str(), stdout);
      } else {
        if (tf_op.empty()) throw ConfigError("provide --op or --all", "--op");
        auto [out, rec] = transforms::apply(ast, parse_op(tf_op, tf_seed));
        std::fprintf(stderr, "%s: %d site(s) rewritten\n", transforms::op_name(rec.op.id),
                     rec.sites_rewritten);
        std::fputs(lang::print(out).c_str(), stdout);
      }
      return kExitOk;
    }

    if (*eval_cmd) {
      harness::ExperimentConfig cfg;
      if (!eval_config_path.empty()) cfg = harness::load_experiment_config(eval_config_path);
      if (eval_seed_opt->count() > 0) cfg.seed = eval_seed;
      if (!eval_strategy.empty()) cfg.strategy = eval_strategy;
      if (!eval_method.empty()) cfg.method = eval_method;
      if (eval_threshold >= 0) cfg.threshold = eval_threshold;
      if (!eval_output_dir.empty()) cfg.output_dir = eval_output_dir;
      auto result = harness::run_experiment(cfg);
      if (!eval_quiet) std::fputs(harness::report_table(result.report).c_str(), stdout);
      if (result.timing.tps)
        std::fprintf(stderr, "tps %.1f over %lld transformations\n", *result.timing.tps,
                     result.timing.transformations);
      return kExitOk;
    }

    if (*report_cmd) {
      auto report = harness::report_from_json(read_file(report_path));
      std::fputs(harness::report_table(report).c_str(), stdout);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error%s%s: %s\n", e.field.empty() ? "" : " at ",
                 e.field.c_str(), e.what());
    return kExitUsage;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "data error (line %zu): %s\n", e.line, e.what());
    return kExitData;
  } catch (const LexError& e) {
    std::fprintf(stderr, "data error (byte %zu): %s\n", e.offset, e.what());
    return kExitData;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "data error (token %zu): %s\n", e.token_index, e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
