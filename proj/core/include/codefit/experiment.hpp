#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codefit/adapt.hpp"
#include "codefit/baselines.hpp"
#include "codefit/corpus.hpp"
#include "codefit/corpus_gen.hpp"
#include "codefit/metrics.hpp"
#include "codefit/mlp.hpp"

namespace codefit::harness {

struct MetricsReport {
  int num_classes = 0;
  std::string method;
  std::string strategy;
  double threshold = 0.0;
  double train_accuracy = 0.0;
  ClassificationScores before, after;
  CorrectionMetrics correction;
  std::optional<double> auc;
  // wall-clock derived; kept out of the canonical report so identical runs
  // serialize byte-identically (measured TPS lands in timing.json)
  std::optional<double> tps;
};

std::string report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);
std::string report_table(const MetricsReport& r);

struct ExperimentConfig {
  std::uint64_t seed = 1;

  struct Corpus {
    int classes = 4;
    int train_count = 2000;
    int val_count = 400;
    int test_count = 600;
    double distractor_rate = 0.25;
    // the held-out split may differ from training: its own confusable-twin
    // rate (-1 = same as distractor_rate) and a shifted-dialect fraction
    double test_distractor_rate = -1.0;
    double test_shift_rate = 0.0;
    std::string train_path, val_path, test_path;  // set -> load instead of generating
  } corpus;

  std::string model_path;  // set -> load instead of training
  model::TrainConfig train;

  std::string bundle_path;  // set -> load instead of building
  validation::DsmgConfig dsmg;

  std::string method = "dsmg";
  std::optional<double> threshold;  // default 0.3 for 2 classes, 0.2 otherwise

  std::string strategy = "aes";  // aes | random | hillclimb | none
  adapt::AesConfig aes;
  std::optional<double> adapt_threshold;  // default: the validation threshold
  int search_budget = 15;                 // transformation cap for random/hillclimb

  std::string output_dir;  // empty -> no artifacts written
};

/// Reads the declarative config file (JSON). ConfigError names the offending
/// field path.
ExperimentConfig load_experiment_config(const std::string& path);

double default_threshold(int num_classes);

struct ExperimentResult {
  MetricsReport report;
  TpsStats timing;
  std::vector<std::string> oos_ids;                 // flagged inputs, corpus order
  std::vector<double> scores;                        // validation scores, corpus order
  std::vector<int> before_predictions, after_predictions, truth;
  std::vector<adapt::AdaptLogEntry> adapt_log;
  std::vector<lang::SourceUnit> adapted;
};

/// Full pipeline: corpus -> model -> sub-model bundle -> validation ->
/// adaptation -> re-prediction -> metrics. Deterministic for a fixed config
/// and seed; artifacts land under cfg.output_dir when set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Single-operator search baselines, both capped at `budget` transformations
/// per input.
adapt::AdaptResult random_search_adapt(const std::vector<lang::SourceUnit>& test,
                                       const std::set<std::string>& oos_ids,
                                       const model::LayeredModel& m,
                                       const validation::SubModelBundle& bundle,
                                       double threshold, int budget, std::uint64_t seed);

adapt::AdaptResult hill_climb_adapt(const std::vector<lang::SourceUnit>& test,
                                    const std::set<std::string>& oos_ids,
                                    const model::LayeredModel& m,
                                    const validation::SubModelBundle& bundle, double threshold,
                                    int budget, std::uint64_t seed);

}  // namespace codefit::harness
