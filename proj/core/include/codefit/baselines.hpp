#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "codefit/mlp.hpp"
#include "codefit/validation.hpp"

namespace codefit::validation {

/// The baseline uncertainty metrics compared against the sub-model score.
/// All scores are oriented "higher = more in-scope" except ratio confidence,
/// which keeps its raw top-two ratio definition.
enum class BaselineMethod {
  Vanilla,
  TempScale,
  LeastConf,
  MarginConf,
  RatioConf,
  Entropy,
  PredEntropy,
  MutualInfo,
  McDropout,
  DeepEnsemble,
  HiddenDirect,
};

const char* baseline_name(BaselineMethod m);
std::optional<BaselineMethod> baseline_from_name(std::string_view name);

// ---- pure softmax statistics ----------------------------------------------

double vanilla_score(const std::vector<double>& probs);      // max p
double least_conf_score(const std::vector<double>& probs);   // -(1 - max p)
double margin_score(const std::vector<double>& probs);       // p1 - p2
double ratio_score(const std::vector<double>& probs);        // p2 / p1
double entropy_score(const std::vector<double>& probs);      // -H(p)

// ---- temperature scaling ----------------------------------------------------

/// Mean negative log-likelihood of the validation corpus at temperature T.
double nll_at_temperature(const model::LayeredModel& m,
                          const std::vector<lang::SourceUnit>& val_corpus, double T);

/// 1-D search for the T minimizing validation NLL; never returns a T worse
/// than T=1. ConfigError without a labeled validation corpus.
double fit_temperature(const model::LayeredModel& m,
                       const std::vector<lang::SourceUnit>& val_corpus);

double temp_scale_score(const model::LayeredModel& m, const lang::SourceUnit& unit, double T);

// ---- sampling-based metrics -------------------------------------------------

struct McConfig {
  int samples = 10;
  double rate = 0.1;
  std::uint64_t seed = 7;
};

/// Sampled winning score of dropout-averaged logits.
double mc_dropout_score(const model::MlpModel& m, const lang::SourceUnit& unit,
                        const McConfig& cfg);
/// -H of the dropout-averaged predictive distribution.
double pred_entropy_score(const model::MlpModel& m, const lang::SourceUnit& unit,
                          const McConfig& cfg);
/// -(H(mean p) - mean H(p)) over dropout samples.
double mutual_info_score(const model::MlpModel& m, const lang::SourceUnit& unit,
                         const McConfig& cfg);

/// Sampled winning score of the ensemble-averaged softmax.
double deep_ensemble_score(const std::vector<const model::MlpModel*>& members,
                           const lang::SourceUnit& unit);

// ---- ablation: untrained per-layer projection -------------------------------

/// Replaces trained heads with a fixed random linear map per layer, then
/// aggregates the same agreement scores.
double hidden_direct_score(const model::LayeredModel& m, const lang::SourceUnit& unit,
                           WeightScheme scheme, std::uint64_t proj_seed);

}  // namespace codefit::validation
