#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codefit/ast.hpp"
#include "codefit/mlp.hpp"

namespace codefit::validation {

/// One per-layer probe: the base model is frozen up to layer_k, the masked
/// hidden representation feeds a freshly trained dense head.
struct SubModel {
  int layer_k = 1;
  int sample_index = 0;
  std::vector<double> dropout_mask;  // 0/1 per unit, at least one 1
  model::Dense head;
};

enum class WeightScheme { Linear, Logarithmic, Exponential };

const char* scheme_name(WeightScheme s);
std::optional<WeightScheme> scheme_from_name(std::string_view name);

/// Every hidden-layer index of the model, 1..L.
std::vector<int> all_layers(const model::LayeredModel& m);

/// Layer-growth weight: deeper layers count more.
double scheme_weight(WeightScheme s, int layer_k, int num_layers);

struct SubModelBundle {
  std::vector<SubModel> submodels;
  WeightScheme weight_scheme = WeightScheme::Linear;
  int num_layers = 0;
  int num_classes = 0;

  std::vector<double> weights() const;
};

struct DsmgConfig {
  std::vector<int> layers{1, 2, 3, 4};  // the reference architecture's hidden layers
  int samples_per_layer = 3;
  double dropout_rate = 0.1;
  model::TrainConfig head_train{.epochs = 20, .learning_rate = 0.5, .batch_size = 32,
                                .dropout_rate = 0.05, .rng_seed = 1};
  WeightScheme scheme = WeightScheme::Linear;
  std::uint64_t rng_seed = 1;
};

/// Offline stage: draws dropout masks per (layer, sample) and trains each
/// head on the frozen model's masked representations of the train corpus.
SubModelBundle build_submodels(const model::LayeredModel& m,
                               const std::vector<lang::SourceUnit>& train_corpus,
                               const DsmgConfig& cfg);

/// Eq-style agreement score in [-1, 2]: confidence gap added on agreement
/// with the base prediction l_x, subtracted on disagreement.
double validity_score_k(int l_x, const std::vector<double>& probs);

/// Weighted mean of per-sub-model scores.
double final_score(const std::vector<double>& scores, const std::vector<double>& weights);

struct ValidityReport {
  std::string input_id;
  int predicted_label = 0;
  std::vector<double> per_submodel_scores;
  double final_score = 0.0;
  double threshold = 0.0;
  bool out_of_scope = false;  // final_score <= threshold
};

std::vector<double> submodel_probs(const model::LayeredModel& m, const SubModel& sm,
                                   const lang::SourceUnit& unit);

/// Read-only over model and bundle once built; per-input calls are safe to
/// run concurrently.

ValidityReport validate(const model::LayeredModel& m, const SubModelBundle& bundle,
                        const lang::SourceUnit& unit, double threshold);

void save_bundle(const SubModelBundle& bundle, const std::string& path);
SubModelBundle load_bundle(const std::string& path);

}  // namespace codefit::validation
