#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codefit/ast.hpp"
#include "codefit/features.hpp"

namespace codefit::model {

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

/// One dense layer, weights laid out (in x out).
struct Dense {
  Matrix w;
  std::vector<double> b;
};

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.05;
  int batch_size = 32;
  double dropout_rate = 0.0;  // training-time regularization; off by default
  std::uint64_t rng_seed = 1;
};

std::vector<double> softmax(std::vector<double> logits);

/// All per-layer representations plus the softmax from one forward pass.
struct UnitActivations {
  std::vector<std::vector<double>> hidden;  // index k-1 holds layer k
  std::vector<double> probs;
};

/// Unit-level classifier contract consumed by validation and adaptation:
/// per-layer hidden representations plus the final softmax. Implemented by
/// the trainable MLP below and by the precomputed-representation adapter.
class LayeredModel {
 public:
  virtual ~LayeredModel() = default;
  virtual int num_classes() const = 0;
  virtual int num_layers() const = 0;
  virtual int layer_width(int k) const = 0;
  virtual std::vector<double> softmax_for(const lang::SourceUnit& unit) const = 0;
  virtual std::vector<double> hidden_for(const lang::SourceUnit& unit, int k) const = 0;
  virtual std::vector<double> logits_for(const lang::SourceUnit& unit) const;
  virtual UnitActivations activations_for(const lang::SourceUnit& unit) const;
};

/// Reference architecture: kVocabDim hashed features -> 4 ReLU layers of
/// width 64 -> softmax head.
class MlpModel : public LayeredModel {
 public:
  MlpModel() = default;
  MlpModel(int num_classes, std::uint64_t init_seed, int hidden_layers = 4,
           int hidden_width = 64, int input_dim = kVocabDim);

  int num_classes() const override { return head_.w.cols; }
  int num_layers() const override { return static_cast<int>(layers_.size()); }
  int layer_width(int k) const override;
  int input_dim() const { return layers_.empty() ? 0 : layers_[0].w.rows; }

  /// Post-activation representation at layer k, 1 <= k <= L.
  std::vector<double> hidden(const FeatureVector& x, int k) const;
  std::vector<double> logits(const FeatureVector& x) const;
  /// Softmax over logits; entries sum to 1 within 1e-9.
  std::vector<double> predict(const FeatureVector& x) const;

  /// Forward pass with inference-time dropout on every hidden layer
  /// (plain masking, deterministic in `seed`).
  std::vector<double> logits_dropout(const FeatureVector& x, double rate,
                                     std::uint64_t seed) const;

  std::vector<double> softmax_for(const lang::SourceUnit& unit) const override;
  std::vector<double> hidden_for(const lang::SourceUnit& unit, int k) const override;
  std::vector<double> logits_for(const lang::SourceUnit& unit) const override;
  UnitActivations activations_for(const lang::SourceUnit& unit) const override;

  std::vector<Dense>& layers() { return layers_; }
  const std::vector<Dense>& layers() const { return layers_; }
  Dense& head() { return head_; }
  const Dense& head() const { return head_; }

  std::uint64_t init_seed = 0;
  std::vector<double> epoch_loss;  // training cross-entropy per epoch

 private:
  std::vector<Dense> layers_;
  Dense head_;
};

/// Mini-batch SGD with cross-entropy loss. Deterministic for a fixed
/// cfg.rng_seed. Throws ConfigError when fewer than two classes appear.
MlpModel train(const std::vector<lang::SourceUnit>& corpus, const TrainConfig& cfg);

/// Mean cross-entropy of the model on (features, labels).
double cross_entropy(const MlpModel& m, const std::vector<FeatureVector>& xs,
                     const std::vector<int>& labels);

struct Gradients {
  std::vector<Dense> layers;
  Dense head;
};

/// Analytic full-batch gradients; checked against finite differences in the
/// test suite.
Gradients backprop(const MlpModel& m, const std::vector<FeatureVector>& xs,
                   const std::vector<int>& labels);

/// Single softmax head over fixed feature vectors (used for the per-layer
/// sub-model heads). Deterministic SGD, cross-entropy loss.
Dense train_head(const std::vector<std::vector<double>>& features,
                 const std::vector<int>& labels, int num_classes, const TrainConfig& cfg);

std::vector<double> head_logits(const Dense& head, const std::vector<double>& features);

}  // namespace codefit::model
