#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "codefit/mlp.hpp"

namespace codefit::model {

/// Versioned JSON checkpoint (weights round-trip bit-exactly).
void save_model(const MlpModel& m, const std::string& path);
MlpModel load_model(const std::string& path);

/// Adapter serving representations dumped by an external model. JSONL rows:
///   {"id": "...", "layer_1_repr": [...], ..., "layer_L_repr": [...],
///    "softmax": [...]}
/// Lookup is by unit id; unknown ids throw FormatError.
class PrecomputedModel : public LayeredModel {
 public:
  static PrecomputedModel load_jsonl(const std::string& path);

  int num_classes() const override { return num_classes_; }
  int num_layers() const override { return num_layers_; }
  int layer_width(int k) const override;
  std::vector<double> softmax_for(const lang::SourceUnit& unit) const override;
  std::vector<double> hidden_for(const lang::SourceUnit& unit, int k) const override;

 private:
  struct Row {
    std::vector<std::vector<double>> layers;
    std::vector<double> probs;
  };
  const Row& row(const std::string& id) const;

  std::unordered_map<std::string, Row> rows_;
  int num_classes_ = 0;
  int num_layers_ = 0;
  std::vector<int> widths_;
};

}  // namespace codefit::model
