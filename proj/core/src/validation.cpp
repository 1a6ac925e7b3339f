#include "codefit/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "codefit/errors.hpp"
#include "codefit/rng.hpp"

namespace codefit::validation {

using nlohmann::json;

const char* scheme_name(WeightScheme s) {
  switch (s) {
    case WeightScheme::Linear: return "linear";
    case WeightScheme::Logarithmic: return "logarithmic";
    case WeightScheme::Exponential: return "exponential";
  }
  return "linear";
}

std::optional<WeightScheme> scheme_from_name(std::string_view name) {
  if (name == "linear") return WeightScheme::Linear;
  if (name == "logarithmic") return WeightScheme::Logarithmic;
  if (name == "exponential") return WeightScheme::Exponential;
  return std::nullopt;
}

double scheme_weight(WeightScheme s, int layer_k, int num_layers) {
  switch (s) {
    case WeightScheme::Linear: return static_cast<double>(layer_k);
    case WeightScheme::Logarithmic: return std::log(static_cast<double>(layer_k) + 1.0);
    case WeightScheme::Exponential:
      return std::exp(static_cast<double>(layer_k) / static_cast<double>(num_layers));
  }
  return 1.0;
}

std::vector<int> all_layers(const model::LayeredModel& m) {
  std::vector<int> layers;
  for (int k = 1; k <= m.num_layers(); ++k) layers.push_back(k);
  return layers;
}

std::vector<double> SubModelBundle::weights() const {
  std::vector<double> w;
  w.reserve(submodels.size());
  for (const auto& sm : submodels) w.push_back(scheme_weight(weight_scheme, sm.layer_k, num_layers));
  return w;
}

SubModelBundle build_submodels(const model::LayeredModel& m,
                               const std::vector<lang::SourceUnit>& train_corpus,
                               const DsmgConfig& cfg) {
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw ConfigError("dropout_rate must be in [0,1)", "dsmg.dropout_rate");
  if (cfg.samples_per_layer < 1)
    throw ConfigError("samples_per_layer must be >= 1", "dsmg.samples_per_layer");
  if (cfg.layers.empty()) throw ConfigError("layer set must not be empty", "dsmg.layers");

  std::vector<int> layers = cfg.layers;
  std::sort(layers.begin(), layers.end());
  for (int k : layers)
    if (k < 1 || k > m.num_layers())
      throw ConfigError("layer index outside the model's [1, L]", "dsmg.layers");

  std::vector<int> labels;
  labels.reserve(train_corpus.size());
  for (const auto& unit : train_corpus) {
    if (!unit.label) throw ConfigError("sub-model training corpus must be labeled", "corpus");
    labels.push_back(*unit.label);
  }

  SubModelBundle bundle;
  bundle.weight_scheme = cfg.scheme;
  bundle.num_layers = m.num_layers();
  bundle.num_classes = m.num_classes();

  for (int k : layers) {
    // the frozen prefix is shared by all samples of this layer
    std::vector<std::vector<double>> reps;
    reps.reserve(train_corpus.size());
    for (const auto& unit : train_corpus) reps.push_back(m.hidden_for(unit, k));
    int width = m.layer_width(k);

    for (int s = 0; s < cfg.samples_per_layer; ++s) {
      SubModel sm;
      sm.layer_k = k;
      sm.sample_index = s;
      sm.dropout_mask.assign(width, 1.0);
      Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(k),
                       static_cast<std::uint64_t>(s)));
      if (cfg.dropout_rate > 0.0) {
        bool any = false;
        for (double& v : sm.dropout_mask) {
          v = rng.unit() < cfg.dropout_rate ? 0.0 : 1.0;
          any = any || v > 0.0;
        }
        if (!any) sm.dropout_mask[rng.below(width)] = 1.0;  // retain at least one unit
      }

      std::vector<std::vector<double>> masked = reps;
      for (auto& r : masked)
        for (int j = 0; j < width; ++j) r[j] *= sm.dropout_mask[j];

      model::TrainConfig head_cfg = cfg.head_train;
      head_cfg.rng_seed = mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(1000 + s));
      sm.head = model::train_head(masked, labels, bundle.num_classes, head_cfg);
      bundle.submodels.push_back(std::move(sm));
    }
  }
  return bundle;
}

double validity_score_k(int l_x, const std::vector<double>& probs) {
  int l_h = 0;
  for (std::size_t j = 1; j < probs.size(); ++j)
    if (probs[j] > probs[l_h]) l_h = static_cast<int>(j);

  if (probs[l_x] == probs[l_h]) {
    // agreement (ties count as agreement): add the best-versus-second-best gap
    int l_s = l_x == 0 ? 1 : 0;
    for (std::size_t j = 0; j < probs.size(); ++j)
      if (static_cast<int>(j) != l_x && probs[j] > probs[l_s]) l_s = static_cast<int>(j);
    return probs[l_x] + (probs[l_x] - probs[l_s]);
  }
  return probs[l_x] - (probs[l_h] - probs[l_x]);
}

double final_score(const std::vector<double>& scores, const std::vector<double>& weights) {
  if (scores.size() != weights.size() || scores.empty())
    throw LengthMismatch("scores and weights must have equal nonzero length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    num += scores[i] * weights[i];
    den += weights[i];
  }
  return num / den;
}

std::vector<double> submodel_probs(const model::LayeredModel& m, const SubModel& sm,
                                   const lang::SourceUnit& unit) {
  std::vector<double> rep = m.hidden_for(unit, sm.layer_k);
  for (std::size_t j = 0; j < rep.size(); ++j) rep[j] *= sm.dropout_mask[j];
  return model::softmax(model::head_logits(sm.head, rep));
}

ValidityReport validate(const model::LayeredModel& m, const SubModelBundle& bundle,
                        const lang::SourceUnit& unit, double threshold) {
  ValidityReport report;
  report.input_id = unit.id;
  report.threshold = threshold;

  model::UnitActivations acts = m.activations_for(unit);
  report.predicted_label = 0;
  for (std::size_t j = 1; j < acts.probs.size(); ++j)
    if (acts.probs[j] > acts.probs[report.predicted_label])
      report.predicted_label = static_cast<int>(j);

  report.per_submodel_scores.reserve(bundle.submodels.size());
  for (const auto& sm : bundle.submodels) {
    std::vector<double> rep = acts.hidden[sm.layer_k - 1];
    for (std::size_t j = 0; j < rep.size(); ++j) rep[j] *= sm.dropout_mask[j];
    report.per_submodel_scores.push_back(validity_score_k(
        report.predicted_label, model::softmax(model::head_logits(sm.head, rep))));
  }

  report.final_score = final_score(report.per_submodel_scores, bundle.weights());
  report.out_of_scope = report.final_score <= threshold;
  return report;
}

void save_bundle(const SubModelBundle& bundle, const std::string& path) {
  json j;
  j["version"] = 1;
  j["kind"] = "submodel-bundle";
  j["weight_scheme"] = scheme_name(bundle.weight_scheme);
  j["num_layers"] = bundle.num_layers;
  j["num_classes"] = bundle.num_classes;
  json subs = json::array();
  for (const auto& sm : bundle.submodels) {
    subs.push_back(json{{"layer", sm.layer_k},
                        {"sample", sm.sample_index},
                        {"mask", sm.dropout_mask},
                        {"head_rows", sm.head.w.rows},
                        {"head_cols", sm.head.w.cols},
                        {"head_w", sm.head.w.a},
                        {"head_b", sm.head.b}});
  }
  j["submodels"] = std::move(subs);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write bundle checkpoint: " + path);
  out << j.dump(2) << '\n';
}

SubModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read bundle checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("bundle checkpoint: ") + e.what(), 0);
  }
  if (j.value("version", 0) != 1 || j.value("kind", "") != "submodel-bundle")
    throw FormatError("unsupported bundle checkpoint format", 0);

  SubModelBundle bundle;
  auto scheme = scheme_from_name(j.value("weight_scheme", "linear"));
  if (!scheme) throw FormatError("unknown weight scheme", 0);
  bundle.weight_scheme = *scheme;
  bundle.num_layers = j.at("num_layers").get<int>();
  bundle.num_classes = j.at("num_classes").get<int>();
  for (const auto& s : j.at("submodels")) {
    SubModel sm;
    sm.layer_k = s.at("layer").get<int>();
    sm.sample_index = s.at("sample").get<int>();
    sm.dropout_mask = s.at("mask").get<std::vector<double>>();
    sm.head.w = model::Matrix(s.at("head_rows").get<int>(), s.at("head_cols").get<int>());
    sm.head.w.a = s.at("head_w").get<std::vector<double>>();
    sm.head.b = s.at("head_b").get<std::vector<double>>();
    bundle.submodels.push_back(std::move(sm));
  }
  return bundle;
}

}  // namespace codefit::validation
