#include "codefit/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "codefit/errors.hpp"

namespace codefit::model {

namespace {

using nlohmann::json;

json dense_to_json(const Dense& d) {
  return json{{"rows", d.w.rows}, {"cols", d.w.cols}, {"w", d.w.a}, {"b", d.b}};
}

Dense dense_from_json(const json& j) {
  Dense d;
  d.w = Matrix(j.at("rows").get<int>(), j.at("cols").get<int>());
  d.w.a = j.at("w").get<std::vector<double>>();
  d.b = j.at("b").get<std::vector<double>>();
  if (d.w.a.size() != static_cast<std::size_t>(d.w.rows) * d.w.cols)
    throw FormatError("dense weight size mismatch", 0);
  return d;
}

}  // namespace

void save_model(const MlpModel& m, const std::string& path) {
  json j;
  j["version"] = 1;
  j["kind"] = "mlp";
  j["num_classes"] = m.num_classes();
  j["num_layers"] = m.num_layers();
  j["vocab_dim"] = m.input_dim();
  j["seed"] = m.init_seed;
  j["widths"] = [&] {
    std::vector<int> w;
    for (int k = 1; k <= m.num_layers(); ++k) w.push_back(m.layer_width(k));
    return w;
  }();
  j["epoch_loss"] = m.epoch_loss;
  json layers = json::array();
  for (const auto& layer : m.layers()) layers.push_back(dense_to_json(layer));
  j["layers"] = std::move(layers);
  j["head"] = dense_to_json(m.head());

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model checkpoint: " + path);
  out << j.dump(2) << '\n';
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read model checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model checkpoint: ") + e.what(), 0);
  }
  if (j.value("version", 0) != 1 || j.value("kind", "") != "mlp")
    throw FormatError("unsupported model checkpoint format", 0);

  MlpModel m;
  m.init_seed = j.value("seed", 0ull);
  if (j.contains("epoch_loss")) m.epoch_loss = j["epoch_loss"].get<std::vector<double>>();
  for (const auto& layer : j.at("layers")) m.layers().push_back(dense_from_json(layer));
  m.head() = dense_from_json(j.at("head"));
  return m;
}

int PrecomputedModel::layer_width(int k) const {
  if (k < 1 || k > num_layers_) throw IndexError("layer index outside [1, L]");
  return widths_[k - 1];
}

const PrecomputedModel::Row& PrecomputedModel::row(const std::string& id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) throw FormatError("no precomputed representation for id: " + id, 0);
  return it->second;
}

std::vector<double> PrecomputedModel::softmax_for(const lang::SourceUnit& unit) const {
  return row(unit.id).probs;
}

std::vector<double> PrecomputedModel::hidden_for(const lang::SourceUnit& unit, int k) const {
  if (k < 1 || k > num_layers_) throw IndexError("layer index outside [1, L]");
  return row(unit.id).layers[k - 1];
}

PrecomputedModel PrecomputedModel::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read representation dump: " + path);
  PrecomputedModel m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("representation dump: ") + e.what(), lineno);
    }
    if (!j.contains("id") || !j.contains("softmax"))
      throw FormatError("representation row needs id and softmax", lineno);
    Row row;
    row.probs = j["softmax"].get<std::vector<double>>();
    for (int k = 1;; ++k) {
      std::string key = "layer_" + std::to_string(k) + "_repr";
      if (!j.contains(key)) break;
      row.layers.push_back(j[key].get<std::vector<double>>());
    }
    if (row.layers.empty()) throw FormatError("representation row has no layers", lineno);
    if (m.rows_.empty()) {
      m.num_layers_ = static_cast<int>(row.layers.size());
      m.num_classes_ = static_cast<int>(row.probs.size());
      for (const auto& l : row.layers) m.widths_.push_back(static_cast<int>(l.size()));
    } else if (static_cast<int>(row.layers.size()) != m.num_layers_ ||
               static_cast<int>(row.probs.size()) != m.num_classes_) {
      throw FormatError("inconsistent representation row shape", lineno);
    }
    std::string id = j["id"].get<std::string>();
    if (!m.rows_.emplace(std::move(id), std::move(row)).second)
      throw FormatError("duplicate id in representation dump", lineno);
  }
  if (m.rows_.empty()) throw FormatError("empty representation dump", 0);
  return m;
}

}  // namespace codefit::model
