#include "codefit/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "codefit/errors.hpp"
#include "codefit/rng.hpp"

namespace codefit::validation {

namespace {

std::pair<double, double> top_two(const std::vector<double>& probs) {
  double best = -1.0, second = -1.0;
  for (double p : probs) {
    if (p > best) {
      second = best;
      best = p;
    } else if (p > second) {
      second = p;
    }
  }
  return {best, second};
}

double entropy_of(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

std::vector<double> mean_of(const std::vector<std::vector<double>>& rows) {
  std::vector<double> mean(rows[0].size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j) mean[j] += r[j];
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

std::vector<std::vector<double>> dropout_prob_samples(const model::MlpModel& m,
                                                      const lang::SourceUnit& unit,
                                                      const McConfig& cfg) {
  auto x = model::featurize(unit);
  std::vector<std::vector<double>> rows;
  rows.reserve(cfg.samples);
  for (int s = 0; s < cfg.samples; ++s)
    rows.push_back(model::softmax(
        m.logits_dropout(x, cfg.rate, mix_seed(cfg.seed, static_cast<std::uint64_t>(s)))));
  return rows;
}

}  // namespace

const char* baseline_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::Vanilla: return "vanilla";
    case BaselineMethod::TempScale: return "temp_scale";
    case BaselineMethod::LeastConf: return "least_conf";
    case BaselineMethod::MarginConf: return "margin_conf";
    case BaselineMethod::RatioConf: return "ratio_conf";
    case BaselineMethod::Entropy: return "entropy";
    case BaselineMethod::PredEntropy: return "pred_entropy";
    case BaselineMethod::MutualInfo: return "mutual_info";
    case BaselineMethod::McDropout: return "mc_dropout";
    case BaselineMethod::DeepEnsemble: return "deep_ensemble";
    case BaselineMethod::HiddenDirect: return "hidden_direct";
  }
  return "vanilla";
}

std::optional<BaselineMethod> baseline_from_name(std::string_view name) {
  static constexpr std::pair<std::string_view, BaselineMethod> kMap[] = {
      {"vanilla", BaselineMethod::Vanilla},
      {"temp_scale", BaselineMethod::TempScale},
      {"least_conf", BaselineMethod::LeastConf},
      {"margin_conf", BaselineMethod::MarginConf},
      {"ratio_conf", BaselineMethod::RatioConf},
      {"entropy", BaselineMethod::Entropy},
      {"pred_entropy", BaselineMethod::PredEntropy},
      {"mutual_info", BaselineMethod::MutualInfo},
      {"mc_dropout", BaselineMethod::McDropout},
      {"deep_ensemble", BaselineMethod::DeepEnsemble},
      {"hidden_direct", BaselineMethod::HiddenDirect},
  };
  for (const auto& [n, m] : kMap)
    if (n == name) return m;
  return std::nullopt;
}

double vanilla_score(const std::vector<double>& probs) { return top_two(probs).first; }

double least_conf_score(const std::vector<double>& probs) {
  return -(1.0 - top_two(probs).first);
}

double margin_score(const std::vector<double>& probs) {
  auto [p1, p2] = top_two(probs);
  return p1 - p2;
}

double ratio_score(const std::vector<double>& probs) {
  auto [p1, p2] = top_two(probs);
  return p2 / p1;
}

double entropy_score(const std::vector<double>& probs) { return -entropy_of(probs); }

double nll_at_temperature(const model::LayeredModel& m,
                          const std::vector<lang::SourceUnit>& val_corpus, double T) {
  double total = 0.0;
  for (const auto& unit : val_corpus) {
    auto logits = m.logits_for(unit);
    for (double& v : logits) v /= T;
    auto probs = model::softmax(std::move(logits));
    total += -std::log(std::max(probs[*unit.label], 1e-300));
  }
  return total / static_cast<double>(val_corpus.size());
}

double fit_temperature(const model::LayeredModel& m,
                       const std::vector<lang::SourceUnit>& val_corpus) {
  if (val_corpus.empty())
    throw ConfigError("temperature scaling needs a labeled validation corpus", "temp_scale");
  for (const auto& unit : val_corpus)
    if (!unit.label)
      throw ConfigError("temperature scaling needs a labeled validation corpus", "temp_scale");

  // ternary search over log T; NLL(T) is unimodal in practice
  double lo = std::log(0.05), hi = std::log(20.0);
  for (int iter = 0; iter < 80; ++iter) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (nll_at_temperature(m, val_corpus, std::exp(m1)) <
        nll_at_temperature(m, val_corpus, std::exp(m2)))
      hi = m2;
    else
      lo = m1;
  }
  double T = std::exp(0.5 * (lo + hi));
  // never fit worse than the identity temperature
  if (nll_at_temperature(m, val_corpus, T) > nll_at_temperature(m, val_corpus, 1.0)) T = 1.0;
  return T;
}

double temp_scale_score(const model::LayeredModel& m, const lang::SourceUnit& unit, double T) {
  auto logits = m.logits_for(unit);
  for (double& v : logits) v /= T;
  return vanilla_score(model::softmax(std::move(logits)));
}

double mc_dropout_score(const model::MlpModel& m, const lang::SourceUnit& unit,
                        const McConfig& cfg) {
  auto x = model::featurize(unit);
  std::vector<std::vector<double>> logit_rows;
  logit_rows.reserve(cfg.samples);
  for (int s = 0; s < cfg.samples; ++s)
    logit_rows.push_back(
        m.logits_dropout(x, cfg.rate, mix_seed(cfg.seed, static_cast<std::uint64_t>(s))));
  return vanilla_score(model::softmax(mean_of(logit_rows)));
}

double pred_entropy_score(const model::MlpModel& m, const lang::SourceUnit& unit,
                          const McConfig& cfg) {
  return -entropy_of(mean_of(dropout_prob_samples(m, unit, cfg)));
}

double mutual_info_score(const model::MlpModel& m, const lang::SourceUnit& unit,
                         const McConfig& cfg) {
  auto rows = dropout_prob_samples(m, unit, cfg);
  double mean_entropy = 0.0;
  for (const auto& r : rows) mean_entropy += entropy_of(r);
  mean_entropy /= static_cast<double>(rows.size());
  return -(entropy_of(mean_of(rows)) - mean_entropy);
}

double deep_ensemble_score(const std::vector<const model::MlpModel*>& members,
                           const lang::SourceUnit& unit) {
  if (members.empty()) throw ConfigError("deep ensemble needs at least one member", "ensemble");
  std::vector<std::vector<double>> rows;
  rows.reserve(members.size());
  for (const auto* m : members) rows.push_back(m->softmax_for(unit));
  return vanilla_score(mean_of(rows));
}

double hidden_direct_score(const model::LayeredModel& m, const lang::SourceUnit& unit,
                           WeightScheme scheme, std::uint64_t proj_seed) {
  auto probs = m.softmax_for(unit);
  int l_x = 0;
  for (std::size_t j = 1; j < probs.size(); ++j)
    if (probs[j] > probs[l_x]) l_x = static_cast<int>(j);

  int L = m.num_layers();
  int n = m.num_classes();
  std::vector<double> scores, weights;
  for (int k = 1; k <= L; ++k) {
    auto rep = m.hidden_for(unit, k);
    Rng rng(mix_seed(proj_seed, static_cast<std::uint64_t>(k)));
    double limit = std::sqrt(6.0 / (static_cast<double>(rep.size()) + n));
    std::vector<double> logits(n, 0.0);
    for (double r : rep) {
      for (int j = 0; j < n; ++j) logits[j] += r * ((rng.unit() * 2.0 - 1.0) * limit);
    }
    scores.push_back(validity_score_k(l_x, model::softmax(std::move(logits))));
    weights.push_back(scheme_weight(scheme, k, L));
  }
  return final_score(scores, weights);
}

}  // namespace codefit::validation
