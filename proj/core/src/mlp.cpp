#include "codefit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "codefit/errors.hpp"
#include "codefit/rng.hpp"

namespace codefit::model {

namespace {

void glorot_init(Dense& d, Rng& rng) {
  double limit = std::sqrt(6.0 / (d.w.rows + d.w.cols));
  for (double& v : d.w.a) v = (rng.unit() * 2.0 - 1.0) * limit;
  std::fill(d.b.begin(), d.b.end(), 0.0);
}

// He-style init that keeps ||h|| ~ 1 through the ReLU stack. The feature
// vector is unit L2 norm (not unit variance per coordinate), so the first
// layer scales by its output width, like the 64-wide hidden layers.
void relu_stack_init(Dense& d, Rng& rng, bool unit_norm_input) {
  int fan = unit_norm_input ? d.w.cols : d.w.rows;
  double limit = std::sqrt(3.0 * 2.0 / fan);
  for (double& v : d.w.a) v = (rng.unit() * 2.0 - 1.0) * limit;
  std::fill(d.b.begin(), d.b.end(), 0.0);
}

// out = relu(x W + b); optional dropout mask applied after activation
std::vector<double> dense_forward(const Dense& d, const std::vector<double>& x, bool relu) {
  std::vector<double> out(d.b);
  for (int i = 0; i < d.w.rows; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;  // hashed features are sparse
    const double* row = &d.w.a[static_cast<std::size_t>(i) * d.w.cols];
    for (int j = 0; j < d.w.cols; ++j) out[j] += xi * row[j];
  }
  if (relu)
    for (double& v : out) v = v > 0.0 ? v : 0.0;
  return out;
}

}  // namespace

std::vector<double> softmax(std::vector<double> logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

std::vector<double> LayeredModel::logits_for(const lang::SourceUnit& unit) const {
  auto probs = softmax_for(unit);
  for (double& p : probs) p = std::log(std::max(p, 1e-300));
  return probs;
}

UnitActivations LayeredModel::activations_for(const lang::SourceUnit& unit) const {
  UnitActivations acts;
  for (int k = 1; k <= num_layers(); ++k) acts.hidden.push_back(hidden_for(unit, k));
  acts.probs = softmax_for(unit);
  return acts;
}

MlpModel::MlpModel(int num_classes, std::uint64_t seed, int hidden_layers, int hidden_width,
                   int input_dim) {
  init_seed = seed;
  Rng rng(mix_seed(seed, 0x6d6c70u));
  layers_.resize(hidden_layers);
  for (int k = 0; k < hidden_layers; ++k) {
    int in = k == 0 ? input_dim : hidden_width;
    layers_[k].w = Matrix(in, hidden_width);
    layers_[k].b.assign(hidden_width, 0.0);
    relu_stack_init(layers_[k], rng, k == 0);
  }
  head_.w = Matrix(hidden_width, num_classes);
  head_.b.assign(num_classes, 0.0);
  glorot_init(head_, rng);
}

int MlpModel::layer_width(int k) const {
  if (k < 1 || k > num_layers()) throw IndexError("layer index outside [1, L]");
  return layers_[k - 1].w.cols;
}

std::vector<double> MlpModel::hidden(const FeatureVector& x, int k) const {
  if (static_cast<int>(x.values.size()) != input_dim())
    throw DimensionError("feature vector width mismatch");
  if (k < 1 || k > num_layers()) throw IndexError("layer index outside [1, L]");
  std::vector<double> h = dense_forward(layers_[0], x.values, true);
  for (int i = 1; i < k; ++i) h = dense_forward(layers_[i], h, true);
  return h;
}

std::vector<double> MlpModel::logits(const FeatureVector& x) const {
  return dense_forward(head_, hidden(x, num_layers()), false);
}

std::vector<double> MlpModel::predict(const FeatureVector& x) const {
  return softmax(logits(x));
}

std::vector<double> MlpModel::logits_dropout(const FeatureVector& x, double rate,
                                             std::uint64_t seed) const {
  if (static_cast<int>(x.values.size()) != input_dim())
    throw DimensionError("feature vector width mismatch");
  Rng rng(seed);
  std::vector<double> h = x.values;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    h = dense_forward(layers_[k], h, true);
    if (rate > 0.0)
      for (double& v : h)
        if (rng.unit() < rate) v = 0.0;
  }
  return dense_forward(head_, h, false);
}

std::vector<double> MlpModel::softmax_for(const lang::SourceUnit& unit) const {
  return predict(featurize(unit));
}

std::vector<double> MlpModel::hidden_for(const lang::SourceUnit& unit, int k) const {
  return hidden(featurize(unit), k);
}

std::vector<double> MlpModel::logits_for(const lang::SourceUnit& unit) const {
  return logits(featurize(unit));
}

UnitActivations MlpModel::activations_for(const lang::SourceUnit& unit) const {
  auto x = featurize(unit);
  if (static_cast<int>(x.values.size()) != input_dim())
    throw DimensionError("feature vector width mismatch");
  UnitActivations acts;
  std::vector<double> h = x.values;
  for (const auto& layer : layers_) {
    h = dense_forward(layer, h, true);
    acts.hidden.push_back(h);
  }
  acts.probs = softmax(dense_forward(head_, h, false));
  return acts;
}

double cross_entropy(const MlpModel& m, const std::vector<FeatureVector>& xs,
                     const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto p = m.predict(xs[i]);
    total += -std::log(std::max(p[labels[i]], 1e-12));
  }
  return total / static_cast<double>(xs.size());
}

namespace {

struct ForwardTrace {
  std::vector<std::vector<double>> h;  // per layer, post-activation (post-mask)
  std::vector<double> probs;
};

ForwardTrace traced_forward(const MlpModel& m, const std::vector<double>& x,
                            const std::vector<std::vector<double>>* masks) {
  ForwardTrace t;
  const auto& layers = m.layers();
  std::vector<double> cur = x;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    cur = dense_forward(layers[k], cur, true);
    if (masks)
      for (std::size_t j = 0; j < cur.size(); ++j) cur[j] *= (*masks)[k][j];
    t.h.push_back(cur);
  }
  t.probs = softmax(dense_forward(m.head(), cur, false));
  return t;
}

// Accumulates dL/dparams for one sample into g. Returns nothing; relies on
// ReLU marking via h > 0 (post-activation trace).
void accumulate_gradients(const MlpModel& m, const std::vector<double>& x, int label,
                          const ForwardTrace& t, Gradients& g) {
  const auto& layers = m.layers();
  int L = static_cast<int>(layers.size());

  std::vector<double> delta = t.probs;  // dL/dlogits = p - onehot
  delta[label] -= 1.0;

  const auto& top = t.h[L - 1];
  for (int i = 0; i < m.head().w.rows; ++i) {
    if (top[i] == 0.0) continue;
    for (int j = 0; j < m.head().w.cols; ++j) g.head.w.at(i, j) += top[i] * delta[j];
  }
  for (int j = 0; j < m.head().w.cols; ++j) g.head.b[j] += delta[j];

  // back through head into layer L
  std::vector<double> dh(m.head().w.rows, 0.0);
  for (int i = 0; i < m.head().w.rows; ++i)
    for (int j = 0; j < m.head().w.cols; ++j) dh[i] += m.head().w.at(i, j) * delta[j];

  for (int k = L - 1; k >= 0; --k) {
    // ReLU (and dropout mask): gradient flows only where activation survived
    for (std::size_t i = 0; i < dh.size(); ++i)
      if (t.h[k][i] <= 0.0) dh[i] = 0.0;

    const std::vector<double>& input = k == 0 ? x : t.h[k - 1];
    for (std::size_t i = 0; i < input.size(); ++i) {
      if (input[i] == 0.0) continue;
      for (std::size_t j = 0; j < dh.size(); ++j)
        g.layers[k].w.at(static_cast<int>(i), static_cast<int>(j)) += input[i] * dh[j];
    }
    for (std::size_t j = 0; j < dh.size(); ++j) g.layers[k].b[j] += dh[j];

    if (k > 0) {
      std::vector<double> prev(layers[k].w.rows, 0.0);
      for (int i = 0; i < layers[k].w.rows; ++i)
        for (int j = 0; j < layers[k].w.cols; ++j) prev[i] += layers[k].w.at(i, j) * dh[j];
      dh = std::move(prev);
    }
  }
}

Gradients zero_gradients(const MlpModel& m) {
  Gradients g;
  g.layers.resize(m.layers().size());
  for (std::size_t k = 0; k < m.layers().size(); ++k) {
    g.layers[k].w = Matrix(m.layers()[k].w.rows, m.layers()[k].w.cols);
    g.layers[k].b.assign(m.layers()[k].b.size(), 0.0);
  }
  g.head.w = Matrix(m.head().w.rows, m.head().w.cols);
  g.head.b.assign(m.head().b.size(), 0.0);
  return g;
}

void sgd_step(MlpModel& m, const Gradients& g, double lr, double inv_batch) {
  auto upd = [&](Dense& d, const Dense& gd) {
    for (std::size_t i = 0; i < d.w.a.size(); ++i) d.w.a[i] -= lr * gd.w.a[i] * inv_batch;
    for (std::size_t i = 0; i < d.b.size(); ++i) d.b[i] -= lr * gd.b[i] * inv_batch;
  };
  for (std::size_t k = 0; k < m.layers().size(); ++k) upd(m.layers()[k], g.layers[k]);
  upd(m.head(), g.head);
}

}  // namespace

Gradients backprop(const MlpModel& m, const std::vector<FeatureVector>& xs,
                   const std::vector<int>& labels) {
  Gradients g = zero_gradients(m);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ForwardTrace t = traced_forward(m, xs[i].values, nullptr);
    accumulate_gradients(m, xs[i].values, labels[i], t, g);
  }
  double inv = 1.0 / static_cast<double>(xs.size());
  for (auto& layer : g.layers) {
    for (double& v : layer.w.a) v *= inv;
    for (double& v : layer.b) v *= inv;
  }
  for (double& v : g.head.w.a) v *= inv;
  for (double& v : g.head.b) v *= inv;
  return g;
}

MlpModel train(const std::vector<lang::SourceUnit>& corpus, const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0", "learning_rate");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw ConfigError("dropout_rate must be in [0,1)", "dropout_rate");

  std::set<int> classes;
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  xs.reserve(corpus.size());
  for (const auto& unit : corpus) {
    if (!unit.label) throw ConfigError("training corpus must be fully labeled", "corpus");
    xs.push_back(featurize(unit));
    ys.push_back(*unit.label);
    classes.insert(*unit.label);
  }
  if (classes.size() < 2) throw ConfigError("training needs at least two classes", "corpus");
  int n_classes = *classes.rbegin() + 1;

  MlpModel m(n_classes, cfg.rng_seed);
  Rng shuffle_rng(mix_seed(cfg.rng_seed, 0x73686675u));
  Rng dropout_rng(mix_seed(cfg.rng_seed, 0x64726f70u));

  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  int L = m.num_layers();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the project RNG keeps runs bit-reproducible
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double epoch_ce = 0.0;
    std::size_t done = 0;
    while (done < order.size()) {
      std::size_t batch = std::min<std::size_t>(cfg.batch_size, order.size() - done);
      Gradients g = zero_gradients(m);
      for (std::size_t b = 0; b < batch; ++b) {
        std::size_t idx = order[done + b];
        std::vector<std::vector<double>> masks;
        const std::vector<std::vector<double>>* mask_ptr = nullptr;
        if (cfg.dropout_rate > 0.0) {
          masks.resize(L);
          double keep = 1.0 - cfg.dropout_rate;
          for (int k = 0; k < L; ++k) {
            masks[k].resize(m.layers()[k].w.cols);
            for (double& v : masks[k])
              v = dropout_rng.unit() < cfg.dropout_rate ? 0.0 : 1.0 / keep;
          }
          mask_ptr = &masks;
        }
        ForwardTrace t = traced_forward(m, xs[idx].values, mask_ptr);
        epoch_ce += -std::log(std::max(t.probs[ys[idx]], 1e-12));
        accumulate_gradients(m, xs[idx].values, ys[idx], t, g);
      }
      sgd_step(m, g, cfg.learning_rate, 1.0 / static_cast<double>(batch));
      done += batch;
    }
    m.epoch_loss.push_back(epoch_ce / static_cast<double>(xs.size()));
  }
  return m;
}

Dense train_head(const std::vector<std::vector<double>>& features,
                 const std::vector<int>& labels, int num_classes, const TrainConfig& cfg) {
  int dim = features.empty() ? 0 : static_cast<int>(features[0].size());
  Dense head;
  head.w = Matrix(dim, num_classes);
  head.b.assign(num_classes, 0.0);
  Rng init_rng(mix_seed(cfg.rng_seed, 0x68656164u));
  glorot_init(head, init_rng);

  Rng shuffle_rng(mix_seed(cfg.rng_seed, 0x73687566u));
  Rng dropout_rng(mix_seed(cfg.rng_seed, 0x64687064u));
  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    std::size_t done = 0;
    while (done < order.size()) {
      std::size_t batch = std::min<std::size_t>(cfg.batch_size, order.size() - done);
      Matrix gw(dim, num_classes);
      std::vector<double> gb(num_classes, 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        std::size_t idx = order[done + b];
        std::vector<double> input = features[idx];
        if (cfg.dropout_rate > 0.0) {
          double keep = 1.0 - cfg.dropout_rate;
          for (double& v : input)
            if (dropout_rng.unit() < cfg.dropout_rate) v = 0.0;
            else v /= keep;
        }
        auto probs = softmax(head_logits(head, input));
        probs[labels[idx]] -= 1.0;
        for (int i = 0; i < dim; ++i) {
          if (input[i] == 0.0) continue;
          for (int j = 0; j < num_classes; ++j) gw.at(i, j) += input[i] * probs[j];
        }
        for (int j = 0; j < num_classes; ++j) gb[j] += probs[j];
      }
      double inv = 1.0 / static_cast<double>(batch);
      for (std::size_t i = 0; i < head.w.a.size(); ++i)
        head.w.a[i] -= cfg.learning_rate * gw.a[i] * inv;
      for (int j = 0; j < num_classes; ++j) head.b[j] -= cfg.learning_rate * gb[j] * inv;
      done += batch;
    }
  }
  return head;
}

std::vector<double> head_logits(const Dense& head, const std::vector<double>& features) {
  if (static_cast<int>(features.size()) != head.w.rows)
    throw DimensionError("head feature width mismatch");
  return dense_forward(head, features, false);
}

}  // namespace codefit::model
