#include "codefit/metrics.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "codefit/errors.hpp"

namespace codefit::harness {

double compute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw LengthMismatch("scores and labels must have equal length");
  long long positives = 0, negatives = 0;
  for (int l : labels) (l == 1 ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0)
    throw DegenerateError("AUC needs both a positive and a negative sample");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // group ties; wins/ties stay integers so the result is exact
  unsigned long long wins2 = 0;  // 2*wins + ties
  long long negatives_seen = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    long long pos_here = 0, neg_here = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos_here : neg_here) += 1;
      ++j;
    }
    wins2 += 2ull * static_cast<unsigned long long>(pos_here) *
             static_cast<unsigned long long>(negatives_seen);
    wins2 += static_cast<unsigned long long>(pos_here) *
             static_cast<unsigned long long>(neg_here);
    negatives_seen += neg_here;
    i = j;
  }
  return static_cast<double>(wins2) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

ClassificationScores classification_scores(const std::vector<int>& predictions,
                                           const std::vector<int>& truth, int num_classes) {
  ClassificationScores out;
  out.counts.tp.assign(num_classes, 0);
  out.counts.fp.assign(num_classes, 0);
  out.counts.tn.assign(num_classes, 0);
  out.counts.fn.assign(num_classes, 0);

  long long correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truth[i]) ++correct;
    for (int c = 0; c < num_classes; ++c) {
      bool pred_c = predictions[i] == c;
      bool true_c = truth[i] == c;
      if (pred_c && true_c) out.counts.tp[c]++;
      else if (pred_c) out.counts.fp[c]++;
      else if (true_c) out.counts.fn[c]++;
      else out.counts.tn[c]++;
    }
  }
  out.accuracy = predictions.empty()
                     ? 0.0
                     : static_cast<double>(correct) / static_cast<double>(predictions.size());

  auto prf = [&](int c) -> std::array<std::optional<double>, 3> {
    std::optional<double> p, r, f;
    long long tp = out.counts.tp[c], fp = out.counts.fp[c], fn = out.counts.fn[c];
    if (tp + fp > 0) p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) r = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (p && r && *p + *r > 0.0) f = 2.0 * *p * *r / (*p + *r);
    return {p, r, f};
  };

  if (num_classes == 2) {
    auto [p, r, f] = prf(1);
    out.precision = p;
    out.recall = r;
    out.f1 = f;
    return out;
  }

  double psum = 0, rsum = 0, fsum = 0;
  int pn = 0, rn = 0, fn2 = 0;
  for (int c = 0; c < num_classes; ++c) {
    auto [p, r, f] = prf(c);
    if (p) { psum += *p; ++pn; }
    if (r) { rsum += *r; ++rn; }
    if (f) { fsum += *f; ++fn2; }
  }
  if (pn) out.precision = psum / pn;
  if (rn) out.recall = rsum / rn;
  if (fn2) out.f1 = fsum / fn2;
  return out;
}

CorrectionMetrics compute_correction_metrics(const std::vector<int>& before,
                                             const std::vector<int>& after,
                                             const std::vector<int>& truth,
                                             const std::vector<bool>& flagged,
                                             double accuracy_before, double accuracy_after,
                                             double train_accuracy) {
  if (before.size() != after.size() || before.size() != truth.size() ||
      before.size() != flagged.size())
    throw LengthMismatch("correction metrics need aligned inputs");

  CorrectionMetrics m;
  long long flagged_wrong_fixed = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    bool right_before = before[i] == truth[i];
    bool right_after = after[i] == truth[i];
    if (right_before) {
      ++m.right_before;
      if (flagged[i]) ++m.flagged_right;
      if (!right_after) ++m.miscorrected;
    } else {
      ++m.wrong_before;
      if (flagged[i]) {
        ++m.flagged_wrong;
        if (right_after) ++flagged_wrong_fixed;
      }
      if (right_after) ++m.corrected;
    }
  }

  if (m.flagged_wrong > 0)
    m.csr = static_cast<double>(flagged_wrong_fixed) / static_cast<double>(m.flagged_wrong);
  if (m.right_before > 0) {
    m.mcr = static_cast<double>(m.miscorrected) / static_cast<double>(m.right_before);
    m.mvr = static_cast<double>(m.flagged_right) / static_cast<double>(m.right_before);
  }
  if (m.wrong_before > 0)
    m.cvr = static_cast<double>(m.flagged_wrong) / static_cast<double>(m.wrong_before);
  double gap = train_accuracy - accuracy_before;
  if (gap != 0.0) m.ri = (accuracy_after - accuracy_before) / gap;
  return m;
}

TpsStats measure_tps(const std::vector<adapt::AdaptLogEntry>& log) {
  TpsStats stats;
  for (const auto& e : log) {
    stats.transformations += e.ops_applied;
    stats.wall_seconds += e.wall_ms / 1000.0;
  }
  if (stats.transformations > 0 && stats.wall_seconds > 0.0)
    stats.tps = static_cast<double>(stats.transformations) / stats.wall_seconds;
  return stats;
}

}  // namespace codefit::harness
