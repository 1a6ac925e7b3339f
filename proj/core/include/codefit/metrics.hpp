#pragma once

#include <optional>
#include <vector>

#include "codefit/adapt.hpp"

namespace codefit::harness {

/// Probability that a positive (label 1) outranks a negative; ties count
/// one half. Computed with integer pair counts so it matches a brute-force
/// O(n^2) oracle exactly. DegenerateError when one class is absent.
double compute_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ClassCounts {
  std::vector<long long> tp, fp, tn, fn;
};

struct ClassificationScores {
  double accuracy = 0.0;
  std::optional<double> precision, recall, f1;
  ClassCounts counts;
};

/// Positive-class scores for two classes, macro-averaged beyond that.
/// Classes with a zero denominator are skipped in the macro average; absent
/// everywhere yields null.
ClassificationScores classification_scores(const std::vector<int>& predictions,
                                           const std::vector<int>& truth, int num_classes);

struct CorrectionMetrics {
  std::optional<double> csr, mcr, cvr, mvr, ri;
  long long corrected = 0;     // wrong before, right after
  long long miscorrected = 0;  // right before, wrong after
  long long flagged_wrong = 0;
  long long flagged_right = 0;
  long long wrong_before = 0;
  long long right_before = 0;
};

/// Set arithmetic over aligned ids. Zero denominators surface as null
/// metrics, never as a crash. RI uses the supplied training accuracy.
CorrectionMetrics compute_correction_metrics(const std::vector<int>& before,
                                             const std::vector<int>& after,
                                             const std::vector<int>& truth,
                                             const std::vector<bool>& flagged,
                                             double accuracy_before, double accuracy_after,
                                             double train_accuracy);

struct TpsStats {
  std::optional<double> tps;  // absent when nothing was adapted
  long long transformations = 0;
  double wall_seconds = 0.0;
};

TpsStats measure_tps(const std::vector<adapt::AdaptLogEntry>& log);

}  // namespace codefit::harness
