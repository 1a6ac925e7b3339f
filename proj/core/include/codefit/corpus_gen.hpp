#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codefit/ast.hpp"
#include "codefit/interp.hpp"

namespace codefit::model {

/// Synthetic labeled-corpus generator. Labels reflect injected defect
/// patterns, checked against the interpreter at generation time:
///   0 no defect, 1 wrong output (off-by-one bound), 2 timeout (unbounded
///   loop), 3 runtime error (division by zero). With num_classes 2, label 1
///   covers all three defect patterns.
struct GeneratorConfig {
  int num_classes = 4;  // 2 or 4
  int count = 1000;
  std::uint64_t rng_seed = 1;
  // probability that a program uses the confusable variant of its class
  // pattern (difficulty knob; 0 makes classes token-separable)
  double distractor_rate = 0.25;
  // probability that a program is written in the shifted surface dialect
  // (different name/comment vocabulary); raising it on held-out corpora
  // models code-data shift between deployment and training
  double shift_rate = 0.0;
  std::string id_prefix = "gen";
};

/// Every generated program exposes interp::kEntryFunction(int, int) for
/// differential runs.
using interp::kEntryFunction;

std::vector<lang::SourceUnit> generate_corpus(const GeneratorConfig& cfg);

}  // namespace codefit::model
