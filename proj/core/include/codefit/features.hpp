#pragma once

#include <string_view>
#include <vector>

#include "codefit/ast.hpp"

namespace codefit::model {

inline constexpr int kVocabDim = 1024;

/// Hashed bag-of-tokens, L2-normalized. Dimension is always kVocabDim.
struct FeatureVector {
  std::vector<double> values;
};

/// Deterministic features over the canonical printed form of the unit
/// (lexeme and token-kind counts, FNV-hashed into kVocabDim buckets).
FeatureVector featurize(const lang::SourceUnit& unit);

/// Same hashing over raw text; total (never throws on weird bytes).
FeatureVector featurize_text(std::string_view code);

}  // namespace codefit::model
