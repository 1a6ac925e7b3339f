#include "codefit/features.hpp"

#include <cmath>

#include "codefit/lexer.hpp"
#include "codefit/printer.hpp"
#include "codefit/rng.hpp"

namespace codefit::model {

FeatureVector featurize_text(std::string_view code) {
  FeatureVector fv;
  fv.values.assign(kVocabDim, 0.0);
  auto tokens = lang::tokenize_lenient(code);
  for (const auto& t : tokens) {
    std::uint64_t h1 = fnv1a64("lex:" + t.lexeme);
    std::uint64_t h2 = mix_seed(0x7061u, fnv1a64(lang::token_kind_name(t.kind)));
    fv.values[h1 % kVocabDim] += 1.0;
    fv.values[h2 % kVocabDim] += 1.0;
  }
  // presence features: token repetition neither drowns rare discriminative
  // tokens nor lets bulk insertions drag the vector arbitrarily far
  double norm = 0.0;
  for (double& v : fv.values) {
    if (v > 0.0) v = 1.0;
    norm += v;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : fv.values) v /= norm;
  }
  return fv;
}

FeatureVector featurize(const lang::SourceUnit& unit) {
  return featurize_text(lang::print(unit.ast));
}

}  // namespace codefit::model
