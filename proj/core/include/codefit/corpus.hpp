#pragma once

#include <string>
#include <vector>

#include "codefit/ast.hpp"

namespace codefit::harness {

struct CorpusRecord {
  std::string id;
  std::string code;
  int label = 0;
};

/// JSONL, one {"id", "code", "label"} object per line. Duplicate ids,
/// missing fields and malformed JSON raise FormatError with the line number;
/// labels are range-checked against num_classes when it is >= 2.
std::vector<CorpusRecord> load_corpus(const std::string& path, int num_classes = -1);

void save_corpus(const std::vector<CorpusRecord>& records, const std::string& path);

/// Parse records into units; code that fails to parse flows through as a
/// single opaque statement rather than being dropped.
std::vector<lang::SourceUnit> to_units(const std::vector<CorpusRecord>& records);

std::vector<CorpusRecord> from_units(const std::vector<lang::SourceUnit>& units);

}  // namespace codefit::harness
