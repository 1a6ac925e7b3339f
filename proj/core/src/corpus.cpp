#include "codefit/corpus.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "codefit/errors.hpp"
#include "codefit/parser.hpp"

namespace codefit::harness {

using nlohmann::json;

std::vector<CorpusRecord> load_corpus(const std::string& path, int num_classes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read corpus: " + path);
  std::vector<CorpusRecord> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("corpus: ") + e.what(), lineno);
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("code") || !j.contains("label"))
      throw FormatError("corpus record needs id, code and label", lineno);
    CorpusRecord rec;
    try {
      rec.id = j["id"].get<std::string>();
      rec.code = j["code"].get<std::string>();
      rec.label = j["label"].get<int>();
    } catch (const json::exception& e) {
      throw FormatError(std::string("corpus: ") + e.what(), lineno);
    }
    if (!seen.insert(rec.id).second)
      throw FormatError("duplicate corpus id: " + rec.id, lineno);
    if (rec.label < 0 || (num_classes >= 2 && rec.label >= num_classes))
      throw FormatError("label out of range for id: " + rec.id, lineno);
    out.push_back(std::move(rec));
  }
  return out;
}

void save_corpus(const std::vector<CorpusRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write corpus: " + path);
  for (const auto& rec : records) {
    json j{{"id", rec.id}, {"code", rec.code}, {"label", rec.label}};
    out << j.dump() << '\n';
  }
}

std::vector<lang::SourceUnit> to_units(const std::vector<CorpusRecord>& records) {
  std::vector<lang::SourceUnit> units;
  units.reserve(records.size());
  for (const auto& rec : records) {
    lang::SourceUnit u;
    u.id = rec.id;
    u.ast = lang::parse_lenient(rec.code);
    u.original_text = rec.code;
    u.label = rec.label;
    units.push_back(std::move(u));
  }
  return units;
}

std::vector<CorpusRecord> from_units(const std::vector<lang::SourceUnit>& units) {
  std::vector<CorpusRecord> records;
  records.reserve(units.size());
  for (const auto& u : units)
    records.push_back(CorpusRecord{u.id, u.original_text, u.label.value_or(0)});
  return records;
}

}  // namespace codefit::harness
