#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "codefit/ast.hpp"
#include "codefit/transforms.hpp"
#include "codefit/validation.hpp"

namespace codefit::adapt {

/// One program variant in the search population.
struct Candidate {
  lang::Ast ast;
  double fitness = 0.0;
  bool fitness_set = false;
  std::vector<transforms::TransformRecord> lineage;
};

struct AesConfig {
  int max_iter = 3;
  double fitness_threshold = 0.2;
  double mutation_rate = 0.1;
  int crossover_n = 15;  // operators applied per crossover, in [1, 15]
  std::uint64_t rng_seed = 1;
};

using Population = std::vector<Candidate>;

/// Deterministic seed for a randomized operator application, derived from
/// (run seed, input id, generation, member index, operator number).
std::uint64_t op_seed(std::uint64_t run_seed, const std::string& input_id, int generation,
                      int member_index, int op_number);

/// Seed plus its fifteen one-operator variants; variants whose operator found
/// no site collapse into the seed. Fitness left unset.
Population genpop(const Candidate& seed, std::uint64_t run_seed, const std::string& input_id,
                  int generation, int* ops_applied = nullptr);

/// Fills in fitness = sub-model validity score for candidates not yet scored.
void fitness(Population& pop, const model::LayeredModel& m,
             const validation::SubModelBundle& bundle, const std::string& input_id);

/// Top half by fitness (ceil). Ties prefer shorter lineages, then earlier
/// population position.
Population select(Population pop);

/// Survivors plus one crossover/mutation child per survivor.
Population evolve(Population survivors, const AesConfig& cfg, const std::string& input_id,
                  int generation, int* ops_applied = nullptr);

struct AdaptLogEntry {
  std::string id;
  int generations = 0;
  double initial_fitness = 0.0;
  double final_fitness = 0.0;
  std::vector<double> best_per_generation;
  int ops_applied = 0;
  bool adapted = false;  // emitted a transformed variant instead of the original
  std::vector<transforms::TransformRecord> lineage;
  double wall_ms = 0.0;
};

struct AdaptResult {
  std::vector<lang::SourceUnit> corpus;
  std::vector<AdaptLogEntry> log;  // one entry per out-of-scope input
};

/// End-to-end adaptation: in-scope inputs pass through byte-identical; each
/// flagged input evolves until its fitness clears the threshold or max_iter
/// generations run out, in which case the original is emitted. Inputs are
/// independent (model and bundle are shared read-only); the loop runs them
/// sequentially for reproducible logs.
AdaptResult adapt_corpus(const std::vector<lang::SourceUnit>& test,
                         const std::set<std::string>& oos_ids, const model::LayeredModel& m,
                         const validation::SubModelBundle& bundle, const AesConfig& cfg);

}  // namespace codefit::adapt
