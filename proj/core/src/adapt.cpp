#include "codefit/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "codefit/printer.hpp"
#include "codefit/rng.hpp"

namespace codefit::adapt {

using transforms::OpId;
using transforms::TransformOp;

namespace {

lang::SourceUnit unit_view(const std::string& id, const lang::Ast& ast) {
  lang::SourceUnit u;
  u.id = id;
  u.ast = ast.clone();
  return u;
}

double evaluate_one(Candidate& cand, const model::LayeredModel& m,
                    const validation::SubModelBundle& bundle, const std::string& input_id) {
  if (!cand.fitness_set) {
    cand.fitness =
        validation::validate(m, bundle, unit_view(input_id, cand.ast), 0.0).final_score;
    cand.fitness_set = true;
  }
  return cand.fitness;
}

Candidate clone_candidate(const Candidate& c) {
  Candidate out;
  out.ast = c.ast.clone();
  out.fitness = c.fitness;
  out.fitness_set = c.fitness_set;
  out.lineage = c.lineage;
  return out;
}

std::vector<TransformOp> crossover_ops(const AesConfig& cfg, const std::string& input_id,
                                       int generation, int member_index) {
  std::vector<TransformOp> ops;
  int n = std::clamp(cfg.crossover_n, 1, transforms::kNumOps);
  if (n == 2) {
    // rename plus one random operator
    ops.push_back({OpId::ChangeName,
                   op_seed(cfg.rng_seed, input_id, generation, member_index, 1)});
    Rng rng(op_seed(cfg.rng_seed, input_id, generation, member_index, 900));
    int pick = 1 + static_cast<int>(rng.below(transforms::kNumOps));
    ops.push_back({static_cast<OpId>(pick),
                   op_seed(cfg.rng_seed, input_id, generation, member_index, 901)});
  } else {
    for (int i = 1; i <= n; ++i)
      ops.push_back({static_cast<OpId>(i),
                     op_seed(cfg.rng_seed, input_id, generation, member_index, i)});
  }
  return ops;
}

}  // namespace

std::uint64_t op_seed(std::uint64_t run_seed, const std::string& input_id, int generation,
                      int member_index, int op_number) {
  return mix_seed(mix_seed(run_seed, fnv1a64(input_id)),
                  static_cast<std::uint64_t>(generation) * 4096 +
                      static_cast<std::uint64_t>(member_index) * 64 +
                      static_cast<std::uint64_t>(op_number));
}

Population genpop(const Candidate& seed, std::uint64_t run_seed, const std::string& input_id,
                  int generation, int* ops_applied) {
  Population pop;
  pop.push_back(clone_candidate(seed));
  for (int i = 1; i <= transforms::kNumOps; ++i) {
    TransformOp op{static_cast<OpId>(i), op_seed(run_seed, input_id, generation, 0, i)};
    auto [ast, rec] = transforms::apply(seed.ast, op);
    if (ops_applied) ++*ops_applied;
    if (rec.sites_found == 0) continue;  // identical to the seed
    Candidate c;
    c.ast = std::move(ast);
    c.lineage = seed.lineage;
    c.lineage.push_back(rec);
    pop.push_back(std::move(c));
  }
  return pop;
}

void fitness(Population& pop, const model::LayeredModel& m,
             const validation::SubModelBundle& bundle, const std::string& input_id) {
  for (auto& cand : pop) evaluate_one(cand, m, bundle, input_id);
}

Population select(Population pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pop[a].fitness != pop[b].fitness) return pop[a].fitness > pop[b].fitness;
    return pop[a].lineage.size() < pop[b].lineage.size();
  });
  std::size_t keep = (pop.size() + 1) / 2;
  Population out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(pop[order[i]]));
  return out;
}

Population evolve(Population survivors, const AesConfig& cfg, const std::string& input_id,
                  int generation, int* ops_applied) {
  Population children;
  children.reserve(survivors.size());
  for (std::size_t mi = 0; mi < survivors.size(); ++mi) {
    int member = static_cast<int>(mi) + 1;
    auto ops = crossover_ops(cfg, input_id, generation, member);
    Rng mut_rng(op_seed(cfg.rng_seed, input_id, generation, member, 950));
    if (mut_rng.unit() < cfg.mutation_rate) {
      int pick = 1 + static_cast<int>(mut_rng.below(transforms::kNumOps));
      ops.push_back({static_cast<OpId>(pick),
                     op_seed(cfg.rng_seed, input_id, generation, member, 951)});
    }
    auto [ast, recs] = transforms::apply_sequence(survivors[mi].ast, ops);
    if (ops_applied) *ops_applied += static_cast<int>(ops.size());
    Candidate child;
    child.ast = std::move(ast);
    child.lineage = survivors[mi].lineage;
    child.lineage.insert(child.lineage.end(), recs.begin(), recs.end());
    children.push_back(std::move(child));
  }
  for (auto& c : children) survivors.push_back(std::move(c));
  return survivors;
}

AdaptResult adapt_corpus(const std::vector<lang::SourceUnit>& test,
                         const std::set<std::string>& oos_ids, const model::LayeredModel& m,
                         const validation::SubModelBundle& bundle, const AesConfig& cfg) {
  AdaptResult result;
  result.corpus.reserve(test.size());

  for (const auto& unit : test) {
    if (!oos_ids.count(unit.id)) {
      // in-scope inputs pass through untouched
      result.corpus.push_back(lang::clone_unit(unit));
      continue;
    }

    auto started = std::chrono::steady_clock::now();
    AdaptLogEntry entry;
    entry.id = unit.id;

    Candidate best;
    best.ast = unit.ast.clone();
    evaluate_one(best, m, bundle, unit.id);
    entry.initial_fitness = best.fitness;
    entry.best_per_generation.push_back(best.fitness);

    int iter = 0;
    while (iter < cfg.max_iter && best.fitness <= cfg.fitness_threshold) {
      Population pop = genpop(best, cfg.rng_seed, unit.id, iter, &entry.ops_applied);
      fitness(pop, m, bundle, unit.id);
      pop = select(std::move(pop));
      pop = evolve(std::move(pop), cfg, unit.id, iter, &entry.ops_applied);
      fitness(pop, m, bundle, unit.id);
      // incumbent wins ties, which keeps the best fitness monotone
      for (auto& cand : pop)
        if (cand.fitness > best.fitness) best = clone_candidate(cand);
      ++iter;
      entry.best_per_generation.push_back(best.fitness);
    }

    entry.generations = iter;
    entry.final_fitness = best.fitness;
    entry.adapted = best.fitness > cfg.fitness_threshold && !best.lineage.empty();
    entry.lineage = best.lineage;

    lang::SourceUnit out;
    out.id = unit.id;
    out.label = unit.label;
    if (entry.adapted) {
      out.original_text = lang::print(best.ast);
      out.ast = std::move(best.ast);
    } else {
      out.ast = unit.ast.clone();
      out.original_text = unit.original_text;  // byte-identical fallback
    }
    result.corpus.push_back(std::move(out));

    entry.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    result.log.push_back(std::move(entry));
  }
  return result;
}

}  // namespace codefit::adapt
