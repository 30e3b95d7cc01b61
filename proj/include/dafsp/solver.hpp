#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dafsp/instance.hpp"
#include "dafsp/petri.hpp"
#include "dafsp/rng.hpp"
#include "dafsp/schedule.hpp"

namespace dafsp {

struct SolverParams {
  int ps = 50;      // subpopulation size (>= 4: four seeded constructions)
  double ep = 0.2;  // elite archive share of ps; values > 1 read as percent
  int alpha = 21;   // stagnant generations before both populations restart
  double cd = 0.1;  // job share removed by the destruction operator
  std::uint64_t seed = 0;
  long long budget_ms = -1;        // < 0: no wall-clock limit
  long long max_generations = -1;  // < 0: no generation cap
  bool use_mccea = true;           // collaborator links, interchange, archive, LS
  bool use_local_search = true;

  double ep_fraction() const { return ep > 1.0 ? ep / 100.0 : ep; }
  double cd_fraction() const { return cd > 1.0 ? cd / 100.0 : cd; }
  int archive_size() const;
  void validate() const;  // throws DomainError
  static SolverParams preset(std::string_view name);  // small / medium / large
};

struct Entity {
  std::vector<int> perm;  // entry order in pop1, factory assignment in pop2
  int col = 0;            // collaborator index into the other population
  bool dirty = false;     // permutation rewritten this generation
  std::uint64_t version = 0;

  // Pairing-fitness cache, keyed by both permutation versions.
  Time cached_fit = 0;
  int cached_partner = -1;
  std::uint64_t cached_self_ver = ~0ull;
  std::uint64_t cached_partner_ver = ~0ull;
};

struct EliteEntry {
  std::vector<int> lambda;
  std::vector<int> mu;
  Time fitness = 0;
};

struct SolverState {
  std::vector<Entity> pop1;  // deadlock-free entry orders
  std::vector<Entity> pop2;  // factory assignments
  std::vector<EliteEntry> archive;
  Coding best_coding;
  EvalResult best_eval;
  bool has_best = false;
  long long stagnation = 0;
  long long eval_count = 0;
  long long restarts = 0;
  Rng rng{0};
};

struct SolveStats {
  long long generations = 0;
  long long evaluations = 0;
  long long restarts = 0;
  long long elapsed_ms = 0;
};

struct SolveOutcome {
  Coding best;
  EvalResult eval;
  SolveStats stats;
};

struct CriticalInfo {
  int critical_product = 0;
  int critical_factory = 0;
  int min_factory = 0;
};

// Greedy factory assignment: walk the entry order, place each job in the
// factory minimizing the partial schedule span (ties to the lowest id).
std::vector<int> h1_assign(const Instance& inst, std::span<const int> lambda);

// Insertion construction: jobs sorted by descending total processing time
// (ties to the lower id), each tried at every position of the partial order
// and kept at the span-minimizing one. Ties keep the rightmost minimizing
// position, so when all positions tie the sorted order is preserved.
std::vector<int> h2_insert(const Instance& inst, std::span<const int> mu);

// Seeds both populations: two deterministic constructions (descending job
// totals; product blocks by descending product totals), one random order and
// one random assignment completed by the heuristics, and random fills. Every
// entry order is amended to be deadlock-free. Collaborators start as identity
// and the archive holds the best archive-share pairings.
SolverState initialize(const Instance& inst, const SolverParams& params);

// One co-evolution generation over both populations. Callers are responsible
// for clearing dirty flags at generation start (solve does).
void global_evolve(SolverState& st, const Instance& inst, const SolverParams& params);

// Elite interchange between the populations and the archive.
void itm(SolverState& st, const Instance& inst);

// The product whose assembly delayed the successor last, the factory that
// finished that product's slowest job, and the factory whose first job starts
// latest (idle factories count as latest; ties to the lower id).
CriticalInfo critical_min_factory(const Instance& inst, const EvalResult& eval);

// Applies the four elite refinement operators to each archive entry,
// accepting strict improvements only.
void local_search(SolverState& st, const Instance& inst, const SolverParams& params);

// Full run: initialize, then per generation evolve both populations,
// interchange, refine elites, and restart the populations after `alpha`
// stagnant generations. Stops on the wall-clock budget or the generation
// cap, whichever comes first; at least one must be set. With a fixed seed
// and a generation cap alone, the outcome is bit-deterministic.
SolveOutcome solve(const Instance& inst, const SolverParams& params);

}  // namespace dafsp
