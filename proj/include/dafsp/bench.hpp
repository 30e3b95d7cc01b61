#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dafsp/instance.hpp"

namespace dafsp {

struct GeneratorConfig {
  int jobs = 0;
  int factories = 0;
  int machines = 0;
  int products = 0;
  int job_time_lo = 1, job_time_hi = 99;
  int asm_time_lo = 1, asm_time_hi = 50;
  std::uint64_t seed = 0;
};

// Random instance, fully determined by the config: processing times row by
// row, assembly times, then a uniform job->product assignment repaired so no
// product is empty (the largest product donates its highest-id job to the
// lowest empty one; no extra draws), and finally a buffer capacity between
// the largest product size b and ceil(1.5 b).
Instance generate_instance(const GeneratorConfig& cfg);

// Relative percentage deviation (as a fraction) from the best-known makespan.
double rpd(Time ca, Time ca_best);

struct RunRecord {
  std::string instance_id;
  std::string algorithm;
  int run = 0;
  std::uint64_t seed = 0;
  Time cm_max = 0;
  Time ca_max = 0;
  long long elapsed_ms = 0;
};

struct InstanceMeta {
  std::string id;    // "<type>-u10f2m2l2-c0": dimensions recoverable from the id
  std::string type;  // suite name: small / medium / large / toy
  int u = 0, f = 0, m = 0, l = 0;
  int case_index = 0;
};

struct RpdRow {
  std::string group;  // "<type>.u", "<type>.f", ..., or "<type>.avg"
  std::string level;  // scale value, "-" on avg rows
  std::string algorithm;
  double brpd = 0.0;  // deviation of the best run
  double arpd = 0.0;  // mean deviation over runs
};
using RpdTable = std::vector<RpdRow>;

// Per-instance best-known = the lowest ca over every record of that
// instance. Rows are grouped per scale level of each dimension plus one
// average row per suite type; within a group, values are means over the
// instances at that level.
RpdTable aggregate(const std::vector<RunRecord>& records, const std::vector<InstanceMeta>& metas);

struct FriedmanResult {
  std::vector<double> avg_rank;  // per column of the score matrix
  double chi_square = 0.0;
};

// Friedman rank test over an N-row (blocks) by k-column (treatments) score
// matrix; lower scores rank better, tied scores share the average rank.
FriedmanResult friedman(const std::vector<std::vector<double>>& scores);

struct SuiteSpec {
  std::string name;
  long long budget_multiplier = 0;  // budget_ms = multiplier * u*f*m*l
  std::vector<InstanceMeta> metas;
  std::vector<Instance> instances;
};

// Seeded scale grids: small (u 10/16/24, f 2/3, m 2/4/6, l 2/4), medium
// (u 30/40/50, f 4/6, m 8/10/12, l 6/8), large (u 80/100/120, f 8/10,
// m 16/18/20, l 10/16), three cases per combination; plus a "toy" grid for
// smoke runs. Budget multipliers: 120 / 50 / 20 ms (toy uses 120).
SuiteSpec make_suite(const std::string& name, std::uint64_t seed);

struct RunLimits {
  long long budget_ms = -1;
  long long max_generations = -1;
  std::string preset = "small";  // solver parameter preset to use
};

// (cm_max, ca_max) of the best coding the algorithm found.
using SolverFn = std::function<std::pair<Time, Time>(const Instance&, const RunLimits&, std::uint64_t)>;

// Registered algorithms: the full solver, its two ablations (no elite local
// search; no collaborator machinery), random search, and the deterministic
// greedy construction.
const std::vector<std::string>& algorithm_names();
SolverFn find_algorithm(const std::string& name);  // throws DomainError

// Runs `runs` repetitions of every algorithm on every suite instance (run r
// uses seed + r). A non-negative budget_override replaces the multiplier
// rule; a non-negative max_generations caps generations and drops the
// wall-clock budget unless one was explicitly given, making results
// seed-deterministic. `limit` >= 0 keeps only the first `limit` instances.
std::vector<RunRecord> run_suite(const SuiteSpec& suite,
                                 const std::vector<std::string>& algorithms, int runs,
                                 std::uint64_t seed, long long budget_override_ms = -1,
                                 long long max_generations = -1, int limit = -1);

// CSV emitters; rows sorted for byte-stable output.
std::string records_csv(std::vector<RunRecord> records);
std::string aggregate_csv(const RpdTable& table);
std::string friedman_csv(const FriedmanResult& result, const std::vector<std::string>& names);

// Parses records_csv output back, reconstructing instance metadata from the
// ids (throws ParseError on malformed input).
std::vector<RunRecord> parse_records_csv(const std::string& text);
std::vector<InstanceMeta> metas_from_records(const std::vector<RunRecord>& records);

}  // namespace dafsp
