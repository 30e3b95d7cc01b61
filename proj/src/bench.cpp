#include "dafsp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "dafsp/rng.hpp"
#include "dafsp/schedule.hpp"
#include "dafsp/solver.hpp"

namespace dafsp {

Instance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.jobs < cfg.products)
    throw DomainError("cannot split " + std::to_string(cfg.jobs) + " jobs into " +
                      std::to_string(cfg.products) + " non-empty products");
  if (cfg.jobs < 1 || cfg.factories < 1 || cfg.machines < 1 || cfg.products < 1)
    throw DomainError("generator dimensions must be >= 1");
  if (cfg.job_time_lo < 1 || cfg.job_time_lo > cfg.job_time_hi ||
      cfg.asm_time_lo < 1 || cfg.asm_time_lo > cfg.asm_time_hi)
    throw DomainError("generator time ranges must satisfy 1 <= lo <= hi");

  Rng rng(cfg.seed);
  Instance inst;
  inst.jobs = cfg.jobs;
  inst.factories = cfg.factories;
  inst.machines = cfg.machines;
  inst.products = cfg.products;
  inst.proc.assign(cfg.jobs, std::vector<Time>(cfg.machines, 0));
  for (int i = 0; i < cfg.jobs; ++i)
    for (int k = 0; k < cfg.machines; ++k)
      inst.proc[i][k] = rng.uniform_int(cfg.job_time_lo, cfg.job_time_hi);
  inst.assembly.resize(cfg.products);
  for (int q = 0; q < cfg.products; ++q)
    inst.assembly[q] = rng.uniform_int(cfg.asm_time_lo, cfg.asm_time_hi);

  inst.plan.assign(cfg.products, {});
  for (int i = 0; i < cfg.jobs; ++i)
    inst.plan[rng.uniform_int(0, cfg.products - 1)].push_back(i);
  // Repair: the largest product donates its highest-id job to the lowest
  // empty one. Possible whenever jobs >= products.
  for (int q = 0; q < cfg.products; ++q) {
    if (!inst.plan[q].empty()) continue;
    int donor = 0;
    for (int p = 1; p < cfg.products; ++p)
      if (inst.plan[p].size() > inst.plan[donor].size()) donor = p;
    inst.plan[q].push_back(inst.plan[donor].back());
    inst.plan[donor].pop_back();
  }
  for (auto& group : inst.plan) std::sort(group.begin(), group.end());

  int largest = 0;
  for (const auto& group : inst.plan) largest = std::max(largest, static_cast<int>(group.size()));
  inst.buffer = rng.uniform_int(largest, (3 * largest + 1) / 2);

  validate_instance(inst);
  return inst;
}

double rpd(Time ca, Time ca_best) {
  if (ca_best <= 0) throw DomainError("best-known makespan must be positive");
  if (ca < ca_best) throw DomainError("makespan below the best-known value");
  return static_cast<double>(ca - ca_best) / static_cast<double>(ca_best);
}

namespace {

std::string instance_id(const std::string& type, int u, int f, int m, int l, int c) {
  return type + "-u" + std::to_string(u) + "f" + std::to_string(f) + "m" + std::to_string(m) +
         "l" + std::to_string(l) + "-c" + std::to_string(c);
}

struct Grid {
  std::vector<int> u, f, m, l;
  int cases = 3;
  long long multiplier = 0;
};

Grid grid_for(const std::string& name) {
  if (name == "small") return {{10, 16, 24}, {2, 3}, {2, 4, 6}, {2, 4}, 3, 120};
  if (name == "medium") return {{30, 40, 50}, {4, 6}, {8, 10, 12}, {6, 8}, 3, 50};
  if (name == "large") return {{80, 100, 120}, {8, 10}, {16, 18, 20}, {10, 16}, 3, 20};
  if (name == "toy") return {{6, 8}, {2}, {2, 3}, {2}, 2, 120};
  throw DomainError("unknown suite \"" + name + "\" (small, medium, large, toy)");
}

}  // namespace

SuiteSpec make_suite(const std::string& name, std::uint64_t seed) {
  const Grid grid = grid_for(name);
  SuiteSpec suite;
  suite.name = name;
  suite.budget_multiplier = grid.multiplier;
  std::uint64_t combo = 0;
  for (int u : grid.u)
    for (int f : grid.f)
      for (int m : grid.m)
        for (int l : grid.l) {
          for (int c = 0; c < grid.cases; ++c) {
            GeneratorConfig cfg;
            cfg.jobs = u;
            cfg.factories = f;
            cfg.machines = m;
            cfg.products = l;
            cfg.seed = mix_seed(seed + combo * 1000003ull + static_cast<std::uint64_t>(c) * 7919ull);
            suite.instances.push_back(generate_instance(cfg));
            suite.metas.push_back({instance_id(name, u, f, m, l, c), name, u, f, m, l, c});
          }
          ++combo;
        }
  return suite;
}

namespace {

std::pair<Time, Time> run_hcce(const Instance& inst, const RunLimits& limits, std::uint64_t seed,
                               bool use_mccea, bool use_ls) {
  SolverParams params = SolverParams::preset(limits.preset);
  params.seed = seed;
  params.budget_ms = limits.budget_ms;
  params.max_generations = limits.max_generations;
  params.use_mccea = use_mccea;
  params.use_local_search = use_ls;
  const SolveOutcome out = solve(inst, params);
  return {out.eval.cm_max, out.eval.ca_max};
}

std::pair<Time, Time> run_random(const Instance& inst, const RunLimits& limits,
                                 std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const SolverParams preset = SolverParams::preset(limits.preset);
  // Match the evolutionary effort loosely: ps codings per capped generation.
  long long max_iters = std::numeric_limits<long long>::max();
  if (limits.max_generations >= 0)
    max_iters = static_cast<long long>(preset.ps) * std::max(limits.max_generations, 1ll);
  const AppNet net = build_app(inst);
  Rng rng(seed);
  std::pair<Time, Time> best{0, std::numeric_limits<Time>::max()};
  for (long long it = 0; it < max_iters; ++it) {
    if (limits.budget_ms >= 0 &&
        Clock::now() - t0 >= std::chrono::milliseconds(limits.budget_ms) && it > 0)
      break;
    Coding coding;
    coding.lambda.resize(inst.jobs);
    std::iota(coding.lambda.begin(), coding.lambda.end(), 0);
    rng.shuffle(coding.lambda);
    coding.mu.resize(inst.jobs);
    for (int& c : coding.mu) c = rng.uniform_int(0, inst.factories - 1);
    const EvalResult res = evaluate(inst, net, coding);
    if (res.ca_max < best.second) best = {res.cm_max, res.ca_max};
  }
  return best;
}

std::pair<Time, Time> run_greedy_l1(const Instance& inst, const RunLimits&, std::uint64_t) {
  const JobTotals t = totals(inst);
  std::vector<int> order(inst.jobs);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return t.job[a] > t.job[b]; });
  Coding coding;
  coding.mu = h1_assign(inst, order);
  coding.lambda = std::move(order);
  const EvalResult res = evaluate(inst, coding);
  return {res.cm_max, res.ca_max};
}

const std::vector<std::pair<std::string, SolverFn>>& registry() {
  static const std::vector<std::pair<std::string, SolverFn>> algos = {
      {"hcce",
       [](const Instance& i, const RunLimits& lim, std::uint64_t s) {
         return run_hcce(i, lim, s, true, true);
       }},
      {"hcce_no_ls",
       [](const Instance& i, const RunLimits& lim, std::uint64_t s) {
         return run_hcce(i, lim, s, true, false);
       }},
      {"hcce_no_mccea",
       [](const Instance& i, const RunLimits& lim, std::uint64_t s) {
         return run_hcce(i, lim, s, false, false);
       }},
      {"random", run_random},
      {"greedy_l1", run_greedy_l1},
  };
  return algos;
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

SolverFn find_algorithm(const std::string& name) {
  for (const auto& [key, fn] : registry())
    if (key == name) return fn;
  throw DomainError("unknown algorithm \"" + name + "\"");
}

std::vector<RunRecord> run_suite(const SuiteSpec& suite, const std::vector<std::string>& algorithms,
                                 int runs, std::uint64_t seed, long long budget_override_ms,
                                 long long max_generations, int limit) {
  if (runs < 1) throw DomainError("runs must be >= 1");
  std::vector<std::pair<std::string, SolverFn>> fns;
  for (const auto& name : algorithms) fns.emplace_back(name, find_algorithm(name));

  const int count = limit >= 0 ? std::min<int>(limit, static_cast<int>(suite.instances.size()))
                               : static_cast<int>(suite.instances.size());
  std::vector<RunRecord> records;
  using Clock = std::chrono::steady_clock;
  for (int idx = 0; idx < count; ++idx) {
    const Instance& inst = suite.instances[idx];
    const InstanceMeta& meta = suite.metas[idx];
    RunLimits limits;
    limits.preset = (meta.type == "toy") ? "small" : meta.type;
    limits.max_generations = max_generations;
    if (budget_override_ms >= 0)
      limits.budget_ms = budget_override_ms;
    else if (max_generations < 0)
      limits.budget_ms = suite.budget_multiplier * meta.u * meta.f * meta.m * meta.l;
    for (const auto& [name, fn] : fns) {
      for (int r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);
        const auto t0 = Clock::now();
        const auto [cm, ca] = fn(inst, limits, run_seed);
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
        records.push_back({meta.id, name, r, run_seed, cm, ca, elapsed});
      }
    }
  }
  return records;
}

RpdTable aggregate(const std::vector<RunRecord>& records, const std::vector<InstanceMeta>& metas) {
  if (records.empty()) return {};
  std::map<std::string, Time> best;
  for (const auto& rec : records) {
    auto [it, fresh] = best.emplace(rec.instance_id, rec.ca_max);
    if (!fresh) it->second = std::min(it->second, rec.ca_max);
  }
  // Per (instance, algorithm): bRPD of the best run, aRPD over runs.
  std::map<std::pair<std::string, std::string>, std::pair<double, double>> per_cell;
  {
    std::map<std::pair<std::string, std::string>, std::vector<Time>> cas;
    for (const auto& rec : records) cas[{rec.instance_id, rec.algorithm}].push_back(rec.ca_max);
    for (const auto& [key, values] : cas) {
      const Time b = best.at(key.first);
      double arpd = 0.0;
      Time lo = values.front();
      for (Time ca : values) {
        arpd += rpd(ca, b);
        lo = std::min(lo, ca);
      }
      per_cell[key] = {rpd(lo, b), arpd / static_cast<double>(values.size())};
    }
  }
  std::set<std::string> algo_set;
  for (const auto& rec : records) algo_set.insert(rec.algorithm);

  std::vector<std::string> types;
  for (const auto& meta : metas)
    if (std::find(types.begin(), types.end(), meta.type) == types.end()) types.push_back(meta.type);

  RpdTable table;
  auto emit_group = [&](const std::string& group, const std::string& level,
                        const std::vector<const InstanceMeta*>& members) {
    for (const auto& algo : algo_set) {
      double brpd = 0.0, arpd = 0.0;
      int n = 0;
      for (const auto* meta : members) {
        auto it = per_cell.find({meta->id, algo});
        if (it == per_cell.end()) continue;
        brpd += it->second.first;
        arpd += it->second.second;
        ++n;
      }
      if (n == 0) continue;
      table.push_back({group, level, algo, brpd / n, arpd / n});
    }
  };

  for (const auto& type : types) {
    std::vector<const InstanceMeta*> of_type;
    for (const auto& meta : metas)
      if (meta.type == type) of_type.push_back(&meta);
    const struct {
      const char* name;
      int InstanceMeta::* field;
    } dims[] = {{"u", &InstanceMeta::u}, {"f", &InstanceMeta::f},
                {"m", &InstanceMeta::m}, {"l", &InstanceMeta::l}};
    for (const auto& dim : dims) {
      std::set<int> levels;
      for (const auto* meta : of_type) levels.insert(meta->*(dim.field));
      for (int level : levels) {
        std::vector<const InstanceMeta*> members;
        for (const auto* meta : of_type)
          if (meta->*(dim.field) == level) members.push_back(meta);
        emit_group(type + "." + dim.name, std::to_string(level), members);
      }
    }
    emit_group(type + ".avg", "-", of_type);
  }
  return table;
}

FriedmanResult friedman(const std::vector<std::vector<double>>& scores) {
  const int n = static_cast<int>(scores.size());
  if (n < 1) throw DomainError("rank test needs at least one block");
  const int k = static_cast<int>(scores.front().size());
  if (k < 2) throw DomainError("rank test needs at least two treatments");
  for (const auto& row : scores)
    if (static_cast<int>(row.size()) != k) throw DomainError("ragged score matrix");

  std::vector<double> rank_sum(k, 0.0);
  std::vector<int> idx(k);
  for (const auto& row : scores) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return row[a] < row[b]; });
    int pos = 0;
    while (pos < k) {
      int end = pos;
      while (end + 1 < k && row[idx[end + 1]] == row[idx[pos]]) ++end;
      // Positions pos..end (0-based) share the average of ranks pos+1..end+1.
      const double shared = (static_cast<double>(pos) + end) / 2.0 + 1.0;
      for (int t = pos; t <= end; ++t) rank_sum[idx[t]] += shared;
      pos = end + 1;
    }
  }
  FriedmanResult out;
  out.avg_rank.resize(k);
  double sum_sq = 0.0;
  for (int j = 0; j < k; ++j) {
    out.avg_rank[j] = rank_sum[j] / n;
    sum_sq += rank_sum[j] * rank_sum[j];
  }
  out.chi_square = 12.0 / (static_cast<double>(n) * k * (k + 1)) * sum_sq - 3.0 * n * (k + 1);
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string records_csv(std::vector<RunRecord> records) {
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    return a.run < b.run;
  });
  std::string out = "instance_id,algorithm,run,seed,cm_max,ca_max,elapsed_ms\n";
  for (const auto& r : records) {
    out += r.instance_id + ',' + r.algorithm + ',' + std::to_string(r.run) + ',' +
           std::to_string(r.seed) + ',' + std::to_string(r.cm_max) + ',' +
           std::to_string(r.ca_max) + ',' + std::to_string(r.elapsed_ms) + '\n';
  }
  return out;
}

std::string aggregate_csv(const RpdTable& table) {
  std::string out = "group,level,algorithm,bRPD,aRPD\n";
  for (const auto& row : table)
    out += row.group + ',' + row.level + ',' + row.algorithm + ',' + format_double(row.brpd) +
           ',' + format_double(row.arpd) + '\n';
  return out;
}

std::string friedman_csv(const FriedmanResult& result, const std::vector<std::string>& names) {
  if (names.size() != result.avg_rank.size())
    throw DomainError("rank column count does not match algorithm names");
  std::string out = "algorithm,avg_rank\n";
  for (std::size_t j = 0; j < names.size(); ++j)
    out += names[j] + ',' + format_double(result.avg_rank[j]) + '\n';
  out += "chi_square," + format_double(result.chi_square) + '\n';
  return out;
}

std::vector<RunRecord> parse_records_csv(const std::string& text) {
  std::vector<RunRecord> records;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != "instance_id,algorithm,run,seed,cm_max,ca_max,elapsed_ms")
        throw ParseError("unexpected results header: " + line);
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t f0 = 0;
    while (true) {
      const std::size_t comma = line.find(',', f0);
      fields.push_back(line.substr(f0, comma - f0));
      if (comma == std::string::npos) break;
      f0 = comma + 1;
    }
    if (fields.size() != 7) throw ParseError("expected 7 fields, got: " + line);
    try {
      records.push_back({fields[0], fields[1], std::stoi(fields[2]),
                         static_cast<std::uint64_t>(std::stoull(fields[3])),
                         static_cast<Time>(std::stoll(fields[4])),
                         static_cast<Time>(std::stoll(fields[5])), std::stoll(fields[6])});
    } catch (const std::exception&) {
      throw ParseError("malformed results row: " + line);
    }
  }
  return records;
}

std::vector<InstanceMeta> metas_from_records(const std::vector<RunRecord>& records) {
  std::vector<InstanceMeta> metas;
  std::set<std::string> seen;
  for (const auto& rec : records) {
    if (!seen.insert(rec.instance_id).second) continue;
    InstanceMeta meta;
    meta.id = rec.instance_id;
    const std::size_t dash = rec.instance_id.find('-');
    int consumed = 0;
    if (dash == std::string::npos ||
        std::sscanf(rec.instance_id.c_str() + dash, "-u%df%dm%dl%d-c%d%n", &meta.u, &meta.f,
                    &meta.m, &meta.l, &meta.case_index, &consumed) != 5 ||
        rec.instance_id.c_str()[dash + consumed] != '\0')
      throw ParseError("instance id \"" + rec.instance_id + "\" does not encode dimensions");
    meta.type = rec.instance_id.substr(0, dash);
    metas.push_back(std::move(meta));
  }
  return metas;
}

}  // namespace dafsp
