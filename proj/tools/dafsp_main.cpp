// Command line front end: instance generation, solving, order verification,
// schedule export and the benchmark harness. Exit codes: 0 on success, 1 on
// domain failures (bad file contents, infeasible instances), 2 on usage
// errors caught while parsing the command line.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "dafsp/bench.hpp"
#include "dafsp/errors.hpp"
#include "dafsp/instance.hpp"
#include "dafsp/petri.hpp"
#include "dafsp/schedule.hpp"
#include "dafsp/solver.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dafsp::DomainError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw dafsp::DomainError("cannot write " + path);
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

std::string one_based_list(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i] + 1);
  }
  return out;
}

std::vector<int> parse_one_based_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string field = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const int v = std::stoi(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
      out.push_back(v - 1);
    } catch (const std::exception&) {
      throw dafsp::DomainError("\"" + field + "\" is not a job id");
    }
    pos = comma + 1;
  }
  return out;
}

struct GenerateOpts {
  dafsp::GeneratorConfig cfg;
  std::string out;
};

void run_generate(const GenerateOpts& o) {
  const dafsp::Instance inst = dafsp::generate_instance(o.cfg);
  write_output(o.out, dafsp::save_instance(inst));
}

struct SolveOpts {
  std::string instance_path;
  std::string preset = "small";
  dafsp::SolverParams overrides;
  CLI::Option *ps_opt = nullptr, *ep_opt = nullptr, *alpha_opt = nullptr, *cd_opt = nullptr;
  std::uint64_t seed = 0;
  long long budget_ms = -1;
  long long max_generations = -1;
  std::string out;
};

void run_solve(const SolveOpts& o) {
  const dafsp::Instance inst = dafsp::load_instance(read_file(o.instance_path));
  dafsp::SolverParams params = dafsp::SolverParams::preset(o.preset);
  if (o.ps_opt->count()) params.ps = o.overrides.ps;
  if (o.ep_opt->count()) params.ep = o.overrides.ep;
  if (o.alpha_opt->count()) params.alpha = o.overrides.alpha;
  if (o.cd_opt->count()) params.cd = o.overrides.cd;
  params.seed = o.seed;
  params.budget_ms = o.budget_ms;
  params.max_generations = o.max_generations;
  if (params.budget_ms < 0 && params.max_generations < 0)
    params.budget_ms = 120ll * inst.jobs * inst.factories * inst.machines * inst.products;

  const dafsp::SolveOutcome res = dafsp::solve(inst, params);
  std::cout << "ca_max=" << res.eval.ca_max << " cm_max=" << res.eval.cm_max << '\n';
  if (!o.out.empty()) write_output(o.out, dafsp::save_coding(res.best));
}

struct VerifyOpts {
  std::string instance_path;
  std::string coding_path;
  std::string lambda_text;
};

void run_verify(const VerifyOpts& o) {
  if (o.coding_path.empty() && o.lambda_text.empty())
    throw CLI::RequiredError("--coding or --lambda");
  const dafsp::Instance inst = dafsp::load_instance(read_file(o.instance_path));
  std::vector<int> lambda;
  if (!o.coding_path.empty())
    lambda = dafsp::load_coding(read_file(o.coding_path)).lambda;
  else
    lambda = parse_one_based_list(o.lambda_text);

  std::vector<bool> seen(static_cast<std::size_t>(inst.jobs), false);
  if (static_cast<int>(lambda.size()) != inst.jobs)
    throw dafsp::DomainError("entry order lists " + std::to_string(lambda.size()) + " of " +
                             std::to_string(inst.jobs) + " jobs");
  for (int job : lambda) {
    if (job < 0 || job >= inst.jobs)
      throw dafsp::DomainError("job id " + std::to_string(job + 1) + " is outside 1.." +
                               std::to_string(inst.jobs));
    if (seen[static_cast<std::size_t>(job)])
      throw dafsp::DomainError("job " + std::to_string(job + 1) + " appears twice");
    seen[static_cast<std::size_t>(job)] = true;
  }

  const dafsp::AppNet net = dafsp::build_app(inst);
  const std::vector<int> amended = dafsp::idam(net, lambda);
  if (amended == lambda)
    std::cout << "already deadlock-free\n";
  else
    std::cout << "amended to " << one_based_list(amended) << '\n';

  dafsp::Marking m = net.initial_marking();
  for (int job : amended) m = dafsp::fire_job_and_settle(net, m, job);
  std::cout << "replay: " << amended.size() << " jobs fired, "
            << (m == net.final_marking() ? "all products assembled" : "products left unfinished")
            << "\nfinal marking:\n";
  std::istringstream dump(dafsp::dump_marking(net, m));
  for (std::string line; std::getline(dump, line);) std::cout << "  " << line << '\n';
  if (m != net.final_marking())
    throw dafsp::DomainError("replay did not reach the assembled state");
}

struct GanttOpts {
  std::string instance_path;
  std::string coding_path;
  std::string out = "-";
};

void run_gantt(const GanttOpts& o) {
  const dafsp::Instance inst = dafsp::load_instance(read_file(o.instance_path));
  const dafsp::Coding coding = dafsp::load_coding(read_file(o.coding_path));
  const auto violations = dafsp::validate_coding(inst, coding);
  if (!violations.empty()) throw dafsp::DomainError(violations.front());
  const dafsp::EvalResult res = dafsp::evaluate(inst, coding);

  std::string out = "factory\tmachine\tjob\tstart\tend\n";
  for (const dafsp::GanttRow& row : dafsp::export_gantt(res.schedule, inst)) {
    if (row.factory < 0)
      out += "A\t-\t";
    else
      out += std::to_string(row.factory + 1) + '\t' + std::to_string(row.machine + 1) + '\t';
    out += std::to_string(row.item + 1) + '\t' + std::to_string(row.start) + '\t' +
           std::to_string(row.end) + '\n';
  }
  write_output(o.out, out);
}

struct BenchOpts {
  std::string suite;
  int runs = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> algos{"hcce", "random", "greedy_l1"};
  long long budget_ms = -1;
  long long max_generations = -1;
  int limit = -1;
};

void run_bench(const BenchOpts& o) {
  const dafsp::SuiteSpec suite = dafsp::make_suite(o.suite, o.seed);
  const auto records = dafsp::run_suite(suite, o.algos, o.runs, o.seed, o.budget_ms,
                                        o.max_generations, o.limit);
  write_output(o.out, dafsp::records_csv(records));
}

struct ReportOpts {
  std::string in;
  std::string out;
  std::string friedman_out;
};

void run_report(const ReportOpts& o) {
  const auto records = dafsp::parse_records_csv(read_file(o.in));
  if (records.empty()) throw dafsp::DomainError("no result rows in " + o.in);
  const auto metas = dafsp::metas_from_records(records);
  write_output(o.out, dafsp::aggregate_csv(dafsp::aggregate(records, metas)));

  if (o.friedman_out.empty()) return;
  // Blocks: instances (sorted ids). Treatments: algorithms (sorted names).
  // Scores: mean makespan over the runs, which ranks like the mean deviation
  // because the per-instance best is a shared positive scale.
  std::set<std::string> ids, algos;
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> cells;
  for (const auto& rec : records) {
    ids.insert(rec.instance_id);
    algos.insert(rec.algorithm);
    auto& cell = cells[{rec.instance_id, rec.algorithm}];
    cell.first += static_cast<double>(rec.ca_max);
    cell.second += 1;
  }
  std::vector<std::vector<double>> scores;
  for (const auto& id : ids) {
    std::vector<double> row;
    for (const auto& algo : algos) {
      const auto it = cells.find({id, algo});
      if (it == cells.end())
        throw dafsp::DomainError("instance " + id + " has no runs of " + algo);
      row.push_back(it->second.first / it->second.second);
    }
    scores.push_back(std::move(row));
  }
  const dafsp::FriedmanResult result = dafsp::friedman(scores);
  write_output(o.friedman_out, dafsp::friedman_csv(result, {algos.begin(), algos.end()}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadlock-safe scheduling for distributed assembly flowshops"};
  app.require_subcommand(1);

  GenerateOpts gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Write a random instance file");
  gen_cmd->add_option("-u,--jobs", gen.cfg.jobs, "number of jobs")
      ->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("-f,--factories", gen.cfg.factories, "number of factories")
      ->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("-m,--machines", gen.cfg.machines, "machines per factory")
      ->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("-l,--products", gen.cfg.products, "number of products")
      ->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.cfg.seed, "generator seed");
  gen_cmd->add_option("--proc-lo", gen.cfg.job_time_lo, "processing time lower bound");
  gen_cmd->add_option("--proc-hi", gen.cfg.job_time_hi, "processing time upper bound");
  gen_cmd->add_option("--asm-lo", gen.cfg.asm_time_lo, "assembly time lower bound");
  gen_cmd->add_option("--asm-hi", gen.cfg.asm_time_hi, "assembly time upper bound");
  gen_cmd->add_option("-o,--out", gen.out, "output path, - for stdout")->required();
  gen_cmd->callback([&] { run_generate(gen); });

  SolveOpts sol;
  CLI::App* sol_cmd = app.add_subcommand("solve", "Search for a low-makespan schedule");
  sol_cmd->add_option("-i,--instance", sol.instance_path, "instance file")
      ->required()->check(CLI::ExistingFile);
  sol_cmd->add_option("--preset", sol.preset, "parameter preset")
      ->check(CLI::IsMember({"small", "medium", "large"}));
  sol.ps_opt = sol_cmd->add_option("--ps", sol.overrides.ps, "population size per side");
  sol.ep_opt = sol_cmd->add_option("--ep", sol.overrides.ep, "elite archive share");
  sol.alpha_opt = sol_cmd->add_option("--alpha", sol.overrides.alpha, "restart threshold");
  sol.cd_opt = sol_cmd->add_option("--cd", sol.overrides.cd, "destruction share");
  sol_cmd->add_option("--seed", sol.seed, "solver seed");
  sol_cmd->add_option("--budget-ms", sol.budget_ms,
                      "wall-clock budget; default 120*u*f*m*l ms when no generation cap is set");
  sol_cmd->add_option("--max-generations", sol.max_generations,
                      "generation cap; makes the run seed-deterministic");
  sol_cmd->add_option("-o,--out", sol.out, "write the best coding here");
  sol_cmd->callback([&] { run_solve(sol); });

  VerifyOpts ver;
  CLI::App* ver_cmd = app.add_subcommand("verify", "Check an entry order for deadlocks");
  ver_cmd->add_option("-i,--instance", ver.instance_path, "instance file")
      ->required()->check(CLI::ExistingFile);
  CLI::Option* ver_coding = ver_cmd->add_option("-c,--coding", ver.coding_path, "coding file")
      ->check(CLI::ExistingFile);
  ver_cmd->add_option("--lambda", ver.lambda_text, "entry order as 1-based ids, e.g. 1,4,3,2,5")
      ->excludes(ver_coding);
  ver_cmd->callback([&] { run_verify(ver); });

  GanttOpts gat;
  CLI::App* gat_cmd = app.add_subcommand("gantt", "Export a schedule as tab-separated rows");
  gat_cmd->add_option("-i,--instance", gat.instance_path, "instance file")
      ->required()->check(CLI::ExistingFile);
  gat_cmd->add_option("-c,--coding", gat.coding_path, "coding file")
      ->required()->check(CLI::ExistingFile);
  gat_cmd->add_option("-o,--out", gat.out, "output path, - for stdout");
  gat_cmd->callback([&] { run_gantt(gat); });

  BenchOpts ben;
  CLI::App* ben_cmd = app.add_subcommand("bench", "Run algorithms over a generated suite");
  ben_cmd->add_option("--suite", ben.suite, "instance grid")
      ->required()->check(CLI::IsMember({"small", "medium", "large", "toy"}));
  ben_cmd->add_option("--runs", ben.runs, "repetitions per algorithm")->check(CLI::PositiveNumber);
  ben_cmd->add_option("--seed", ben.seed, "suite seed; run r uses seed+r");
  ben_cmd->add_option("--algos", ben.algos, "algorithms to run")
      ->delimiter(',')->check(CLI::IsMember(dafsp::algorithm_names()));
  ben_cmd->add_option("--budget-ms", ben.budget_ms, "per-run budget override");
  ben_cmd->add_option("--max-generations", ben.max_generations,
                      "generation cap; drops the wall-clock budget unless one is given");
  ben_cmd->add_option("--limit", ben.limit, "only the first N instances");
  ben_cmd->add_option("-o,--out", ben.out, "results path, - for stdout")->required();
  ben_cmd->callback([&] { run_bench(ben); });

  ReportOpts rep;
  CLI::App* rep_cmd = app.add_subcommand("report", "Aggregate results into deviation tables");
  rep_cmd->add_option("-i,--in", rep.in, "results file from bench")
      ->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("-o,--out", rep.out, "deviation table path, - for stdout")->required();
  rep_cmd->add_option("--friedman-out", rep.friedman_out, "rank statistics path");
  rep_cmd->callback([&] { run_report(rep); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const dafsp::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
