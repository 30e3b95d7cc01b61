// End-to-end checks of the command line binary. Each case works in a fresh
// scratch directory and talks to the tool the way a shell user would; the
// binary path comes in through DAFSP_CLI_PATH at compile time.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"

#include "dafsp/instance.hpp"
#include "dafsp/petri.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace dafsp;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

fs::path fresh_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("dafsp_cli_test_" + std::to_string(::getpid()) + "_" +
                                   std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + DAFSP_CLI_PATH + "' " + args +
                          " >cli_stdout.txt 2>cli_stderr.txt";
  const int raw = std::system(cmd.c_str());
  CliResult res;
  res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(dir / "cli_stdout.txt");
  res.err = slurp(dir / "cli_stderr.txt");
  return res;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

void write_ref_files(const fs::path& dir) {
  spit(dir / "inst.json", save_instance(ref_instance()));
  spit(dir / "coding.json", save_coding(ref_coding()));
}

}  // namespace

TEST_CASE("cli: solve reports the seeded search result") {
  const fs::path dir = fresh_dir();
  write_ref_files(dir);
  const CliResult res = run_cli(
      dir, "solve -i inst.json --ps 8 --ep 0.3 --alpha 5 --cd 0.3 --seed 3 --max-generations 8 "
           "-o best.json");
  CHECK(res.code == 0);
  CHECK(res.out == "ca_max=27 cm_max=22\n");

  // The emitted coding loads back, is well formed and deadlock-free.
  const Instance inst = ref_instance();
  const Coding best = load_coding(slurp(dir / "best.json"));
  CHECK(validate_coding(inst, best).empty());
  const AppNet net = build_app(inst);
  CHECK(idam(net, best.lambda) == best.lambda);
}

TEST_CASE("cli: verify amends an unsafe order and accepts a safe one") {
  const fs::path dir = fresh_dir();
  write_ref_files(dir);

  const CliResult amended = run_cli(dir, "verify -i inst.json --lambda 1,4,5,3,2");
  CHECK(amended.code == 0);
  CHECK(first_line(amended.out) == "amended to 1,4,3,2,5");
  CHECK(amended.out.find("all products assembled") != std::string::npos);
  CHECK(amended.out.find("p_B = 3") != std::string::npos);

  const CliResult safe = run_cli(dir, "verify -i inst.json --lambda 1,4,3,2,5");
  CHECK(safe.code == 0);
  CHECK(first_line(safe.out) == "already deadlock-free");

  const CliResult from_file = run_cli(dir, "verify -i inst.json -c coding.json");
  CHECK(from_file.code == 0);
  CHECK(first_line(from_file.out) == "amended to 1,4,3,2,5");

  CHECK(run_cli(dir, "verify -i inst.json --lambda 1,1,3,4,5").code == 1);
  CHECK(run_cli(dir, "verify -i inst.json --lambda 1,x,3").code == 1);
  CHECK(run_cli(dir, "verify -i inst.json --lambda 1,2,3").code == 1);
  CHECK(run_cli(dir, "verify -i inst.json -c coding.json --lambda 1,2,3,4,5").code == 2);
  CHECK(run_cli(dir, "verify -i inst.json").code == 2);
}

TEST_CASE("cli: verify reports infeasible instances as domain failures") {
  const fs::path dir = fresh_dir();
  Instance tight;
  tight.jobs = 3;
  tight.factories = 1;
  tight.machines = 1;
  tight.products = 1;
  tight.proc = {{1}, {2}, {3}};
  tight.assembly = {1};
  tight.plan = {{0, 1, 2}};
  tight.buffer = 1;
  validate_instance(tight, nullptr);
  spit(dir / "tight.json", save_instance(tight));
  const CliResult res = run_cli(dir, "verify -i tight.json --lambda 1,2,3");
  CHECK(res.code == 1);
  CHECK(res.err.find("error:") != std::string::npos);
}

TEST_CASE("cli: gantt exports the frozen reference timetable") {
  const fs::path dir = fresh_dir();
  write_ref_files(dir);
  const CliResult res = run_cli(dir, "gantt -i inst.json -c coding.json -o plan.tsv");
  CHECK(res.code == 0);
  const std::string tsv = slurp(dir / "plan.tsv");
  CHECK(count_lines(tsv) == 18);  // header + 5 jobs * 3 machines + 2 products
  CHECK(first_line(tsv) == "factory\tmachine\tjob\tstart\tend");
  CHECK(tsv.find("1\t1\t4\t0\t6\n") != std::string::npos);   // job 4 opens factory 1
  CHECK(tsv.find("A\t-\t1\t20\t24\n") != std::string::npos);
  CHECK(tsv.find("A\t-\t2\t25\t30\n") != std::string::npos);
  // Assembly rows sit at the end, in assembly order.
  CHECK(tsv.ends_with("A\t-\t1\t20\t24\nA\t-\t2\t25\t30\n"));

  // A coding with a repeated job is rejected after parsing, not while parsing.
  spit(dir / "bad.json", "{\"lambda\": [1, 1, 3, 4, 5], \"mu\": [1, 2, 1, 2, 1]}\n");
  CHECK(run_cli(dir, "gantt -i inst.json -c bad.json -o x.tsv").code == 1);
  spit(dir / "trunc.json", "{\"lambda\": [1, 2");
  CHECK(run_cli(dir, "gantt -i inst.json -c trunc.json -o x.tsv").code == 1);
}

TEST_CASE("cli: generate writes a canonical loadable instance") {
  const fs::path dir = fresh_dir();
  const CliResult res = run_cli(dir, "generate -u 5 -f 2 -m 2 -l 2 --seed 3 -o gen.json");
  CHECK(res.code == 0);
  const std::string text = slurp(dir / "gen.json");
  const Instance inst = load_instance(text);
  CHECK(inst.jobs == 5);
  CHECK(inst.factories == 2);
  CHECK(inst.machines == 2);
  CHECK(inst.products == 2);
  CHECK(save_instance(inst) == text);  // canonical on disk

  const CliResult twice = run_cli(dir, "generate -u 5 -f 2 -m 2 -l 2 --seed 3 -o gen2.json");
  CHECK(twice.code == 0);
  CHECK(slurp(dir / "gen2.json") == text);

  CHECK(run_cli(dir, "generate -u 2 -f 1 -m 1 -l 3 -o bad.json").code == 1);
  CHECK(run_cli(dir, "generate -u 0 -f 1 -m 1 -l 1 -o bad.json").code == 2);
}

TEST_CASE("cli: missing files and bad flags are usage errors") {
  const fs::path dir = fresh_dir();
  write_ref_files(dir);
  CHECK(run_cli(dir, "solve -i missing.json --max-generations 2").code == 2);
  CHECK(run_cli(dir, "gantt -i inst.json -c missing.json").code == 2);
  CHECK(run_cli(dir, "solve -i inst.json --preset giant --max-generations 2").code == 2);
  CHECK(run_cli(dir, "bench --suite toy --algos warp_drive -o out.csv").code == 2);
  CHECK(run_cli(dir, "bench --suite galactic -o out.csv").code == 2);
  CHECK(run_cli(dir, "frobnicate").code == 2);
  CHECK(run_cli(dir, "").code == 2);

  const CliResult help = run_cli(dir, "--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("generate") != std::string::npos);
  CHECK(help.out.find("bench") != std::string::npos);
}

TEST_CASE("cli: bench and report produce byte-stable tables") {
  const fs::path dir = fresh_dir();
  const std::string bench_args =
      "bench --suite toy --runs 2 --seed 9 --algos greedy_l1,random --limit 2 "
      "--max-generations 2 -o ";
  CHECK(run_cli(dir, bench_args + "rec1.csv").code == 0);
  CHECK(run_cli(dir, bench_args + "rec2.csv").code == 0);
  const std::string rec = slurp(dir / "rec1.csv");
  CHECK(rec == slurp(dir / "rec2.csv"));
  CHECK(first_line(rec) == "instance_id,algorithm,run,seed,cm_max,ca_max,elapsed_ms");
  // 2 instances * 2 algorithms * 2 runs, plus the header.
  CHECK(count_lines(rec) == 9);

  CHECK(run_cli(dir, "report -i rec1.csv -o agg1.csv --friedman-out fr1.csv").code == 0);
  CHECK(run_cli(dir, "report -i rec2.csv -o agg2.csv --friedman-out fr2.csv").code == 0);
  const std::string agg = slurp(dir / "agg1.csv");
  CHECK(agg == slurp(dir / "agg2.csv"));
  CHECK(first_line(agg) == "group,level,algorithm,bRPD,aRPD");
  // toy grid instances 0 and 1 share every scale level: u 6, f 2, m 2, l 2,
  // plus the average row, each with two algorithm lines.
  CHECK(count_lines(agg) == 11);

  const std::string fr = slurp(dir / "fr1.csv");
  CHECK(fr == slurp(dir / "fr2.csv"));
  CHECK(first_line(fr) == "algorithm,avg_rank");
  CHECK(count_lines(fr) == 4);  // header, two algorithms, chi_square
  CHECK(fr.find("chi_square,") != std::string::npos);

  CHECK(run_cli(dir, "report -i missing.csv -o agg.csv").code == 2);
  spit(dir / "garbage.csv", "not,a,results,file\n");
  CHECK(run_cli(dir, "report -i garbage.csv -o agg.csv").code == 1);
}
