#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dafsp/instance.hpp"
#include "dafsp/petri.hpp"

namespace dafsp {

// A timetable for one coding. Matrices are [job][machine]; rows of jobs that
// were not scheduled (partial inputs) are zero. All times are normalized so
// the earliest processing start is 0; `anchor_shift` is the offset that was
// added to reach that normal form.
struct Schedule {
  std::vector<std::vector<Time>> start;
  std::vector<std::vector<Time>> completion;
  std::vector<Time> assembly_start;       // [product]
  std::vector<Time> assembly_completion;  // [product]
  std::vector<int> sigma;                 // product assembly order
  std::vector<int> mu;                    // factory per job, for reporting
  Time cm_max = 0;                        // latest last-machine completion
  Time ca_max = 0;                        // system makespan
  Time anchor_shift = 0;
};

struct EvalResult {
  std::vector<int> lambda_prime;  // amended entry order actually scheduled
  std::vector<int> mu;
  Schedule schedule;
  Time cm_max = 0;
  Time ca_max = 0;
  int max_buffer_occupancy = 0;
  bool buffer_violation = false;  // peak occupancy exceeded the capacity
};

struct BufferTrace {
  std::vector<std::pair<Time, int>> series;  // occupancy after each event time
  int peak = 0;
  bool violation = false;
};

struct GanttRow {
  int factory = 0;  // -1 for the assembly machine
  int machine = 0;  // -1 for the assembly machine
  int item = 0;     // job id, or product id on assembly rows
  Time start = 0;
  Time end = 0;
};

// Reusable backward-scheduling workspace. One pass anchors the last job of
// the entry order on the final machine and walks backward: on the final
// machine each job completes when its successor starts (same factory) or one
// time unit before the successor completes (different factory), capped by the
// start of its own factory's next job; upstream machines complete at the
// earlier of the job's next-machine start and the factory successor's start
// on the same machine. Times are then shifted to make the earliest start 0.
// Accepts any subset of jobs as `order`, which is what the constructive
// heuristics score mid-build.
class BackwardScheduler {
 public:
  explicit BackwardScheduler(const Instance& inst);

  // Computes start/completion times for the jobs in `order` under `mu` and
  // returns the latest last-machine completion. Matrix entries for jobs
  // outside `order` are stale until the next run.
  Time run(std::span<const int> order, std::span<const int> mu);

  // run() plus the product assembly pass over the products present in
  // `order`; returns the resulting makespan.
  Time run_with_assembly(std::span<const int> order, std::span<const int> mu);

  Time start(int job, int machine) const { return s_[static_cast<std::size_t>(job) * m_ + machine]; }
  Time completion(int job, int machine) const { return c_[static_cast<std::size_t>(job) * m_ + machine]; }
  Time cm() const { return cm_; }
  Time anchor_shift() const { return shift_; }

 private:
  const Instance* inst_;
  int m_;
  std::vector<Time> s_, c_;
  std::vector<std::vector<int>> fseq_;   // scratch: per-factory sequences
  std::vector<int> next_same_;           // scratch: factory successor position
  std::vector<int> last_of_factory_;     // scratch for building next_same_
  std::vector<int> product_last_;        // scratch: last order position per product
  Time cm_ = 0, shift_ = 0;
};

// Full-order convenience wrapper returning a populated Schedule (assembly
// fields empty; see assembly_pass).
Schedule backward_schedule(const Instance& inst, std::span<const int> order,
                           std::span<const int> mu);

// Chains product assembly after the machining timetable: the first product
// starts when its last job completes; each later product additionally waits
// for the assembly machine to free up. Returns (SA, CA, ca_max).
struct AssemblyTimes {
  std::vector<Time> start;
  std::vector<Time> completion;
  Time ca_max = 0;
};
AssemblyTimes assembly_pass(const Instance& inst,
                            const std::vector<std::vector<Time>>& completion,
                            const std::vector<int>& sigma);

// Amends the coding's entry order, schedules it, chains assembly, and audits
// the buffer. Pure: identical inputs give identical results. Throws
// DomainError on an invalid coding, InfeasibleError when no deadlock-free
// order exists.
EvalResult evaluate(const Instance& inst, const AppNet& net, const Coding& coding);
EvalResult evaluate(const Instance& inst, const Coding& coding);

// Occupancy audit: job i is resident from its last-machine completion until
// its product's assembly start. A job arriving exactly when another product
// starts assembly still needs a slot for the handoff, so at equal timestamps
// entries are counted before exits.
BufferTrace buffer_trace(const Instance& inst, const Schedule& sched);

// One row per (factory, machine, job) sorted that way, then one assembly row
// per product in assembly order. Ids are 0-based in the rows.
std::vector<GanttRow> export_gantt(const Schedule& sched, const Instance& inst);

}  // namespace dafsp
