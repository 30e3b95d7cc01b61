#pragma once

#include <string>
#include <vector>

#include "dafsp/instance.hpp"

namespace dafsp {

// Token counts, indexed by place. Layout for a net with u jobs, l products:
//   [0, u)      p_i    job i waiting to be processed
//   [u, 2u)     p_i^e  job i finished and sitting in the assembly buffer
//   [2u, 2u+l)  p_q^e  product q assembled
//   2u+l        p_B    free buffer slots
using Marking = std::vector<int>;

// Buffer-centric Petri model of an instance: firing t_i moves job i into the
// buffer (consuming a free slot), firing t_q consumes all of product q's jobs
// from the buffer and releases their slots. Assembly transitions carry no
// timing here; the net only tracks whether orderings can complete.
struct AppNet {
  int jobs = 0;
  int products = 0;
  int buffer = 0;
  std::vector<std::vector<int>> plan;  // [product] -> jobs
  std::vector<int> product_of;         // [job] -> product

  int place_job(int i) const { return i; }
  int place_done(int i) const { return jobs + i; }
  int place_product(int q) const { return 2 * jobs + q; }
  int place_buffer() const { return 2 * jobs + products; }
  int place_count() const { return 2 * jobs + products + 1; }
  int transition_count() const { return jobs + products; }

  std::string place_name(int idx) const;
  Marking initial_marking() const;
  Marking final_marking() const;  // every product assembled, buffer full
};

AppNet build_app(const Instance& inst);

bool job_fire_enabled(const AppNet& net, const Marking& m, int job);

// Fires t_job, then assembles every product whose jobs are all buffered
// (scanning products in ascending id until a fixed point; the result does not
// depend on the scan order because assembly presets are disjoint). Throws
// DomainError naming the empty place if t_job is disabled.
Marking fire_job_and_settle(const AppNet& net, const Marking& m, int job);

// Safety check for a settled marking: repeatedly picks any unfinished product
// whose number of still-missing jobs fits into the free buffer slots and
// virtually assembles it. True iff every product can be finished this way.
// The missing-job counts are computed once from `m` and never recomputed;
// virtual assembly removes whole products, which leaves the remaining counts
// untouched. Candidate products are tried in ascending id.
bool iba_safe(const AppNet& net, const Marking& m);

struct IdamEvent {
  int job = 0;
  bool deferred = false;  // true: moved to the end of the working sequence
};

// Deadlock amending: walk the candidate permutation left to right, keep each
// job whose firing leads to a safe marking, and push unsafe (or disabled)
// jobs to the end of the remaining sequence to retry later. Returns the
// amended permutation; identity on inputs that are already safe throughout.
// Throws InfeasibleError when no remaining job is safe at some position.
// `trace` records accepted and deferred jobs in event order; `attempts`
// accumulates the number of candidate trials (bounded by u(u+1)/2).
std::vector<int> idam(const AppNet& net, const std::vector<int>& lambda,
                      std::vector<IdamEvent>* trace = nullptr,
                      long long* attempts = nullptr);

// Ground-truth safety via exhaustive search: BFS over all settled markings
// reachable from `m` by job firings, true iff the final marking appears.
// Exponential in the job count; refuses nets larger than `job_cap`.
bool reach_safe_oracle(const AppNet& net, const Marking& m, int job_cap = 12);

// One "place = tokens" line per place, in layout order.
std::string dump_marking(const AppNet& net, const Marking& m);

}  // namespace dafsp
