#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "dafsp/bench.hpp"
#include "dafsp/petri.hpp"
#include "dafsp/rng.hpp"
#include "fixtures.hpp"

using namespace dafsp;

namespace {

// All settled markings reachable from m by job firings, including m itself.
std::vector<Marking> reachable_markings(const AppNet& net, const Marking& m) {
  std::set<Marking> seen{m};
  std::deque<Marking> queue{m};
  std::vector<Marking> out;
  while (!queue.empty()) {
    Marking cur = queue.front();
    queue.pop_front();
    out.push_back(cur);
    for (int i = 0; i < net.jobs; ++i) {
      if (!job_fire_enabled(net, cur, i)) continue;
      Marking next = fire_job_and_settle(net, cur, i);
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return out;
}

Instance small_random_instance(Rng& rng) {
  GeneratorConfig cfg;
  cfg.jobs = rng.uniform_int(2, 8);
  cfg.products = rng.uniform_int(1, std::min(cfg.jobs, 3));
  cfg.factories = rng.uniform_int(1, 2);
  cfg.machines = rng.uniform_int(1, 3);
  cfg.job_time_hi = 20;
  cfg.asm_time_hi = 10;
  cfg.seed = rng.next_u64();
  return generate_instance(cfg);
}

}  // namespace

TEST_CASE("net layout matches the instance") {
  const Instance inst = ref_instance();
  const AppNet net = build_app(inst);
  CHECK(net.place_count() == 2 * 5 + 2 + 1);
  CHECK(net.transition_count() == 5 + 2);
  CHECK(net.place_name(2) == "p_i3");
  CHECK(net.place_name(7) == "p_i3^e");
  CHECK(net.place_name(10) == "p_q1^e");
  CHECK(net.place_name(12) == "p_B");

  const Marking m0 = net.initial_marking();
  for (int i = 0; i < 5; ++i) CHECK(m0[net.place_job(i)] == 1);
  CHECK(m0[net.place_buffer()] == 3);
  const Marking me = net.final_marking();
  CHECK(me[net.place_product(0)] == 1);
  CHECK(me[net.place_product(1)] == 1);
  CHECK(me[net.place_buffer()] == 3);
  CHECK(std::accumulate(me.begin(), me.end(), 0) == 2 + 3);
}

TEST_CASE("firing moves a job into the buffer and assembles complete products") {
  const AppNet net = build_app(ref_instance());
  Marking m = net.initial_marking();
  m = fire_job_and_settle(net, m, 0);  // i1 enters
  CHECK(m[net.place_done(0)] == 1);
  CHECK(m[net.place_buffer()] == 2);
  m = fire_job_and_settle(net, m, 2);  // i3 completes product 1 immediately
  CHECK(m[net.place_done(0)] == 0);
  CHECK(m[net.place_done(2)] == 0);
  CHECK(m[net.place_product(0)] == 1);
  CHECK(m[net.place_buffer()] == 3);

  CHECK_THROWS_WITH_AS((void)fire_job_and_settle(net, m, 0),
                       "transition t_i1 disabled: place p_i1 is empty", DomainError);
  Marking full = net.initial_marking();
  full[net.place_buffer()] = 0;
  CHECK_THROWS_WITH_AS((void)fire_job_and_settle(net, full, 0),
                       "transition t_i1 disabled: place p_B is empty", DomainError);
}

TEST_CASE("safety check rejects the classic stuck marking and accepts a live one") {
  const Instance inst = ref_instance();
  const AppNet net = build_app(inst);

  // Jobs 1, 4, 5 buffered, nothing assemblable, no free slot: stuck.
  Marking stuck(net.place_count(), 0);
  stuck[net.place_job(1)] = 1;
  stuck[net.place_job(2)] = 1;
  stuck[net.place_done(0)] = 1;
  stuck[net.place_done(3)] = 1;
  stuck[net.place_done(4)] = 1;
  CHECK_FALSE(iba_safe(net, stuck));
  CHECK_FALSE(reach_safe_oracle(net, stuck));

  // Only job 2 buffered: two slots left, both products can finish.
  Marking live(net.place_count(), 0);
  live[net.place_job(0)] = 1;
  live[net.place_job(2)] = 1;
  live[net.place_job(3)] = 1;
  live[net.place_job(4)] = 1;
  live[net.place_done(1)] = 1;
  live[net.place_buffer()] = 2;
  CHECK(iba_safe(net, live));
  CHECK(reach_safe_oracle(net, live));

  CHECK(iba_safe(net, net.initial_marking()));
  CHECK(iba_safe(net, net.final_marking()));
}

TEST_CASE("amending defers the one unsafe job and reaches the documented order") {
  const AppNet net = build_app(ref_instance());
  std::vector<IdamEvent> trace;
  long long attempts = 0;
  const std::vector<int> amended = idam(net, {0, 3, 4, 2, 1}, &trace, &attempts);
  CHECK(amended == std::vector<int>{0, 3, 2, 1, 4});

  REQUIRE(trace.size() == 6);
  const bool deferred[] = {false, false, true, false, false, false};
  const int jobs[] = {0, 3, 4, 2, 1, 4};
  for (int e = 0; e < 6; ++e) {
    CHECK(trace[e].job == jobs[e]);
    CHECK(trace[e].deferred == deferred[e]);
  }
  CHECK(attempts == 6);
  CHECK(attempts <= 5 * 6 / 2);
}

TEST_CASE("amending is the identity on safe orders and preserves the job multiset") {
  Rng rng(41);
  for (int it = 0; it < 100; ++it) {
    const Instance inst = small_random_instance(rng);
    const AppNet net = build_app(inst);
    std::vector<int> lambda(inst.jobs);
    std::iota(lambda.begin(), lambda.end(), 0);
    rng.shuffle(lambda);
    long long attempts = 0;
    const std::vector<int> once = idam(net, lambda, nullptr, &attempts);
    CHECK(attempts <= static_cast<long long>(inst.jobs) * (inst.jobs + 1) / 2);

    std::vector<int> sorted = once;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(inst.jobs);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);

    // A deadlock-free order passes through unchanged.
    CHECK(idam(net, once) == once);

    // And replays to the final marking.
    Marking m = net.initial_marking();
    for (int job : once) m = fire_job_and_settle(net, m, job);
    CHECK(m == net.final_marking());
  }
}

TEST_CASE("amending fails loudly when the buffer can never hold a product") {
  Instance inst;
  inst.jobs = 3;
  inst.factories = 1;
  inst.machines = 1;
  inst.products = 1;
  inst.proc = {{1}, {1}, {1}};
  inst.assembly = {1};
  inst.plan = {{0, 1, 2}};
  inst.buffer = 2;  // three jobs must gather, only two fit
  validate_instance(inst);
  const AppNet net = build_app(inst);
  CHECK_THROWS_AS(idam(net, std::vector<int>{0, 1, 2}), InfeasibleError);
  CHECK_FALSE(iba_safe(net, net.initial_marking()));
  CHECK_FALSE(reach_safe_oracle(net, net.initial_marking()));
}

TEST_CASE("safety check agrees with exhaustive reachability on every settled marking") {
  Rng rng(97);
  int markings_checked = 0;
  for (int it = 0; it < 60; ++it) {
    const Instance inst = small_random_instance(rng);
    const AppNet net = build_app(inst);
    for (const Marking& m : reachable_markings(net, net.initial_marking())) {
      CHECK(iba_safe(net, m) == reach_safe_oracle(net, m));
      ++markings_checked;
    }
  }
  CHECK(markings_checked > 500);
}

TEST_CASE("every reachable settled marking conserves job and buffer tokens") {
  Rng rng(7);
  for (int it = 0; it < 30; ++it) {
    const Instance inst = small_random_instance(rng);
    const AppNet net = build_app(inst);
    for (const Marking& m : reachable_markings(net, net.initial_marking())) {
      int buffered = 0;
      for (int i = 0; i < net.jobs; ++i) {
        // Each job is waiting, buffered, or part of an assembled product.
        CHECK(m[net.place_job(i)] + m[net.place_done(i)] +
                  m[net.place_product(net.product_of[i])] == 1);
        buffered += m[net.place_done(i)];
      }
      CHECK(m[net.place_buffer()] == net.buffer - buffered);
    }
  }
}

TEST_CASE("marking dump lists every place with its tokens") {
  const AppNet net = build_app(ref_instance());
  const std::string dump = dump_marking(net, net.initial_marking());
  CHECK(dump.find("p_i1 = 1") != std::string::npos);
  CHECK(dump.find("p_q2^e = 0") != std::string::npos);
  CHECK(dump.find("p_B = 3") != std::string::npos);
}

TEST_CASE("reachability oracle refuses oversized nets") {
  GeneratorConfig cfg;
  cfg.jobs = 13;
  cfg.factories = 2;
  cfg.machines = 2;
  cfg.products = 3;
  cfg.seed = 5;
  const Instance inst = generate_instance(cfg);
  const AppNet net = build_app(inst);
  CHECK_THROWS_AS(reach_safe_oracle(net, net.initial_marking()), DomainError);
}
