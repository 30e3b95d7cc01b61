#include "dafsp/petri.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace dafsp {

std::string AppNet::place_name(int idx) const {
  if (idx < jobs) return "p_i" + std::to_string(idx + 1);
  if (idx < 2 * jobs) return "p_i" + std::to_string(idx - jobs + 1) + "^e";
  if (idx < 2 * jobs + products) return "p_q" + std::to_string(idx - 2 * jobs + 1) + "^e";
  return "p_B";
}

Marking AppNet::initial_marking() const {
  Marking m(place_count(), 0);
  for (int i = 0; i < jobs; ++i) m[place_job(i)] = 1;
  m[place_buffer()] = buffer;
  return m;
}

Marking AppNet::final_marking() const {
  Marking m(place_count(), 0);
  for (int q = 0; q < products; ++q) m[place_product(q)] = 1;
  m[place_buffer()] = buffer;
  return m;
}

AppNet build_app(const Instance& inst) {
  AppNet net;
  net.jobs = inst.jobs;
  net.products = inst.products;
  net.buffer = inst.buffer;
  net.plan = inst.plan;
  net.product_of = inst.product_of;
  return net;
}

bool job_fire_enabled(const AppNet& net, const Marking& m, int job) {
  return m[net.place_job(job)] > 0 && m[net.place_buffer()] > 0;
}

namespace {

bool assembly_enabled(const AppNet& net, const Marking& m, int q) {
  for (int i : net.plan[q])
    if (m[net.place_done(i)] <= 0) return false;
  return true;
}

void settle(const AppNet& net, Marking& m) {
  bool fired = true;
  while (fired) {
    fired = false;
    for (int q = 0; q < net.products; ++q) {
      if (m[net.place_product(q)] == 0 && assembly_enabled(net, m, q)) {
        for (int i : net.plan[q]) m[net.place_done(i)] -= 1;
        m[net.place_product(q)] += 1;
        m[net.place_buffer()] += static_cast<int>(net.plan[q].size());
        fired = true;
      }
    }
  }
}

}  // namespace

Marking fire_job_and_settle(const AppNet& net, const Marking& m, int job) {
  if (m[net.place_job(job)] <= 0)
    throw DomainError("transition t_i" + std::to_string(job + 1) + " disabled: place " +
                      net.place_name(net.place_job(job)) + " is empty");
  if (m[net.place_buffer()] <= 0)
    throw DomainError("transition t_i" + std::to_string(job + 1) + " disabled: place p_B is empty");
  Marking out = m;
  out[net.place_job(job)] -= 1;
  out[net.place_done(job)] += 1;
  out[net.place_buffer()] -= 1;
  settle(net, out);
  return out;
}

bool iba_safe(const AppNet& net, const Marking& m) {
  // theta[q]: jobs of q still missing from the buffer, frozen at entry.
  std::vector<int> theta(net.products, 0);
  std::vector<char> unfinished(net.products, 0);
  int remaining = 0;
  for (int q = 0; q < net.products; ++q) {
    if (m[net.place_product(q)] != 0) continue;
    unfinished[q] = 1;
    ++remaining;
    int in_buffer = 0;
    for (int i : net.plan[q]) in_buffer += m[net.place_done(i)];
    theta[q] = static_cast<int>(net.plan[q].size()) - in_buffer;
  }
  int free_slots = m[net.place_buffer()];
  while (remaining > 0) {
    int pick = -1;
    for (int q = 0; q < net.products; ++q) {
      if (unfinished[q] && free_slots >= theta[q]) {
        pick = q;
        break;
      }
    }
    if (pick < 0) return false;
    // Virtual assembly: the missing jobs enter and the whole product leaves,
    // freeing the slots its buffered jobs were holding.
    free_slots += static_cast<int>(net.plan[pick].size()) - theta[pick];
    unfinished[pick] = 0;
    --remaining;
  }
  return true;
}

std::vector<int> idam(const AppNet& net, const std::vector<int>& lambda,
                      std::vector<IdamEvent>* trace, long long* attempts) {
  std::vector<int> gamma = lambda;
  const int u = static_cast<int>(gamma.size());
  Marking cur = net.initial_marking();
  for (int r = 0; r < u; ++r) {
    bool placed = false;
    for (int tries = u - r; tries > 0; --tries) {
      const int job = gamma[r];
      if (attempts) ++*attempts;
      if (job_fire_enabled(net, cur, job)) {
        Marking next = fire_job_and_settle(net, cur, job);
        if (iba_safe(net, next)) {
          cur = std::move(next);
          if (trace) trace->push_back({job, false});
          placed = true;
          break;
        }
      }
      if (trace) trace->push_back({job, true});
      std::rotate(gamma.begin() + r, gamma.begin() + r + 1, gamma.end());
    }
    if (!placed)
      throw InfeasibleError("no deadlock-free continuation at position " + std::to_string(r + 1) +
                            " (buffer capacity " + std::to_string(net.buffer) + ")");
  }
  return gamma;
}

bool reach_safe_oracle(const AppNet& net, const Marking& m, int job_cap) {
  if (net.jobs > job_cap)
    throw DomainError("reachability oracle limited to " + std::to_string(job_cap) + " jobs");
  const Marking target = net.final_marking();
  if (m == target) return true;
  std::set<Marking> seen;
  seen.insert(m);
  std::deque<Marking> queue;
  queue.push_back(m);
  while (!queue.empty()) {
    Marking cur = std::move(queue.front());
    queue.pop_front();
    for (int i = 0; i < net.jobs; ++i) {
      if (!job_fire_enabled(net, cur, i)) continue;
      Marking next = fire_job_and_settle(net, cur, i);
      if (next == target) return true;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return false;
}

std::string dump_marking(const AppNet& net, const Marking& m) {
  std::string out;
  for (int idx = 0; idx < net.place_count(); ++idx) {
    out += net.place_name(idx);
    out += " = ";
    out += std::to_string(m[idx]);
    out += '\n';
  }
  return out;
}

}  // namespace dafsp
