#include "dafsp/schedule.hpp"

#include <algorithm>
#include <limits>

namespace dafsp {

BackwardScheduler::BackwardScheduler(const Instance& inst)
    : inst_(&inst),
      m_(inst.machines),
      s_(static_cast<std::size_t>(inst.jobs) * inst.machines, 0),
      c_(static_cast<std::size_t>(inst.jobs) * inst.machines, 0),
      fseq_(inst.factories),
      next_same_(inst.jobs, -1),
      last_of_factory_(inst.factories, -1),
      product_last_(inst.products, -1) {}

Time BackwardScheduler::run(std::span<const int> order, std::span<const int> mu) {
  const auto& proc = inst_->proc;
  const int n = static_cast<int>(order.size());
  const int last_m = m_ - 1;
  cm_ = 0;
  shift_ = 0;
  if (n == 0) return 0;

  for (auto& seq : fseq_) seq.clear();
  for (int h = 0; h < n; ++h) fseq_[mu[order[h]]].push_back(order[h]);

  // Factory successor of each order position, via a right-to-left sweep.
  std::fill(last_of_factory_.begin(), last_of_factory_.end(), -1);
  for (int h = n - 1; h >= 0; --h) {
    const int f = mu[order[h]];
    next_same_[h] = last_of_factory_[f];
    last_of_factory_[f] = h;
  }

  // Final machine, walking the entry order backward from the anchor.
  for (int h = n - 1; h >= 0; --h) {
    const int i = order[h];
    Time comp = 0;
    if (h < n - 1) {
      const int j = order[h + 1];
      comp = (mu[i] == mu[j]) ? start(j, last_m) : completion(j, last_m) - 1;
      if (next_same_[h] >= 0) comp = std::min(comp, start(order[next_same_[h]], last_m));
    }
    c_[static_cast<std::size_t>(i) * m_ + last_m] = comp;
    s_[static_cast<std::size_t>(i) * m_ + last_m] = comp - proc[i][last_m];
  }

  // Upstream machines, per factory, jobs backward.
  for (int k = m_ - 2; k >= 0; --k) {
    for (const auto& seq : fseq_) {
      for (int idx = static_cast<int>(seq.size()) - 1; idx >= 0; --idx) {
        const int i = seq[idx];
        Time comp = start(i, k + 1);
        if (idx + 1 < static_cast<int>(seq.size()))
          comp = std::min(comp, start(seq[idx + 1], k));
        c_[static_cast<std::size_t>(i) * m_ + k] = comp;
        s_[static_cast<std::size_t>(i) * m_ + k] = comp - proc[i][k];
      }
    }
  }

  Time lo = std::numeric_limits<Time>::max();
  for (int h = 0; h < n; ++h) lo = std::min(lo, start(order[h], 0));
  shift_ = -lo;
  for (int h = 0; h < n; ++h) {
    const std::size_t base = static_cast<std::size_t>(order[h]) * m_;
    for (int k = 0; k < m_; ++k) {
      s_[base + k] += shift_;
      c_[base + k] += shift_;
    }
  }
  for (int h = 0; h < n; ++h) cm_ = std::max(cm_, completion(order[h], last_m));
  return cm_;
}

Time BackwardScheduler::run_with_assembly(std::span<const int> order, std::span<const int> mu) {
  run(order, mu);
  const int n = static_cast<int>(order.size());
  if (n == 0) return 0;
  // Products become ready in order of their last job's entry position, and
  // last-machine completions rise along the entry order, so one forward walk
  // over the order chains the assembly machine correctly.
  std::fill(product_last_.begin(), product_last_.end(), -1);
  for (int h = 0; h < n; ++h) product_last_[inst_->product_of[order[h]]] = h;
  Time prev_ca = std::numeric_limits<Time>::min();
  Time ca_max = 0;
  for (int h = 0; h < n; ++h) {
    const int q = inst_->product_of[order[h]];
    if (product_last_[q] != h) continue;  // not the product's last job
    const Time ready = completion(order[h], m_ - 1);
    const Time sa = (prev_ca == std::numeric_limits<Time>::min()) ? ready : std::max(prev_ca, ready);
    prev_ca = sa + inst_->assembly[q];
    ca_max = prev_ca;
  }
  return ca_max;
}

Schedule backward_schedule(const Instance& inst, std::span<const int> order,
                           std::span<const int> mu) {
  BackwardScheduler ws(inst);
  ws.run(order, mu);
  Schedule sched;
  sched.start.assign(inst.jobs, std::vector<Time>(inst.machines, 0));
  sched.completion.assign(inst.jobs, std::vector<Time>(inst.machines, 0));
  for (int i : order) {
    for (int k = 0; k < inst.machines; ++k) {
      sched.start[i][k] = ws.start(i, k);
      sched.completion[i][k] = ws.completion(i, k);
    }
  }
  sched.mu.assign(mu.begin(), mu.end());
  sched.cm_max = ws.cm();
  sched.anchor_shift = ws.anchor_shift();
  return sched;
}

AssemblyTimes assembly_pass(const Instance& inst,
                            const std::vector<std::vector<Time>>& completion,
                            const std::vector<int>& sigma) {
  AssemblyTimes out;
  out.start.assign(inst.products, 0);
  out.completion.assign(inst.products, 0);
  Time prev_ca = 0;
  for (std::size_t pos = 0; pos < sigma.size(); ++pos) {
    const int q = sigma[pos];
    Time ready = 0;
    for (int i : inst.plan[q]) ready = std::max(ready, completion[i][inst.machines - 1]);
    const Time sa = (pos == 0) ? ready : std::max(prev_ca, ready);
    out.start[q] = sa;
    out.completion[q] = sa + inst.assembly[q];
    prev_ca = out.completion[q];
  }
  out.ca_max = prev_ca;
  return out;
}

EvalResult evaluate(const Instance& inst, const AppNet& net, const Coding& coding) {
  auto violations = validate_coding(inst, coding);
  if (!violations.empty()) throw DomainError("invalid coding: " + violations.front());

  EvalResult res;
  res.lambda_prime = idam(net, coding.lambda);
  res.mu = coding.mu;

  const Coding amended{res.lambda_prime, res.mu};
  Solution sol = decode(inst, amended);
  res.schedule = backward_schedule(inst, res.lambda_prime, res.mu);
  res.schedule.sigma = sol.sigma;
  AssemblyTimes at = assembly_pass(inst, res.schedule.completion, sol.sigma);
  res.schedule.assembly_start = std::move(at.start);
  res.schedule.assembly_completion = std::move(at.completion);
  res.schedule.ca_max = at.ca_max;
  res.cm_max = res.schedule.cm_max;
  res.ca_max = res.schedule.ca_max;

  BufferTrace trace = buffer_trace(inst, res.schedule);
  res.max_buffer_occupancy = trace.peak;
  res.buffer_violation = trace.violation;
  return res;
}

EvalResult evaluate(const Instance& inst, const Coding& coding) {
  return evaluate(inst, build_app(inst), coding);
}

BufferTrace buffer_trace(const Instance& inst, const Schedule& sched) {
  // Event sweep; type 0 = entry sorts before type 1 = exit at equal times.
  std::vector<std::pair<Time, int>> events;
  events.reserve(2 * static_cast<std::size_t>(inst.jobs));
  for (int i = 0; i < inst.jobs; ++i) {
    events.emplace_back(sched.completion[i][inst.machines - 1], 0);
    events.emplace_back(sched.assembly_start[inst.product_of[i]], 1);
  }
  std::sort(events.begin(), events.end());
  BufferTrace out;
  int occ = 0;
  std::size_t e = 0;
  while (e < events.size()) {
    const Time t = events[e].first;
    while (e < events.size() && events[e].first == t) {
      if (events[e].second == 0) {
        ++occ;
        out.peak = std::max(out.peak, occ);
      } else {
        --occ;
      }
      ++e;
    }
    out.series.emplace_back(t, occ);
  }
  out.violation = out.peak > inst.buffer;
  return out;
}

std::vector<GanttRow> export_gantt(const Schedule& sched, const Instance& inst) {
  std::vector<GanttRow> rows;
  rows.reserve(static_cast<std::size_t>(inst.jobs) * inst.machines + inst.products);
  for (int i = 0; i < inst.jobs; ++i)
    for (int k = 0; k < inst.machines; ++k)
      rows.push_back({sched.mu[i], k, i, sched.start[i][k], sched.completion[i][k]});
  std::sort(rows.begin(), rows.end(), [](const GanttRow& a, const GanttRow& b) {
    if (a.factory != b.factory) return a.factory < b.factory;
    if (a.machine != b.machine) return a.machine < b.machine;
    return a.item < b.item;
  });
  for (int q : sched.sigma)
    rows.push_back({-1, -1, q, sched.assembly_start[q], sched.assembly_completion[q]});
  return rows;
}

}  // namespace dafsp
