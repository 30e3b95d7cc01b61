#include "dafsp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace dafsp {

int SolverParams::archive_size() const {
  const auto as = static_cast<int>(std::llround(ep_fraction() * ps));
  return std::max(1, as);
}

void SolverParams::validate() const {
  if (ps < 4) throw DomainError("ps must be >= 4 (four seeded constructions)");
  if (!(ep > 0.0) || ep > 100.0) throw DomainError("ep must be in (0, 100]");
  if (!(cd > 0.0) || cd >= 100.0) throw DomainError("cd must be in (0, 100)");
  if (alpha < 1) throw DomainError("alpha must be >= 1");
}

SolverParams SolverParams::preset(std::string_view name) {
  SolverParams p;
  if (name == "small") {
    p.ps = 50; p.ep = 0.2; p.alpha = 21; p.cd = 0.1;
  } else if (name == "medium") {
    p.ps = 35; p.ep = 0.5; p.alpha = 21; p.cd = 0.1;
  } else if (name == "large") {
    p.ps = 25; p.ep = 0.2; p.alpha = 3; p.cd = 0.7;
  } else {
    throw DomainError("unknown preset \"" + std::string(name) + "\" (small, medium, large)");
  }
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Ctx {
  const Instance& inst;
  const AppNet& net;
  BackwardScheduler sched;
  Clock::time_point deadline = Clock::time_point::max();

  Ctx(const Instance& i, const AppNet& n) : inst(i), net(n), sched(i) {}
  bool out_of_time() const { return deadline != Clock::time_point::max() && Clock::now() >= deadline; }
};

// Every candidate evaluation funnels through here so the incumbent best and
// the evaluation count stay accurate no matter which phase produced it.
EvalResult eval_coding(Ctx& ctx, SolverState& st, const std::vector<int>& lambda,
                       const std::vector<int>& mu) {
  EvalResult res = evaluate(ctx.inst, ctx.net, Coding{lambda, mu});
  ++st.eval_count;
  if (!st.has_best || res.ca_max < st.best_eval.ca_max) {
    st.has_best = true;
    st.best_coding = Coding{res.lambda_prime, res.mu};
    st.best_eval = res;
  }
  return res;
}

void write_perm(Entity& e, std::vector<int> perm) {
  e.perm = std::move(perm);
  e.dirty = true;
  ++e.version;
}

// Pairing fitness with lazy recomputation: valid only while neither side's
// permutation changed and the collaborator link is the same.
Time pair_fitness(Ctx& ctx, SolverState& st, Entity& self, Entity& partner, bool self_is_lambda) {
  if (self.cached_partner == self.col && self.cached_self_ver == self.version &&
      self.cached_partner_ver == partner.version)
    return self.cached_fit;
  const auto& lambda = self_is_lambda ? self.perm : partner.perm;
  const auto& mu = self_is_lambda ? partner.perm : self.perm;
  const Time fit = eval_coding(ctx, st, lambda, mu).ca_max;
  self.cached_fit = fit;
  self.cached_partner = self.col;
  self.cached_self_ver = self.version;
  self.cached_partner_ver = partner.version;
  return fit;
}

Time fitness1(Ctx& ctx, SolverState& st, int n) {
  Entity& e = st.pop1[n];
  return pair_fitness(ctx, st, e, st.pop2[e.col], true);
}

Time fitness2(Ctx& ctx, SolverState& st, int n) {
  Entity& e = st.pop2[n];
  return pair_fitness(ctx, st, e, st.pop1[e.col], false);
}

std::vector<int> h1_impl(Ctx& ctx, std::span<const int> lambda) {
  std::vector<int> mu(ctx.inst.jobs, 0);
  std::vector<int> prefix;
  prefix.reserve(lambda.size());
  for (int job : lambda) {
    prefix.push_back(job);
    Time best = std::numeric_limits<Time>::max();
    int best_c = 0;
    for (int c = 0; c < ctx.inst.factories; ++c) {
      mu[job] = c;
      const Time cm = ctx.sched.run(prefix, mu);
      if (cm < best) {
        best = cm;
        best_c = c;
      }
    }
    mu[job] = best_c;
  }
  return mu;
}

// Jobs by descending total processing time, ties to the lower id.
std::vector<int> jobs_by_descending_total(const Instance& inst) {
  const JobTotals t = totals(inst);
  std::vector<int> order(inst.jobs);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return t.job[a] > t.job[b]; });
  return order;
}

std::vector<int> h2_impl(Ctx& ctx, std::span<const int> mu) {
  std::vector<int> order;
  order.reserve(ctx.inst.jobs);
  for (int job : jobs_by_descending_total(ctx.inst)) {
    Time best = std::numeric_limits<Time>::max();
    int best_pos = 0;
    for (int pos = 0; pos <= static_cast<int>(order.size()); ++pos) {
      order.insert(order.begin() + pos, job);
      const Time cm = ctx.sched.run(order, mu);
      order.erase(order.begin() + pos);
      if (cm <= best) {  // rightmost minimizing position
        best = cm;
        best_pos = pos;
      }
    }
    order.insert(order.begin() + best_pos, job);
  }
  return order;
}

// The four seeded constructions plus random fills, in fixed RNG draw order:
// the random entry order's shuffle, the random assignment's per-job draws,
// then shuffle + per-job draws per random individual.
void build_individuals(Ctx& ctx, SolverState& st, const SolverParams& params,
                       std::vector<std::vector<int>>& lambdas,
                       std::vector<std::vector<int>>& mus) {
  const Instance& inst = ctx.inst;
  lambdas.clear();
  mus.clear();

  std::vector<int> l1 = jobs_by_descending_total(inst);
  mus.push_back(h1_impl(ctx, l1));
  lambdas.push_back(idam(ctx.net, l1));

  const JobTotals t = totals(inst);
  std::vector<int> prods(inst.products);
  std::iota(prods.begin(), prods.end(), 0);
  std::stable_sort(prods.begin(), prods.end(),
                   [&](int a, int b) { return t.product[a] > t.product[b]; });
  std::vector<int> l2;
  l2.reserve(inst.jobs);
  for (int q : prods) {
    std::vector<int> group = inst.plan[q];
    std::stable_sort(group.begin(), group.end(),
                     [&](int a, int b) { return t.job[a] > t.job[b]; });
    l2.insert(l2.end(), group.begin(), group.end());
  }
  mus.push_back(h1_impl(ctx, l2));
  lambdas.push_back(idam(ctx.net, l2));

  std::vector<int> l3(inst.jobs);
  std::iota(l3.begin(), l3.end(), 0);
  st.rng.shuffle(l3);
  mus.push_back(h1_impl(ctx, l3));
  lambdas.push_back(idam(ctx.net, l3));

  std::vector<int> m4(inst.jobs);
  for (int& c : m4) c = st.rng.uniform_int(0, inst.factories - 1);
  lambdas.push_back(idam(ctx.net, h2_impl(ctx, m4)));
  mus.push_back(std::move(m4));

  for (int n = 4; n < params.ps; ++n) {
    std::vector<int> lam(inst.jobs);
    std::iota(lam.begin(), lam.end(), 0);
    st.rng.shuffle(lam);
    lambdas.push_back(idam(ctx.net, lam));
    std::vector<int> mu(inst.jobs);
    for (int& c : mu) c = st.rng.uniform_int(0, inst.factories - 1);
    mus.push_back(std::move(mu));
  }
}

// Fills (or refills) both populations with fresh individuals paired
// identically, evaluating each pairing once.
void populate(Ctx& ctx, SolverState& st, const SolverParams& params, bool refresh_archive) {
  std::vector<std::vector<int>> lambdas, mus;
  build_individuals(ctx, st, params, lambdas, mus);
  st.pop1.resize(params.ps);
  st.pop2.resize(params.ps);
  std::vector<Time> fits(params.ps);
  for (int n = 0; n < params.ps; ++n) {
    write_perm(st.pop1[n], std::move(lambdas[n]));
    write_perm(st.pop2[n], std::move(mus[n]));
    st.pop1[n].col = n;
    st.pop2[n].col = n;
    fits[n] = fitness1(ctx, st, n);
    // The identity pairing has the same fitness from either side.
    st.pop2[n].cached_fit = fits[n];
    st.pop2[n].cached_partner = n;
    st.pop2[n].cached_self_ver = st.pop2[n].version;
    st.pop2[n].cached_partner_ver = st.pop1[n].version;
  }
  if (refresh_archive) {
    std::vector<int> idx(params.ps);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fits[a] < fits[b]; });
    st.archive.clear();
    const int as = std::min(params.archive_size(), params.ps);
    for (int e = 0; e < as; ++e)
      st.archive.push_back({st.pop1[idx[e]].perm, st.pop2[idx[e]].perm, fits[idx[e]]});
  }
}

void evolve_pass1(Ctx& ctx, SolverState& st, const SolverParams& params) {
  const int ps = params.ps;
  for (int n = 0; n < ps; ++n) {
    if (ctx.out_of_time()) return;
    const int r = st.rng.uniform_int(0, ps - 1);
    std::vector<int> cand = idam(ctx.net, h2_impl(ctx, st.pop2[r].perm));
    if (params.use_mccea) {
      const Time fit = eval_coding(ctx, st, cand, st.pop2[r].perm).ca_max;
      const bool partner_dirty = st.pop2[st.pop1[n].col].dirty;
      if (fit < fitness1(ctx, st, n) || partner_dirty) {
        write_perm(st.pop1[n], std::move(cand));
        st.pop1[n].col = r;
      }
      // The donor assignment adopts this order as collaborator when the new
      // pairing beats the donor's current one.
      if (fit < fitness2(ctx, st, r)) st.pop2[r].col = n;
    } else {
      // Ablated form: fixed identity pairing, candidate judged with the
      // entity's own assignment.
      const Time fit = eval_coding(ctx, st, cand, st.pop2[n].perm).ca_max;
      if (fit < fitness1(ctx, st, n)) write_perm(st.pop1[n], std::move(cand));
    }
  }
}

void evolve_pass2(Ctx& ctx, SolverState& st, const SolverParams& params) {
  const int ps = params.ps;
  for (int n = 0; n < ps; ++n) {
    if (ctx.out_of_time()) return;
    const int r = st.rng.uniform_int(0, ps - 1);
    std::vector<int> cand = h1_impl(ctx, st.pop1[r].perm);
    if (params.use_mccea) {
      const Time fit = eval_coding(ctx, st, st.pop1[r].perm, cand).ca_max;
      const bool partner_dirty = st.pop1[st.pop2[n].col].dirty;
      if (fit < fitness2(ctx, st, n) || partner_dirty) {
        write_perm(st.pop2[n], std::move(cand));
        st.pop2[n].col = r;
      }
      if (fit < fitness1(ctx, st, r)) st.pop1[r].col = n;
    } else {
      const Time fit = eval_coding(ctx, st, st.pop1[n].perm, cand).ca_max;
      if (fit < fitness2(ctx, st, n)) write_perm(st.pop2[n], std::move(cand));
    }
  }
}

int argbest1(Ctx& ctx, SolverState& st, bool worst) {
  int pick = 0;
  Time val = fitness1(ctx, st, 0);
  for (int n = 1; n < static_cast<int>(st.pop1.size()); ++n) {
    const Time f = fitness1(ctx, st, n);
    if (worst ? f > val : f < val) {
      val = f;
      pick = n;
    }
  }
  return pick;
}

int argbest2(Ctx& ctx, SolverState& st, bool worst) {
  int pick = 0;
  Time val = fitness2(ctx, st, 0);
  for (int n = 1; n < static_cast<int>(st.pop2.size()); ++n) {
    const Time f = fitness2(ctx, st, n);
    if (worst ? f > val : f < val) {
      val = f;
      pick = n;
    }
  }
  return pick;
}

void itm_impl(Ctx& ctx, SolverState& st) {
  const int ps = static_cast<int>(st.pop1.size());
  const int as = static_cast<int>(st.archive.size());
  const int b1 = argbest1(ctx, st, false);
  const int w1 = argbest1(ctx, st, true);
  const int b2 = argbest2(ctx, st, false);
  const int w2 = argbest2(ctx, st, true);
  const int r1 = st.rng.uniform_int(0, ps - 1);
  const int r2 = st.rng.uniform_int(0, ps - 1);
  const int r3 = st.rng.uniform_int(0, as - 1);
  const int r4 = st.rng.uniform_int(0, as - 1);

  // All write sources are read from the pre-call state; applying the writes
  // in order with live reads would corrupt a source whenever the random
  // targets collide with it.
  const Time fit_b1 = fitness1(ctx, st, b1);
  const Time fit_b2 = fitness2(ctx, st, b2);
  std::vector<int> best_lambda = st.pop1[b1].perm;
  std::vector<int> best_lambda_partner = st.pop2[st.pop1[b1].col].perm;
  std::vector<int> best_mu = st.pop2[b2].perm;
  std::vector<int> best_mu_partner = st.pop1[st.pop2[b2].col].perm;
  std::vector<int> elite_lambda = st.archive[r3].lambda;
  std::vector<int> elite_mu = st.archive[r4].mu;

  write_perm(st.pop1[r1], best_mu_partner);
  write_perm(st.pop2[r2], best_lambda_partner);
  st.archive[r3] = {std::move(best_lambda), std::move(best_lambda_partner), fit_b1};
  st.archive[r4] = {std::move(best_mu_partner), std::move(best_mu), fit_b2};
  write_perm(st.pop1[w1], std::move(elite_lambda));
  write_perm(st.pop2[w2], std::move(elite_mu));
}

// Inserts `job` at the position of `order` minimizing the assembled span
// under `mu`; rightmost minimizing position on ties.
void insert_best_position(Ctx& ctx, std::vector<int>& order, std::span<const int> mu, int job) {
  Time best = std::numeric_limits<Time>::max();
  int best_pos = 0;
  for (int pos = 0; pos <= static_cast<int>(order.size()); ++pos) {
    order.insert(order.begin() + pos, job);
    const Time ca = ctx.sched.run_with_assembly(order, mu);
    order.erase(order.begin() + pos);
    if (ca <= best) {
      best = ca;
      best_pos = pos;
    }
  }
  order.insert(order.begin() + best_pos, job);
}

void accept_candidate(Ctx& ctx, SolverState& st, EliteEntry& entry,
                      const std::vector<int>& lambda, const std::vector<int>& mu) {
  const EvalResult res = eval_coding(ctx, st, lambda, mu);
  if (res.ca_max < entry.fitness) entry = {res.lambda_prime, res.mu, res.ca_max};
}

// Per product: pull its jobs out, reinsert each at the best position, then
// move the whole product to its best single factory; changes accumulate and
// the final coding is accepted only if strictly better.
void ls1(Ctx& ctx, SolverState& st, EliteEntry& entry) {
  const Instance& inst = ctx.inst;
  std::vector<int> lambda = entry.lambda;
  std::vector<int> mu = entry.mu;
  for (int q = 0; q < inst.products; ++q) {
    std::vector<int> removed, base;
    for (int job : lambda)
      (inst.product_of[job] == q ? removed : base).push_back(job);
    for (int job : removed) insert_best_position(ctx, base, mu, job);
    lambda = std::move(base);
    Time best = std::numeric_limits<Time>::max();
    int best_c = 0;
    for (int c = 0; c < inst.factories; ++c) {
      for (int job : inst.plan[q]) mu[job] = c;
      const Time ca = ctx.sched.run_with_assembly(lambda, mu);
      if (ca < best) {
        best = ca;
        best_c = c;
      }
    }
    for (int job : inst.plan[q]) mu[job] = best_c;
  }
  accept_candidate(ctx, st, entry, lambda, mu);
}

// Reinserts every job of the critical factory at its best position.
void ls2(Ctx& ctx, SolverState& st, EliteEntry& entry) {
  const EvalResult cur = eval_coding(ctx, st, entry.lambda, entry.mu);
  const CriticalInfo info = critical_min_factory(ctx.inst, cur);
  std::vector<int> removed, base;
  for (int job : entry.lambda)
    (entry.mu[job] == info.critical_factory ? removed : base).push_back(job);
  for (int job : removed) insert_best_position(ctx, base, entry.mu, job);
  accept_candidate(ctx, st, entry, base, entry.mu);
}

// Moves every critical-factory job to the latest-starting factory.
void ls3(Ctx& ctx, SolverState& st, EliteEntry& entry) {
  const EvalResult cur = eval_coding(ctx, st, entry.lambda, entry.mu);
  const CriticalInfo info = critical_min_factory(ctx.inst, cur);
  if (info.critical_factory == info.min_factory) return;
  std::vector<int> mu = entry.mu;
  for (int job = 0; job < ctx.inst.jobs; ++job)
    if (mu[job] == info.critical_factory) mu[job] = info.min_factory;
  accept_candidate(ctx, st, entry, entry.lambda, mu);
}

// Destruction against the archive best: a random job subset takes over the
// best entry's relative order (within its own slots) and factories.
void ls4(Ctx& ctx, SolverState& st, EliteEntry& entry, const SolverParams& params) {
  const int u = ctx.inst.jobs;
  int best_idx = 0;
  for (int e = 1; e < static_cast<int>(st.archive.size()); ++e)
    if (st.archive[e].fitness < st.archive[best_idx].fitness) best_idx = e;
  const EliteEntry& best = st.archive[best_idx];

  int d = static_cast<int>(std::ceil(params.cd_fraction() * u));
  d = std::clamp(d, 1, u);
  std::vector<int> idx(u);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < d; ++i) {
    const int j = st.rng.uniform_int(i, u - 1);
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> slots(idx.begin(), idx.begin() + d);
  std::sort(slots.begin(), slots.end());

  std::vector<int> pos_in_best(u, 0);
  for (int pos = 0; pos < u; ++pos) pos_in_best[best.lambda[pos]] = pos;
  std::vector<int> jobs;
  jobs.reserve(d);
  for (int s : slots) jobs.push_back(entry.lambda[s]);
  std::sort(jobs.begin(), jobs.end(), [&](int a, int b) { return pos_in_best[a] < pos_in_best[b]; });

  std::vector<int> lambda = entry.lambda;
  std::vector<int> mu = entry.mu;
  for (int t = 0; t < d; ++t) {
    lambda[slots[t]] = jobs[t];
    mu[jobs[t]] = best.mu[jobs[t]];
  }
  accept_candidate(ctx, st, entry, lambda, mu);
}

void local_search_impl(Ctx& ctx, SolverState& st, const SolverParams& params) {
  for (auto& entry : st.archive) {
    if (ctx.out_of_time()) return;
    ls1(ctx, st, entry);
    ls2(ctx, st, entry);
    ls3(ctx, st, entry);
    ls4(ctx, st, entry, params);
  }
}

}  // namespace

std::vector<int> h1_assign(const Instance& inst, std::span<const int> lambda) {
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  return h1_impl(ctx, lambda);
}

std::vector<int> h2_insert(const Instance& inst, std::span<const int> mu) {
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  return h2_impl(ctx, mu);
}

SolverState initialize(const Instance& inst, const SolverParams& params) {
  params.validate();
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  SolverState st;
  st.rng = Rng(params.seed);
  populate(ctx, st, params, true);
  for (auto& e : st.pop1) e.dirty = false;
  for (auto& e : st.pop2) e.dirty = false;
  return st;
}

void global_evolve(SolverState& st, const Instance& inst, const SolverParams& params) {
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  evolve_pass1(ctx, st, params);
  evolve_pass2(ctx, st, params);
}

void itm(SolverState& st, const Instance& inst) {
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  itm_impl(ctx, st);
}

void local_search(SolverState& st, const Instance& inst, const SolverParams& params) {
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  local_search_impl(ctx, st, params);
}

CriticalInfo critical_min_factory(const Instance& inst, const EvalResult& eval) {
  const Schedule& s = eval.schedule;
  const int l = inst.products;
  const int last_m = inst.machines - 1;
  CriticalInfo info;

  int crit_q = s.sigma[l - 1];
  for (int j = l - 2; j >= 0; --j) {
    if (s.assembly_start[s.sigma[j + 1]] > s.assembly_completion[s.sigma[j]]) {
      crit_q = s.sigma[j];
      break;
    }
  }
  info.critical_product = crit_q;

  std::vector<int> pos(inst.jobs, 0);
  for (int p = 0; p < static_cast<int>(eval.lambda_prime.size()); ++p)
    pos[eval.lambda_prime[p]] = p;
  int crit_job = inst.plan[crit_q].front();
  for (int job : inst.plan[crit_q]) {
    const Time c = s.completion[job][last_m];
    const Time cbest = s.completion[crit_job][last_m];
    if (c > cbest || (c == cbest && pos[job] > pos[crit_job])) crit_job = job;
  }
  info.critical_factory = eval.mu[crit_job];

  // Idle factories never start, which makes them the latest starters.
  std::vector<Time> first(inst.factories, std::numeric_limits<Time>::max());
  for (int job = 0; job < inst.jobs; ++job)
    first[eval.mu[job]] = std::min(first[eval.mu[job]], s.start[job][0]);
  int min_f = 0;
  for (int c = 1; c < inst.factories; ++c)
    if (first[c] > first[min_f]) min_f = c;
  info.min_factory = min_f;
  return info;
}

SolveOutcome solve(const Instance& inst, const SolverParams& params) {
  params.validate();
  if (params.budget_ms < 0 && params.max_generations < 0)
    throw DomainError("solve needs a wall-clock budget or a generation cap");

  const auto t0 = Clock::now();
  const AppNet net = build_app(inst);
  Ctx ctx(inst, net);
  if (params.budget_ms >= 0) ctx.deadline = t0 + std::chrono::milliseconds(params.budget_ms);

  SolverState st;
  st.rng = Rng(params.seed);
  populate(ctx, st, params, true);

  long long gen = 0;
  Time prev_best = st.best_eval.ca_max;
  while (true) {
    if (params.max_generations >= 0 && gen >= params.max_generations) break;
    if (ctx.out_of_time()) break;
    for (auto& e : st.pop1) e.dirty = false;
    for (auto& e : st.pop2) e.dirty = false;
    evolve_pass1(ctx, st, params);
    if (!ctx.out_of_time()) evolve_pass2(ctx, st, params);
    if (params.use_mccea && !ctx.out_of_time()) itm_impl(ctx, st);
    if (params.use_mccea && params.use_local_search && !ctx.out_of_time())
      local_search_impl(ctx, st, params);
    ++gen;
    if (st.best_eval.ca_max < prev_best) {
      prev_best = st.best_eval.ca_max;
      st.stagnation = 0;
    } else if (++st.stagnation >= params.alpha && !ctx.out_of_time()) {
      populate(ctx, st, params, false);
      ++st.restarts;
      st.stagnation = 0;
    }
  }

  SolveOutcome out;
  out.best = st.best_coding;
  out.eval = st.best_eval;
  out.stats.generations = gen;
  out.stats.evaluations = st.eval_count;
  out.stats.restarts = st.restarts;
  out.stats.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  return out;
}

}  // namespace dafsp
