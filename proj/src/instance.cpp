#include "dafsp/instance.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace dafsp {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(std::string(what) + ": not valid JSON");
  return j;
}

long long require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(std::string("missing or non-integer field \"") + key + "\"");
  return j[key].get<long long>();
}

}  // namespace

void validate_instance(Instance& inst, std::vector<std::string>* warnings) {
  if (inst.jobs < 1) throw DomainError("jobs must be >= 1");
  if (inst.factories < 1) throw DomainError("factories must be >= 1");
  if (inst.machines < 1) throw DomainError("machines must be >= 1");
  if (inst.products < 1) throw DomainError("products must be >= 1");
  if (inst.buffer < 1) throw DomainError("buffer must be >= 1");
  if (static_cast<int>(inst.proc.size()) != inst.jobs)
    throw DomainError("processing matrix must have one row per job");
  for (int i = 0; i < inst.jobs; ++i) {
    if (static_cast<int>(inst.proc[i].size()) != inst.machines)
      throw DomainError("processing row " + std::to_string(i + 1) + " must have one entry per machine");
    for (Time t : inst.proc[i])
      if (t < 1) throw DomainError("processing times must be >= 1");
  }
  if (static_cast<int>(inst.assembly.size()) != inst.products)
    throw DomainError("assembly times must have one entry per product");
  for (Time t : inst.assembly)
    if (t < 1) throw DomainError("assembly times must be >= 1");
  if (static_cast<int>(inst.plan.size()) != inst.products)
    throw DomainError("plan must have one job list per product");

  inst.product_of.assign(inst.jobs, -1);
  int covered = 0;
  int largest = 0;
  for (int q = 0; q < inst.products; ++q) {
    if (inst.plan[q].empty()) throw DomainError("product " + std::to_string(q + 1) + " has no jobs");
    largest = std::max(largest, static_cast<int>(inst.plan[q].size()));
    for (int i : inst.plan[q]) {
      if (i < 0 || i >= inst.jobs)
        throw DomainError("plan references job " + std::to_string(i + 1) + " outside 1.." + std::to_string(inst.jobs));
      if (inst.product_of[i] != -1)
        throw DomainError("job " + std::to_string(i + 1) + " appears in more than one product");
      inst.product_of[i] = q;
      ++covered;
    }
  }
  if (covered != inst.jobs) throw DomainError("plan does not cover every job");
  if (warnings && inst.buffer < largest)
    warnings->push_back("buffer capacity " + std::to_string(inst.buffer) +
                        " is smaller than the largest product (" + std::to_string(largest) +
                        " jobs); no ordering can complete");
}

Instance load_instance(const std::string& text, std::vector<std::string>* warnings) {
  json j = parse_json(text, "instance");
  Instance inst;
  inst.jobs = static_cast<int>(require_int(j, "jobs"));
  inst.factories = static_cast<int>(require_int(j, "factories"));
  inst.machines = static_cast<int>(require_int(j, "machines"));
  inst.products = static_cast<int>(require_int(j, "products"));
  inst.buffer = static_cast<int>(require_int(j, "buffer"));
  if (!j.contains("processing") || !j["processing"].is_array())
    throw ParseError("missing \"processing\" matrix");
  for (const auto& row : j["processing"]) {
    if (!row.is_array()) throw ParseError("\"processing\" must be an array of arrays");
    std::vector<Time> r;
    for (const auto& v : row) {
      if (!v.is_number_integer()) throw ParseError("processing times must be integers");
      r.push_back(v.get<Time>());
    }
    inst.proc.push_back(std::move(r));
  }
  if (!j.contains("assembly") || !j["assembly"].is_array())
    throw ParseError("missing \"assembly\" array");
  for (const auto& v : j["assembly"]) {
    if (!v.is_number_integer()) throw ParseError("assembly times must be integers");
    inst.assembly.push_back(v.get<Time>());
  }
  if (!j.contains("plan") || !j["plan"].is_array())
    throw ParseError("missing \"plan\" array");
  for (const auto& group : j["plan"]) {
    if (!group.is_array()) throw ParseError("\"plan\" must be an array of job-id arrays");
    std::vector<int> g;
    for (const auto& v : group) {
      if (!v.is_number_integer()) throw ParseError("plan job ids must be integers");
      g.push_back(static_cast<int>(v.get<long long>()) - 1);  // 1-based on disk
    }
    inst.plan.push_back(std::move(g));
  }
  validate_instance(inst, warnings);
  return inst;
}

std::string save_instance(const Instance& inst) {
  json j;
  j["jobs"] = inst.jobs;
  j["factories"] = inst.factories;
  j["machines"] = inst.machines;
  j["products"] = inst.products;
  j["buffer"] = inst.buffer;
  j["processing"] = inst.proc;
  j["assembly"] = inst.assembly;
  json plan = json::array();
  for (const auto& group : inst.plan) {
    json g = json::array();
    for (int i : group) g.push_back(i + 1);
    plan.push_back(std::move(g));
  }
  j["plan"] = std::move(plan);
  return j.dump(2) + "\n";
}

Coding load_coding(const std::string& text) {
  json j = parse_json(text, "coding");
  Coding c;
  if (!j.contains("lambda") || !j["lambda"].is_array())
    throw ParseError("missing \"lambda\" array");
  for (const auto& v : j["lambda"]) {
    if (!v.is_number_integer()) throw ParseError("lambda entries must be integers");
    c.lambda.push_back(static_cast<int>(v.get<long long>()) - 1);
  }
  if (!j.contains("mu") || !j["mu"].is_array())
    throw ParseError("missing \"mu\" array");
  for (const auto& v : j["mu"]) {
    if (!v.is_number_integer()) throw ParseError("mu entries must be integers");
    c.mu.push_back(static_cast<int>(v.get<long long>()) - 1);
  }
  return c;
}

std::string save_coding(const Coding& coding) {
  json j;
  json lambda = json::array();
  for (int i : coding.lambda) lambda.push_back(i + 1);
  json mu = json::array();
  for (int c : coding.mu) mu.push_back(c + 1);
  j["lambda"] = std::move(lambda);
  j["mu"] = std::move(mu);
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_coding(const Instance& inst, const Coding& coding) {
  std::vector<std::string> out;
  if (static_cast<int>(coding.lambda.size()) != inst.jobs)
    out.push_back("lambda has " + std::to_string(coding.lambda.size()) + " entries, expected " +
                  std::to_string(inst.jobs));
  std::vector<char> seen(inst.jobs, 0);
  for (int i : coding.lambda) {
    if (i < 0 || i >= inst.jobs) {
      out.push_back("lambda references job " + std::to_string(i + 1) + " outside 1.." +
                    std::to_string(inst.jobs));
    } else if (seen[i]++) {
      out.push_back("lambda repeats job " + std::to_string(i + 1));
    }
  }
  if (out.empty()) {
    for (int i = 0; i < inst.jobs; ++i)
      if (!seen[i]) out.push_back("lambda omits job " + std::to_string(i + 1));
  }
  if (static_cast<int>(coding.mu.size()) != inst.jobs)
    out.push_back("mu has " + std::to_string(coding.mu.size()) + " entries, expected " +
                  std::to_string(inst.jobs));
  for (std::size_t n = 0; n < coding.mu.size(); ++n) {
    int c = coding.mu[n];
    if (c < 0 || c >= inst.factories)
      out.push_back("mu[" + std::to_string(n + 1) + "] = " + std::to_string(c + 1) +
                    " outside 1.." + std::to_string(inst.factories));
  }
  return out;
}

Solution decode(const Instance& inst, const Coding& coding) {
  auto violations = validate_coding(inst, coding);
  if (!violations.empty()) throw DomainError("invalid coding: " + violations.front());
  Solution sol;
  sol.pi.assign(inst.factories, {});
  for (int i : coding.lambda) sol.pi[coding.mu[i]].push_back(i);
  // Product assembly order: position of each product's last job in lambda.
  std::vector<int> last(inst.products, -1);
  for (int pos = 0; pos < inst.jobs; ++pos) last[inst.product_of[coding.lambda[pos]]] = pos;
  sol.sigma.resize(inst.products);
  std::iota(sol.sigma.begin(), sol.sigma.end(), 0);
  std::sort(sol.sigma.begin(), sol.sigma.end(), [&](int a, int b) { return last[a] < last[b]; });
  return sol;
}

JobTotals totals(const Instance& inst) {
  JobTotals t;
  t.job.resize(inst.jobs);
  for (int i = 0; i < inst.jobs; ++i)
    t.job[i] = std::accumulate(inst.proc[i].begin(), inst.proc[i].end(), Time{0});
  t.product.assign(inst.products, 0);
  for (int q = 0; q < inst.products; ++q)
    for (int i : inst.plan[q]) t.product[q] += t.job[i];
  return t;
}

}  // namespace dafsp
