#pragma once

#include <string>
#include <vector>

#include "dafsp/errors.hpp"

namespace dafsp {

using Time = long long;

// A distributed assembly flowshop problem: `jobs` jobs are dispatched to
// `factories` identical flowshops of `machines` machines each, pass through a
// buffer of capacity `buffer`, and are assembled into `products` final
// products on a single assembly machine. `plan[q]` lists the jobs composing
// product q. All ids are 0-based in memory and 1-based on disk.
struct Instance {
  int jobs = 0;
  int factories = 0;
  int machines = 0;
  int products = 0;
  std::vector<std::vector<Time>> proc;    // [job][machine], >= 1
  std::vector<Time> assembly;             // [product], >= 1
  std::vector<std::vector<int>> plan;     // [product] -> job ids, a partition
  int buffer = 0;                         // capacity of the assembly buffer
  std::vector<int> product_of;            // derived: [job] -> product
};

// Job order split into machining and assembly stages: pi[c] is the processing
// sequence of factory c, sigma the product assembly order.
struct Solution {
  std::vector<std::vector<int>> pi;
  std::vector<int> sigma;
};

// A candidate schedule encoding: lambda is the buffer entry order over all
// jobs, mu[j] the factory assigned to job j (job-indexed, not position-indexed).
struct Coding {
  std::vector<int> lambda;
  std::vector<int> mu;
};

struct JobTotals {
  std::vector<Time> job;      // [job] sum of processing times over machines
  std::vector<Time> product;  // [product] sum of job totals over the plan
};

// Checks structural invariants, fills `product_of`, and appends non-fatal
// warnings (currently: buffer smaller than the largest product, which makes
// every ordering deadlock). Throws DomainError on hard violations.
void validate_instance(Instance& inst, std::vector<std::string>* warnings = nullptr);

// JSON text <-> Instance. save_instance emits the canonical form: loading and
// re-saving any valid file reproduces save's output byte for byte.
Instance load_instance(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string save_instance(const Instance& inst);

// Coding JSON text ({"lambda": [...], "mu": [...]}, 1-based on disk).
Coding load_coding(const std::string& text);
std::string save_coding(const Coding& coding);

// Returns human-readable violations; empty means the coding is well formed
// (lambda a permutation of all jobs, mu job-indexed with in-range factories).
std::vector<std::string> validate_coding(const Instance& inst, const Coding& coding);

// Splits lambda into per-factory sequences (lambda order preserved) and
// derives the product order: products sorted by the lambda position of their
// last job. Throws DomainError on an invalid coding.
Solution decode(const Instance& inst, const Coding& coding);

JobTotals totals(const Instance& inst);

}  // namespace dafsp
