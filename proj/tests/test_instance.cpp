#include <string>

#include "doctest.h"
#include "dafsp/instance.hpp"
#include "fixtures.hpp"

using namespace dafsp;

TEST_CASE("instance file round trip is canonical") {
  const Instance inst = ref_instance();
  const std::string text = save_instance(inst);
  const Instance loaded = load_instance(text);
  CHECK(loaded.jobs == 5);
  CHECK(loaded.factories == 2);
  CHECK(loaded.machines == 3);
  CHECK(loaded.products == 2);
  CHECK(loaded.buffer == 3);
  CHECK(loaded.proc == inst.proc);
  CHECK(loaded.assembly == inst.assembly);
  CHECK(loaded.plan == inst.plan);
  CHECK(save_instance(loaded) == text);

  // Non-canonical spacing still loads to the same canonical form.
  std::string squashed;
  for (char c : text)
    if (c != ' ' && c != '\n') squashed += c;
  CHECK(save_instance(load_instance(squashed)) == text);
}

TEST_CASE("loader rejects structural violations") {
  Instance broken = ref_instance();
  broken.plan = {{0, 2}, {1, 3}};  // job 5 uncovered
  CHECK_THROWS_AS(validate_instance(broken), DomainError);

  broken = ref_instance();
  broken.plan = {{0, 2, 4}, {1, 3, 4}};  // job 5 twice
  CHECK_THROWS_AS(validate_instance(broken), DomainError);

  broken = ref_instance();
  broken.proc[2][1] = 0;  // below the minimum duration
  CHECK_THROWS_AS(validate_instance(broken), DomainError);

  CHECK_THROWS_AS(load_instance("{not json"), ParseError);
  CHECK_THROWS_AS(load_instance("{\"jobs\": 2}"), ParseError);
}

TEST_CASE("undersized buffer warns but loads") {
  Instance inst = ref_instance();
  inst.buffer = 2;  // smaller than the 3-job product
  std::vector<std::string> warnings;
  validate_instance(inst, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings.front().find("buffer capacity 2") != std::string::npos);
}

TEST_CASE("coding validation pinpoints each defect") {
  const Instance inst = ref_instance();
  CHECK(validate_coding(inst, ref_coding()).empty());

  Coding bad = ref_coding();
  bad.lambda = {0, 3, 4, 2, 2};
  auto v = validate_coding(inst, bad);
  REQUIRE(!v.empty());
  CHECK(v.front().find("repeats job 3") != std::string::npos);

  bad = ref_coding();
  bad.mu[4] = 2;  // factory 3 of 2
  v = validate_coding(inst, bad);
  REQUIRE(!v.empty());
  CHECK(v.front().find("outside 1..2") != std::string::npos);

  bad = ref_coding();
  bad.lambda.pop_back();
  CHECK(!validate_coding(inst, bad).empty());
}

TEST_CASE("coding file round trip keeps 1-based ids") {
  const Coding coding = ref_coding();
  const std::string text = save_coding(coding);
  CHECK(text.find("4") != std::string::npos);
  const Coding loaded = load_coding(text);
  CHECK(loaded.lambda == coding.lambda);
  CHECK(loaded.mu == coding.mu);
}

TEST_CASE("decode splits the order by factory and ranks products by last job") {
  const Instance inst = ref_instance();
  // Amended order (1,4,3,2,5): factory 1 runs (4,3), factory 2 runs (1,2,5).
  const Solution sol = decode(inst, {{0, 3, 2, 1, 4}, {1, 1, 0, 0, 1}});
  CHECK(sol.pi[0] == std::vector<int>{3, 2});
  CHECK(sol.pi[1] == std::vector<int>{0, 1, 4});
  CHECK(sol.sigma == std::vector<int>{0, 1});

  // Moving job 3 to the end flips the product order.
  const Solution flipped = decode(inst, {{0, 3, 1, 4, 2}, {1, 1, 0, 0, 1}});
  CHECK(flipped.sigma == std::vector<int>{1, 0});

  CHECK_THROWS_AS(decode(inst, {{0, 1, 2, 3, 3}, {1, 1, 0, 0, 1}}), DomainError);
}

TEST_CASE("totals sum processing times per job and product") {
  const JobTotals t = totals(ref_instance());
  CHECK(t.job == std::vector<Time>{14, 12, 10, 16, 14});
  CHECK(t.product == std::vector<Time>{24, 42});
}
