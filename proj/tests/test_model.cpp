// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "support.hpp"
#include "topcco/errors.hpp"
#include "topcco/io.hpp"
#include "topcco/model.hpp"

using namespace topcco;
using topcco::testing::random_instance;
using topcco::testing::uniform_instance;

namespace {

bool mentions(const std::vector<ValidationIssue>& issues, const std::string& s) {
  for (const auto& i : issues) {
    if (i.what.find(s) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal instance validates") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{1000}, Micros{1000});
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("too few nodes for f") {
  auto inst = uniform_instance(3, 1, Micros{1000}, Micros{1000}, Micros{1000});
  CHECK(mentions(validate_instance(inst), "N_c < 3f+1"));
}

TEST_CASE("zero off-diagonal delay is rejected") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{1000}, Micros{1000});
  inst.delays.d[1][2] = Micros{0};
  auto issues = validate_instance(inst);
  REQUIRE(issues.size() == 1);
  CHECK(mentions(issues, "off-diagonal delay must be > 0"));
}

TEST_CASE("dimension and rate violations are all reported") {
  auto inst = uniform_instance(5, 1, Micros{1000}, Micros{1000}, Micros{1000});
  inst.delays.to_verification.pop_back();
  inst.nodes[2].crash_rate = 1.5;
  inst.params.max_leader_byzantine = -0.1;
  auto issues = validate_instance(inst);
  CHECK(issues.size() == 3);
  CHECK(validate_instance(inst).size() == issues.size());  // pure
}

TEST_CASE("rtt is the two-way sum and symmetric") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{1000}, Micros{1000});
  inst.delays.d[0][1] = Micros{3};
  inst.delays.d[1][0] = Micros{5};
  CHECK(rtt(inst.delays, 0, 1) == Micros{8});
  inst.delays.d[2][3] = inst.delays.d[3][2] = Micros{2};
  CHECK(rtt(inst.delays, 2, 3) == Micros{4});
  CHECK_THROWS_AS(rtt(inst.delays, 2, 2), ContractViolation);

  auto r = random_instance({.n = 6}, 77);
  for (NodeId i = 0; i < 6; ++i) {
    for (NodeId j = 0; j < 6; ++j) {
      if (i == j) continue;
      CHECK(rtt(r.delays, i, j) == r.delays.d[i][j] + r.delays.d[j][i]);
      CHECK(rtt(r.delays, i, j) == rtt(r.delays, j, i));
    }
  }
}

TEST_CASE("instance json round-trips exactly") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto inst = random_instance({.n = 7, .tee_failed_fraction = 0.3}, seed);
    const auto text = io::to_json(inst).dump();
    const auto back = io::instance_from_json(io::json::parse(text));
    CHECK(io::to_json(back).dump() == text);
    CHECK(back.delays.d == inst.delays.d);
    CHECK(back.verification.internal_rtts == inst.verification.internal_rtts);
  }
}

TEST_CASE("malformed instance json is an error") {
  CHECK_THROWS_AS(io::instance_from_json(io::json{{"f", 1}}), Error);
}
