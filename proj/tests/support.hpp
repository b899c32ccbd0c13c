// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Test-only instance builders. Independent of the topology generators so that
// solver tests do not depend on them.
#pragma once

#include <random>

#include "topcco/model.hpp"

namespace topcco::testing {

struct RandomSpec {
  std::size_t n = 8;
  std::uint32_t f = 1;
  std::int64_t min_delay_us = 500;
  std::int64_t max_delay_us = 20000;
  double tee_failed_fraction = 0.0;
  double ineligible_fraction = 0.0;
  // Round every delay to a multiple of this many ticks.
  std::int64_t granularity_us = 1;
  std::size_t verification_members = 4;
};

inline VerificationCommittee uniform_verification(std::size_t members,
                                                  Micros one_way) {
  VerificationCommittee vc;
  vc.member_count = members;
  vc.leader_index = 0;
  vc.internal_rtts.assign(members, std::vector<Micros>(members, one_way));
  for (std::size_t a = 0; a < members; ++a) vc.internal_rtts[a][a] = Micros{0};
  return vc;
}

inline Instance random_instance(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto delay = [&] {
    std::uniform_int_distribution<std::int64_t> d(
        spec.min_delay_us / spec.granularity_us,
        spec.max_delay_us / spec.granularity_us);
    return Micros{d(rng) * spec.granularity_us};
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.params.f = spec.f;
  inst.params.max_leader_byzantine = 0.5;
  inst.params.max_leader_crash = 0.5;
  const std::size_t n = spec.n;
  for (std::size_t i = 0; i < n; ++i) {
    NodeProfile node;
    const bool ineligible = unit(rng) < spec.ineligible_fraction;
    node.byzantine_rate = ineligible ? 0.9 : 0.1;
    node.crash_rate = 0.1;
    node.tee_failed = unit(rng) < spec.tee_failed_fraction;
    inst.nodes.push_back(node);
  }
  // Keep at least one eligible leader.
  inst.nodes[seed % n].byzantine_rate = 0.1;
  inst.delays.d.assign(n, std::vector<Micros>(n, Micros{0}));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) inst.delays.d[i][j] = delay();
    }
    inst.delays.to_verification.push_back(delay());
    inst.delays.from_verification.push_back(delay());
  }
  inst.verification = uniform_verification(spec.verification_members, delay());
  return inst;
}

// Every delay equal to `d`, verification delays `dv`, verification one-way
// internal delay `r_half` (so the verification rtt is 2 * r_half).
inline Instance uniform_instance(std::size_t n, std::uint32_t f, Micros d,
                                 Micros dv, Micros r_half) {
  Instance inst;
  inst.params.f = f;
  inst.nodes.assign(n, NodeProfile{});
  inst.delays.d.assign(n, std::vector<Micros>(n, d));
  for (std::size_t i = 0; i < n; ++i) inst.delays.d[i][i] = Micros{0};
  inst.delays.to_verification.assign(n, dv);
  inst.delays.from_verification.assign(n, dv);
  inst.verification = uniform_verification(4, r_half);
  return inst;
}

// Two tight clusters: intra one-way `intra`, inter one-way `inter`. Nodes
// [0, n/2) form cluster A.
inline Instance two_clusters(std::size_t n, Micros intra, Micros inter) {
  Instance inst = uniform_instance(n, 1, intra, Micros{1000}, Micros{500});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && (i < n / 2) != (j < n / 2)) inst.delays.d[i][j] = inter;
    }
  }
  return inst;
}

}  // namespace topcco::testing
