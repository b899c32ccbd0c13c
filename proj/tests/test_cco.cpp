// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "support.hpp"
#include "topcco/cco.hpp"

using namespace topcco;
using namespace topcco::cco;
using topcco::testing::random_instance;
using topcco::testing::uniform_instance;

namespace {

// Objective recomputed literally from the x/y indicator form of the latency
// constraints, over every ordered pair.
LatencyBreakdown objective_oracle(const Instance& inst, const Configuration& c) {
  const std::size_t n = inst.node_count();
  auto x = [&](NodeId i, NodeId j) { return c.leader_of[j] == i ? 1 : 0; };
  auto y = [&](NodeId i, NodeId j) {
    return c.active_links.count(Link{i, j}) ? 1 : 0;
  };
  std::int64_t pre = 0, cv = 0, vc = 0, ver = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      pre = std::max<std::int64_t>(
          pre, 2 * (y(i, j) * inst.delays.d[i][j].count() +
                    y(i, j) * inst.delays.d[j][i].count()));
    }
    cv = std::max<std::int64_t>(cv, x(i, i) * inst.delays.to_verification[i].count());
    vc = std::max<std::int64_t>(vc, x(i, i) * inst.delays.from_verification[i].count());
  }
  const auto& v = inst.verification;
  for (std::size_t a = 0; a < v.member_count; ++a) {
    for (std::size_t b = 0; b < v.member_count; ++b) {
      const int xv = (a == v.leader_index && b != a) ? 1 : 0;
      ver = std::max<std::int64_t>(
          ver, 4 * (xv * v.internal_rtts[a][b].count() +
                    xv * v.internal_rtts[b][a].count()));
    }
  }
  LatencyBreakdown out{Micros{pre}, Micros{cv}, Micros{ver}, Micros{vc},
                       Micros{pre}, Micros{0}};
  out.t_tr = out.t_pre + out.t_cv + out.t_ver + out.t_vc + out.t_com;
  return out;
}

std::vector<ConstraintId> ids(const std::vector<Violation>& vs) {
  std::vector<ConstraintId> out;
  for (const auto& v : vs) out.push_back(v.constraint);
  return out;
}

Configuration single_committee(std::vector<Link> links) {
  Configuration c = from_membership({0, 0, 0, 0});
  for (auto l : links) c.active_links.insert(l);
  return c;
}

// Random partition of [0,n) into `p` blocks of >= 4 with the first member of
// each block as leader.
std::vector<NodeId> random_partition(std::size_t n, std::size_t p,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NodeId> order(n);
  for (NodeId i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<NodeId> leader_of(n);
  std::vector<NodeId> heads(p);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t block = k < 4 * p ? k / 4 : k % p;
    if (k < 4 * p && k % 4 == 0) heads[block] = order[k];
    leader_of[order[k]] = heads[block];
  }
  return leader_of;
}

}  // namespace

TEST_CASE("evaluate: uniform delays collapse to the closed form") {
  const Micros d{1500}, dv{2500}, r_half{700};
  auto inst = uniform_instance(8, 1, d, dv, r_half);
  auto config = complete(inst, {0, 0, 0, 0, 4, 4, 4, 4});
  const auto lat = evaluate(inst, config);
  const Micros r = 2 * r_half;
  CHECK(lat.t_tr == 4 * 2 * d + 2 * dv + 4 * r);
  CHECK(lat.t_pre == lat.t_com);
  CHECK(lat.t_tr == lat.t_pre + lat.t_cv + lat.t_ver + lat.t_vc + lat.t_com);
}

TEST_CASE("evaluate: single committee uses only the 2f cheapest links") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{100}, Micros{100});
  inst.delays.d[0][1] = inst.delays.d[1][0] = Micros{2000};  // rtt 4000
  inst.delays.d[0][2] = inst.delays.d[2][0] = Micros{3000};  // rtt 6000
  inst.delays.d[0][3] = inst.delays.d[3][0] = Micros{5000};  // rtt 10000
  auto config = complete(inst, {0, 0, 0, 0});
  CHECK(config.active_links == std::set<Link>{{0, 1}, {0, 2}});
  CHECK(evaluate(inst, config).t_pre == Micros{2 * 6000});
}

TEST_CASE("evaluate matches the pairwise oracle on random 2-committee instances") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto inst = random_instance({.n = 8, .tee_failed_fraction = 0.2}, seed);
    auto config = complete(inst, random_partition(8, 2, seed));
    CHECK(evaluate(inst, config) == objective_oracle(inst, config));
  }
}

TEST_CASE("evaluate rejects infeasible configurations with the violation list") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{100}, Micros{100});
  auto config = single_committee({{0, 1}});
  try {
    evaluate(inst, config);
    FAIL("expected InfeasibleConfiguration");
  } catch (const InfeasibleConfiguration& e) {
    CHECK(ids(e.violations()) == std::vector{ConstraintId::ConnectionCount});
  }
}

TEST_CASE("check_constraints: named cases") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{100}, Micros{100});
  inst.params.max_leader_byzantine = 0.2;

  SUBCASE("minimal feasible") {
    CHECK(check_constraints(inst, single_committee({{0, 1}, {0, 2}})).empty());
  }
  SUBCASE("failed follower with sigma 0") {
    inst.nodes[3].tee_failed = true;
    CHECK(ids(check_constraints(inst, single_committee({{0, 1}, {0, 2}}))) ==
          std::vector{ConstraintId::SigmaConsistency});
  }
  SUBCASE("sigma 1 with only 2f links") {
    auto c = single_committee({{0, 1}, {0, 2}});
    c.sigma[0] = 1;
    CHECK(ids(check_constraints(inst, c)) ==
          std::vector{ConstraintId::ConnectionCount});
  }
  SUBCASE("unreliable leader") {
    inst.nodes[0].byzantine_rate = 0.5;
    CHECK(ids(check_constraints(inst, single_committee({{0, 1}, {0, 2}}))) ==
          std::vector{ConstraintId::LeaderByzantine});
    inst.nodes[0].byzantine_rate = 0.0;
    inst.params.max_leader_crash = 0.1;
    inst.nodes[0].crash_rate = 0.3;
    CHECK(ids(check_constraints(inst, single_committee({{0, 1}, {0, 2}}))) ==
          std::vector{ConstraintId::LeaderCrash});
  }
  SUBCASE("structural violations") {
    auto c = single_committee({{0, 1}, {0, 2}});
    c.committee_count = 2;
    CHECK(ids(check_constraints(inst, c)) ==
          std::vector{ConstraintId::CommitteeCount});

    auto scoped = single_committee({{0, 1}, {0, 2}, {1, 3}});
    CHECK(ids(check_constraints(inst, scoped)) ==
          std::vector{ConstraintId::LinkScope});

    auto follows_follower = single_committee({{0, 1}, {0, 2}});
    follows_follower.leader_of[3] = 1;
    CHECK(ids(check_constraints(inst, follows_follower)) ==
          std::vector{ConstraintId::LeaderScope, ConstraintId::CommitteeSize});

    auto partial = single_committee({{0, 1}, {0, 2}});
    partial.leader_of.pop_back();
    CHECK(ids(check_constraints(inst, partial)) ==
          std::vector{ConstraintId::UniqueMembership});
  }
  SUBCASE("committee too small") {
    auto big = uniform_instance(7, 1, Micros{1000}, Micros{100}, Micros{100});
    auto c = complete(big, {0, 0, 0, 0, 4, 4, 4});
    CHECK(c.active_links.size() == 4);
    CHECK(ids(check_constraints(big, c)) ==
          std::vector{ConstraintId::CommitteeSize});
  }
}

TEST_CASE("derive_sigma") {
  auto inst = uniform_instance(8, 1, Micros{1000}, Micros{100}, Micros{100});
  const std::vector<NodeId> m{0, 0, 0, 0, 4, 4, 4, 4};
  CHECK(derive_sigma(inst, m) == std::vector<std::uint8_t>(8, 0));
  inst.nodes[4].tee_failed = true;
  CHECK(derive_sigma(inst, m) == std::vector<std::uint8_t>{0, 0, 0, 0, 1, 0, 0, 0});

  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto r = random_instance({.n = 12, .tee_failed_fraction = 0.3}, seed);
    const auto part = random_partition(12, 3, seed);
    const auto sigma = derive_sigma(r, part);
    for (NodeId i = 0; i < 12; ++i) {
      bool any = false;
      for (NodeId j = 0; j < 12; ++j) {
        if (part[j] == i && r.nodes[j].tee_failed) any = true;
      }
      CHECK(sigma[i] == ((part[i] == i && any) ? 1 : 0));
    }
    // Lowering any set sigma breaks consistency.
    auto config = complete(r, part);
    for (NodeId i = 0; i < 12; ++i) {
      if (!config.sigma[i]) continue;
      auto lowered = config;
      lowered.sigma[i] = 0;
      auto v = ids(check_constraints(r, lowered));
      CHECK(std::find(v.begin(), v.end(), ConstraintId::SigmaConsistency) !=
            v.end());
    }
  }
}

TEST_CASE("optimal_links: greedy and enumeration agree") {
  auto inst = uniform_instance(4, 1, Micros{1000}, Micros{100}, Micros{100});
  inst.delays.d[0][1] = inst.delays.d[1][0] = Micros{2};
  inst.delays.d[0][2] = inst.delays.d[2][0] = Micros{3};
  inst.delays.d[0][3] = inst.delays.d[3][0] = Micros{5};
  std::vector<NodeId> m{0, 0, 0, 0};
  CHECK(optimal_links(inst, m, {0, 0, 0, 0}) == std::set<Link>{{0, 1}, {0, 2}});
  CHECK(optimal_links(inst, m, {1, 0, 0, 0}).size() == 3);

  // Committee too small for sigma = 1 with f = 2.
  auto f2 = uniform_instance(6, 2, Micros{1000}, Micros{100}, Micros{100});
  CHECK_THROWS_AS(optimal_links(f2, {0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0}),
                  InfeasibleError);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto r = random_instance({.n = 12, .tee_failed_fraction = 0.25}, seed);
    const auto part = random_partition(12, 3, seed + 100);
    const auto config = complete(r, part);
    const auto t_pre = evaluate(r, config).t_pre;
    // Enumerate every admissible link subset per committee and keep the
    // smallest worst-link rtt.
    Micros best_global{0};
    for (NodeId i : config.leaders()) {
      const auto fs = config.members_of(i);
      const std::size_t need = config.sigma[i] ? 3 : 2;
      Micros best = Micros::max();
      const std::size_t m = fs.size();
      for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != need) continue;
        Micros worst{0};
        for (std::size_t b = 0; b < m; ++b) {
          if (mask & (1u << b)) worst = std::max(worst, rtt(r.delays, i, fs[b]));
        }
        best = std::min(best, worst);
      }
      best_global = std::max(best_global, best);
    }
    CHECK(t_pre == 2 * best_global);

    // Swapping any active link for an inactive one never helps.
    for (const auto& link : config.active_links) {
      for (NodeId j : config.members_of(link.leader)) {
        if (config.active_links.count({link.leader, j})) continue;
        auto swapped = config;
        swapped.active_links.erase(link);
        swapped.active_links.insert({link.leader, j});
        CHECK(evaluate(r, swapped).t_tr >= evaluate(r, config).t_tr);
      }
    }
  }
}

TEST_CASE("eligible_leaders") {
  auto inst = uniform_instance(5, 1, Micros{1000}, Micros{100}, Micros{100});
  CHECK(eligible_leaders(inst).size() == 5);
  inst.params.max_leader_byzantine = 0.1;
  inst.nodes[2].byzantine_rate = 0.5;
  CHECK(eligible_leaders(inst) == std::vector<NodeId>{0, 1, 3, 4});

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto r = random_instance({.n = 10, .ineligible_fraction = 0.5}, seed);
    std::vector<NodeId> expected;
    for (NodeId i = 0; i < 10; ++i) {
      if (r.nodes[i].byzantine_rate <= r.params.max_leader_byzantine &&
          r.nodes[i].crash_rate <= r.params.max_leader_crash) {
        expected.push_back(i);
      }
    }
    CHECK(eligible_leaders(r) == expected);
  }
}
