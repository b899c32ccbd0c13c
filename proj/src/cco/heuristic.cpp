// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <tuple>

#include "topcco/cco.hpp"

namespace topcco::cco {

namespace {

struct Committee {
  NodeId leader;
  std::vector<NodeId> followers;
};

// Score used for acceptance: t_tr first, then the sum of per-committee
// bottlenecks so that progress on non-binding committees is not lost on the
// plateaus of a sum-of-maxima objective.
struct Score {
  Micros t_tr{Micros::max()};
  Micros spread{Micros::max()};
  bool operator<(const Score& o) const {
    return std::tie(t_tr, spread) < std::tie(o.t_tr, o.spread);
  }
};

class LocalSearch {
 public:
  LocalSearch(const Instance& instance, std::vector<Committee> committees,
              std::uint64_t seed, std::size_t budget)
      : instance_(instance),
        committees_(std::move(committees)),
        rng_(seed),
        budget_(budget),
        eligible_(instance.node_count(), false) {
    for (NodeId i : eligible_leaders(instance)) eligible_[i] = true;
    bottleneck_.resize(committees_.size());
    for (std::size_t c = 0; c < committees_.size(); ++c) {
      bottleneck_[c] = bottleneck(committees_[c]);
    }
    t_ver_ = 4 * instance.verification.max_leader_rtt();
    score_ = score();
  }

  void run() {
    bool improved = true;
    while (improved && used_ < budget_) {
      improved = false;
      improved |= pass_swap_leader();
      improved |= pass_move_member();
      improved |= pass_swap_member();
    }
  }

  const std::vector<Committee>& committees() const { return committees_; }
  Score current() const { return score_; }

 private:
  Micros bottleneck(const Committee& c) const {
    const std::size_t f = instance_.params.f;
    bool failed = instance_.nodes[c.leader].tee_failed;
    std::vector<Micros> r;
    r.reserve(c.followers.size());
    for (NodeId j : c.followers) {
      failed = failed || instance_.nodes[j].tee_failed;
      r.push_back(rtt(instance_.delays, c.leader, j));
    }
    const std::size_t need = (failed ? 3 : 2) * f;
    if (r.size() < need) return Micros::max() / 8;
    std::nth_element(r.begin(), r.begin() + (need - 1), r.end());
    return r[need - 1];
  }

  Score score() const {
    Micros worst{0}, spread{0}, to_v{0}, from_v{0};
    for (std::size_t c = 0; c < committees_.size(); ++c) {
      worst = std::max(worst, bottleneck_[c]);
      spread += bottleneck_[c];
      const NodeId i = committees_[c].leader;
      to_v = std::max(to_v, instance_.delays.to_verification[i]);
      from_v = std::max(from_v, instance_.delays.from_verification[i]);
    }
    return {4 * worst + to_v + from_v + t_ver_, spread};
  }

  // Applies `mutate` to committees a and b; keeps it iff the score strictly
  // improves, otherwise restores them.
  template <typename Mutate>
  bool attempt(std::size_t a, std::size_t b, Mutate&& mutate) {
    ++used_;
    const Committee save_a = committees_[a];
    const Committee save_b = committees_[b];
    const Micros old_a = bottleneck_[a], old_b = bottleneck_[b];
    mutate();
    bottleneck_[a] = bottleneck(committees_[a]);
    bottleneck_[b] = bottleneck(committees_[b]);
    const Score next = score();
    if (next < score_) {
      score_ = next;
      return true;
    }
    committees_[a] = save_a;
    committees_[b] = save_b;
    bottleneck_[a] = old_a;
    bottleneck_[b] = old_b;
    return false;
  }

  std::vector<std::size_t> shuffled(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    return order;
  }

  bool pass_swap_leader() {
    bool improved = false;
    for (std::size_t c : shuffled(committees_.size())) {
      for (std::size_t k : shuffled(committees_[c].followers.size())) {
        if (used_ >= budget_) return improved;
        const NodeId j = committees_[c].followers[k];
        if (!eligible_[j]) continue;
        improved |= attempt(c, c, [&] {
          auto& com = committees_[c];
          std::swap(com.leader, com.followers[k]);
        });
      }
    }
    return improved;
  }

  bool pass_move_member() {
    bool improved = false;
    const std::size_t min_followers = 3 * std::size_t{instance_.params.f};
    for (std::size_t a : shuffled(committees_.size())) {
      for (std::size_t b : shuffled(committees_.size())) {
        if (a == b) continue;
        for (std::size_t k = 0; k < committees_[a].followers.size();) {
          if (used_ >= budget_) return improved;
          if (committees_[a].followers.size() <= min_followers) break;
          const bool moved = attempt(a, b, [&] {
            auto& from = committees_[a].followers;
            committees_[b].followers.push_back(from[k]);
            from.erase(from.begin() + static_cast<std::ptrdiff_t>(k));
          });
          improved |= moved;
          if (!moved) ++k;
        }
      }
    }
    return improved;
  }

  bool pass_swap_member() {
    bool improved = false;
    for (std::size_t a : shuffled(committees_.size())) {
      for (std::size_t b = a + 1; b < committees_.size(); ++b) {
        for (std::size_t x = 0; x < committees_[a].followers.size(); ++x) {
          for (std::size_t y = 0; y < committees_[b].followers.size(); ++y) {
            if (used_ >= budget_) return improved;
            improved |= attempt(a, b, [&] {
              std::swap(committees_[a].followers[x],
                        committees_[b].followers[y]);
            });
          }
        }
      }
    }
    return improved;
  }

  const Instance& instance_;
  std::vector<Committee> committees_;
  std::vector<Micros> bottleneck_;
  std::mt19937_64 rng_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::vector<bool> eligible_;
  Micros t_ver_{0};
  Score score_;
};

// Farthest-point leader seeding: start from the leader closest to the
// verification committee, then repeatedly add the eligible node whose nearest
// chosen leader is farthest away.
std::vector<NodeId> separated_leaders(const Instance& instance,
                                      const std::vector<NodeId>& eligible,
                                      std::size_t p) {
  std::vector<NodeId> leaders;
  NodeId first = eligible.front();
  for (NodeId i : eligible) {
    const auto cost = instance.delays.to_verification[i] +
                      instance.delays.from_verification[i];
    const auto best = instance.delays.to_verification[first] +
                      instance.delays.from_verification[first];
    if (cost < best) first = i;
  }
  leaders.push_back(first);
  std::vector<Micros> nearest(instance.node_count(), Micros::max());
  while (leaders.size() < p) {
    const NodeId last = leaders.back();
    std::optional<NodeId> pick;
    for (NodeId i : eligible) {
      if (i == last || nearest[i] == Micros{-1}) {
        nearest[i] = Micros{-1};
        continue;
      }
      nearest[i] = std::min(nearest[i], rtt(instance.delays, i, last));
      if (!pick || nearest[i] > nearest[*pick]) pick = i;
    }
    if (!pick) break;
    leaders.push_back(*pick);
  }
  return leaders;
}

// Bottleneck-greedy fill: walk (leader, follower) pairs by ascending rtt
// until each committee has 3f followers; leftovers join their nearest leader.
std::vector<Committee> greedy_assign(const Instance& instance,
                                     const std::vector<NodeId>& leaders) {
  const std::size_t n = instance.node_count();
  const std::size_t quota = 3 * std::size_t{instance.params.f};
  std::vector<bool> taken(n, false);
  for (NodeId i : leaders) taken[i] = true;
  std::vector<std::tuple<Micros, std::size_t, NodeId>> pairs;
  for (std::size_t c = 0; c < leaders.size(); ++c) {
    for (NodeId j = 0; j < n; ++j) {
      if (!taken[j]) pairs.emplace_back(rtt(instance.delays, leaders[c], j), c, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Committee> committees;
  for (NodeId i : leaders) committees.push_back({i, {}});
  for (const auto& [r, c, j] : pairs) {
    if (taken[j] || committees[c].followers.size() >= quota) continue;
    committees[c].followers.push_back(j);
    taken[j] = true;
  }
  for (const auto& [r, c, j] : pairs) {
    if (taken[j]) continue;
    committees[c].followers.push_back(j);
    taken[j] = true;
  }
  return committees;
}

// Tight-cover seeding: repeatedly open the committee whose leader has the
// closest 3f unclaimed neighbours. Returns nullopt if it runs out of eligible
// leaders before reaching p committees.
std::optional<std::vector<Committee>> cover_assign(
    const Instance& instance, const std::vector<NodeId>& eligible,
    std::size_t p) {
  const std::size_t n = instance.node_count();
  const std::size_t quota = 3 * std::size_t{instance.params.f};
  std::vector<bool> claimed(n, false);
  std::vector<Committee> committees;
  while (committees.size() < p) {
    std::optional<std::pair<Micros, NodeId>> best;
    std::vector<NodeId> best_members;
    for (NodeId i : eligible) {
      if (claimed[i]) continue;
      std::vector<std::pair<Micros, NodeId>> near;
      for (NodeId j = 0; j < n; ++j) {
        if (j != i && !claimed[j]) near.emplace_back(rtt(instance.delays, i, j), j);
      }
      if (near.size() < quota) continue;
      std::partial_sort(near.begin(), near.begin() + quota, near.end());
      const auto radius = std::make_pair(near[quota - 1].first, i);
      if (!best || radius < *best) {
        best = radius;
        best_members.clear();
        for (std::size_t k = 0; k < quota; ++k) best_members.push_back(near[k].second);
      }
    }
    if (!best) return std::nullopt;
    claimed[best->second] = true;
    for (NodeId j : best_members) claimed[j] = true;
    committees.push_back({best->second, best_members});
  }
  for (NodeId j = 0; j < n; ++j) {
    if (claimed[j]) continue;
    std::size_t target = 0;
    for (std::size_t c = 1; c < committees.size(); ++c) {
      if (rtt(instance.delays, committees[c].leader, j) <
          rtt(instance.delays, committees[target].leader, j)) {
        target = c;
      }
    }
    committees[target].followers.push_back(j);
  }
  return committees;
}

std::vector<NodeId> to_membership(std::size_t n,
                                  const std::vector<Committee>& committees) {
  std::vector<NodeId> leader_of(n);
  for (const auto& c : committees) {
    leader_of[c.leader] = c.leader;
    for (NodeId j : c.followers) leader_of[j] = c.leader;
  }
  return leader_of;
}

}  // namespace

Solution solve_heuristic(const Instance& instance, std::uint64_t seed,
                         std::size_t iteration_budget,
                         const SolveLimits& limits) {
  const std::size_t n = instance.node_count();
  if (n < instance.params.min_committee_size()) {
    throw InfeasibleError("infeasible: N_c < 3f+1");
  }
  const auto eligible = eligible_leaders(instance);
  if (eligible.empty()) throw InfeasibleError("infeasible: no eligible leader");
  const auto range = committee_range(instance, limits);
  const std::size_t p = std::min(range.hi, eligible.size());
  if (p < range.lo || p == 0) {
    throw InfeasibleError("infeasible: committee-count window is empty");
  }

  std::vector<std::vector<Committee>> starts;
  starts.push_back(greedy_assign(instance, separated_leaders(instance, eligible, p)));
  if (auto cover = cover_assign(instance, eligible, p)) starts.push_back(*cover);

  std::optional<std::pair<Score, std::vector<Committee>>> best;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    LocalSearch search(instance, std::move(starts[s]), seed + s,
                       iteration_budget);
    search.run();
    if (!best || search.current() < best->first) {
      best.emplace(search.current(), search.committees());
    }
  }

  Solution out;
  out.config = complete(instance, to_membership(n, best->second));
  out.latency = evaluate(instance, out.config);
  out.optimal = false;
  return out;
}

Solution solve_auto(const Instance& instance, const SolveLimits& limits) {
  if (instance.node_count() <= limits.node_cap_exact) {
    return solve_exact(instance, limits);
  }
  return solve_heuristic(instance, limits.seed, limits.iteration_budget, limits);
}

}  // namespace topcco::cco
