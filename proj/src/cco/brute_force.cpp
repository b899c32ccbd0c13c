// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <functional>

#include "topcco/cco.hpp"

namespace topcco::cco {

namespace {

constexpr std::size_t kBruteForceCap = 10;

// Calls `visit` once per k-subset of `items`.
void for_each_subset(const std::vector<NodeId>& items, std::size_t k,
                     const std::function<void(const std::vector<NodeId>&)>& visit) {
  std::vector<NodeId> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (chosen.size() == k) {
      visit(chosen);
      return;
    }
    for (std::size_t a = from; a + (k - chosen.size()) <= items.size(); ++a) {
      chosen.push_back(items[a]);
      rec(a + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

class Enumerator {
 public:
  Enumerator(const Instance& instance, CommitteeRange range)
      : instance_(instance), range_(range) {}

  Solution run() {
    const std::size_t n = instance_.node_count();
    block_of_.assign(n, 0);
    partition(0, 0);
    if (!found_) throw InfeasibleError("infeasible: no feasible partition");
    best_.optimal = true;
    return best_;
  }

 private:
  // Restricted-growth enumeration of set partitions.
  void partition(NodeId next, std::size_t blocks) {
    const std::size_t n = instance_.node_count();
    if (next == n) {
      if (blocks < range_.lo || blocks > range_.hi) return;
      std::vector<std::vector<NodeId>> members(blocks);
      for (NodeId j = 0; j < n; ++j) members[block_of_[j]].push_back(j);
      for (const auto& m : members) {
        if (m.size() < instance_.params.min_committee_size()) return;
      }
      members_ = std::move(members);
      config_ = Configuration{};
      config_.leader_of.assign(n, 0);
      config_.sigma.assign(n, 0);
      config_.committee_count = blocks;
      choose_block(0);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      if (b == blocks && blocks == range_.hi) break;
      block_of_[next] = b;
      partition(next + 1, std::max(blocks, b + 1));
    }
  }

  // Leader, sigma and active links for block `b`, then recurse.
  void choose_block(std::size_t b) {
    if (b == members_.size()) {
      consider();
      return;
    }
    const auto& members = members_[b];
    const std::size_t f = instance_.params.f;
    for (NodeId leader : members) {
      std::vector<NodeId> followers;
      for (NodeId j : members) {
        config_.leader_of[j] = leader;
        if (j != leader) followers.push_back(j);
      }
      for (std::uint8_t sigma = 0; sigma <= 1; ++sigma) {
        config_.sigma[leader] = sigma;
        for_each_subset(followers, (2 + sigma) * f,
                        [&](const std::vector<NodeId>& active) {
                          for (NodeId j : active) {
                            config_.active_links.insert({leader, j});
                          }
                          choose_block(b + 1);
                          for (NodeId j : active) {
                            config_.active_links.erase({leader, j});
                          }
                        });
      }
      config_.sigma[leader] = 0;
    }
  }

  void consider() {
    if (!check_constraints(instance_, config_).empty()) return;
    const auto latency = evaluate_unchecked(instance_, config_);
    if (!found_ || latency.t_tr < best_.latency.t_tr) {
      found_ = true;
      best_.config = config_;
      best_.latency = latency;
    }
  }

  const Instance& instance_;
  CommitteeRange range_;
  std::vector<std::size_t> block_of_;
  std::vector<std::vector<NodeId>> members_;
  Configuration config_;
  Solution best_;
  bool found_ = false;
};

}  // namespace

Solution brute_force(const Instance& instance, const SolveLimits& limits) {
  if (instance.node_count() > kBruteForceCap) {
    throw RefusedError("brute_force: refusing instances with more than 10 nodes");
  }
  if (instance.node_count() < instance.params.min_committee_size()) {
    throw InfeasibleError("infeasible: N_c < 3f+1");
  }
  return Enumerator(instance, committee_range(instance, limits)).run();
}

}  // namespace topcco::cco
