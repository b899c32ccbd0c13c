// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "threshold.hpp"

#include "flow.hpp"

namespace topcco::cco::detail {

namespace {

std::optional<std::vector<NodeId>> assign_with_sigma(
    const Instance& instance, const std::vector<NodeId>& leaders,
    const std::vector<NodeId>& followers, const std::vector<bool>& sigma,
    Micros threshold) {
  const std::size_t f = instance.params.f;
  const std::size_t p = leaders.size();
  const std::size_t m = followers.size();
  // Vertex layout: 0 source, 1 sink, followers, near_i, total_i.
  const std::size_t first_follower = 2;
  const std::size_t first_near = first_follower + m;
  const std::size_t first_total = first_near + p;
  BoundedFlow flow(first_total + p);

  struct Choice {
    std::size_t handle;
    std::size_t follower;
    std::size_t leader;
  };
  std::vector<Choice> choices;
  for (std::size_t a = 0; a < m; ++a) {
    const NodeId j = followers[a];
    flow.add_edge(0, first_follower + a, 1, 1);
    for (std::size_t k = 0; k < p; ++k) {
      const NodeId i = leaders[k];
      if (instance.nodes[j].tee_failed && !sigma[k]) continue;
      if (rtt(instance.delays, i, j) <= threshold) {
        choices.push_back(
            {flow.add_edge(first_follower + a, first_near + k, 0, 1), a, k});
      }
      choices.push_back(
          {flow.add_edge(first_follower + a, first_total + k, 0, 1), a, k});
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    const auto need = static_cast<std::int64_t>((2 + (sigma[k] ? 1 : 0)) * f);
    flow.add_edge(first_near + k, first_total + k, need, BoundedFlow::kInfinite);
    flow.add_edge(first_total + k, 1, static_cast<std::int64_t>(3 * f),
                  BoundedFlow::kInfinite);
  }
  if (!flow.feasible(0, 1)) return std::nullopt;

  std::vector<NodeId> leader_of(instance.node_count());
  for (NodeId i : leaders) leader_of[i] = i;
  for (const auto& c : choices) {
    if (flow.flow_on(c.handle) > 0) {
      leader_of[followers[c.follower]] = leaders[c.leader];
    }
  }
  return leader_of;
}

}  // namespace

std::optional<std::vector<NodeId>> assign_within(
    const Instance& instance, const std::vector<NodeId>& leaders,
    Micros threshold) {
  const std::size_t n = instance.node_count();
  std::vector<bool> is_leader(n, false);
  for (NodeId i : leaders) is_leader[i] = true;
  std::vector<NodeId> followers;
  bool any_failed_follower = false;
  for (NodeId j = 0; j < n; ++j) {
    if (is_leader[j]) continue;
    followers.push_back(j);
    any_failed_follower = any_failed_follower || instance.nodes[j].tee_failed;
  }

  // Leaders with a failed TEE are forced to sigma = 1. The others only need
  // sigma = 1 when they host a failed follower, so enumerate which of them do.
  std::vector<std::size_t> free;
  std::vector<bool> sigma(leaders.size(), false);
  for (std::size_t k = 0; k < leaders.size(); ++k) {
    if (instance.nodes[leaders[k]].tee_failed) {
      sigma[k] = true;
    } else if (any_failed_follower) {
      free.push_back(k);
    }
  }
  const std::size_t patterns = std::size_t{1} << free.size();
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    for (std::size_t b = 0; b < free.size(); ++b) {
      sigma[free[b]] = ((mask >> b) & 1) != 0;
    }
    if (auto found =
            assign_with_sigma(instance, leaders, followers, sigma, threshold)) {
      return found;
    }
  }
  return std::nullopt;
}

}  // namespace topcco::cco::detail
