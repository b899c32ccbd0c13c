// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "topcco/cco.hpp"

namespace topcco::cco {

Instance with_tee_failures(const Instance& instance,
                           const std::set<NodeId>& failed_tees) {
  Instance out = instance;
  for (NodeId i : failed_tees) {
    if (i >= out.node_count()) {
      throw ContractViolation("with_tee_failures: node id out of range");
    }
    out.nodes[i].tee_failed = true;
  }
  return out;
}

Solution reoptimize_fallback(const Instance& instance,
                             const std::set<NodeId>& failed_tees,
                             const Configuration& previous,
                             const SolveLimits& limits,
                             const FallbackOptions& options) {
  const Instance degraded = with_tee_failures(instance, failed_tees);

  // Keeping the membership and only re-deriving sigma and links is always
  // feasible; it is the answer when re-partitioning is off and the floor the
  // adaptive answer must beat otherwise.
  Solution kept;
  kept.config = complete(degraded, previous.leader_of);
  kept.latency = evaluate(degraded, kept.config);
  if (!options.allow_repartition) return kept;

  SolveLimits solve_limits = limits;
  Solution fresh = solve_auto(degraded, solve_limits);
  if (kept.latency.t_tr < fresh.latency.t_tr) {
    kept.optimal = false;
    return kept;
  }
  return fresh;
}

}  // namespace topcco::cco
