// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topcco/errors.hpp"
#include "topcco/model.hpp"

namespace topcco::cco {

// Active leader -> follower connection (y_ij = 1).
struct Link {
  NodeId leader;
  NodeId follower;
  auto operator<=>(const Link&) const = default;
};

// Full committee configuration. `leader_of[j]` is j's committee leader and
// leaders map to themselves; `sigma` is indexed by node and is zero for
// non-leaders.
struct Configuration {
  std::vector<NodeId> leader_of;
  std::set<Link> active_links;
  std::vector<std::uint8_t> sigma;
  std::size_t committee_count = 0;

  // Leaders in ascending id order.
  std::vector<NodeId> leaders() const;
  // Followers of `leader`, ascending.
  std::vector<NodeId> members_of(NodeId leader) const;
  // Followers of `leader` with an active link, ascending.
  std::vector<NodeId> active_of(NodeId leader) const;

  bool operator==(const Configuration&) const = default;
};

// Builds a configuration from leader_of alone: p is counted, sigma and links
// are left empty.
Configuration from_membership(std::vector<NodeId> leader_of);

struct LatencyBreakdown {
  Micros t_pre{0};
  Micros t_cv{0};
  Micros t_ver{0};
  Micros t_vc{0};
  Micros t_com{0};
  Micros t_tr{0};

  bool operator==(const LatencyBreakdown&) const = default;
};

enum class ConstraintId {
  CommitteeCount,    // sum x_ii = p
  LeaderScope,       // x_ij <= x_ii
  UniqueMembership,  // sum_i x_ij = 1
  CommitteeSize,     // committee has >= 3f+1 nodes
  LeaderByzantine,   // x_ii b_i <= B
  LeaderCrash,       // x_ii c_i <= C
  LinkScope,         // y_ij <= x_ij
  SigmaConsistency,  // TEE failure in committee forces sigma_i = 1
  ConnectionCount,   // sum_j y_ij >= (2 + sigma_i) f
};

const char* to_string(ConstraintId id);

struct Violation {
  ConstraintId constraint;
  NodeId subject = 0;
  std::optional<NodeId> other;
  std::string detail;
};

class InfeasibleConfiguration : public InfeasibleError {
 public:
  explicit InfeasibleConfiguration(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct SolveLimits {
  double time_budget_seconds = 60.0;
  std::size_t node_cap_exact = 16;
  bool optimality_required = false;
  // Committee-count window; zero means unconstrained on that side
  // (1 and floor(N_c/(3f+1)) respectively).
  std::size_t min_committees = 0;
  std::size_t max_committees = 0;
  // Heuristic knobs, used when a caller falls back to solve_heuristic.
  std::uint64_t seed = 1;
  std::size_t iteration_budget = 20000;
};

struct Solution {
  Configuration config;
  LatencyBreakdown latency;
  bool optimal = false;
  // Relative gap (incumbent - bound) / incumbent; 0 when proven optimal.
  double gap = 0.0;
};

// Inclusive committee-count window after applying limits and instance size.
struct CommitteeRange {
  std::size_t lo = 1;
  std::size_t hi = 0;
};
CommitteeRange committee_range(const Instance& instance,
                               const SolveLimits& limits);

// Objective terms as the tight maxima of their lower-bound families. Throws
// InfeasibleConfiguration when check_constraints reports anything.
LatencyBreakdown evaluate(const Instance& instance, const Configuration& config);

// Same value as evaluate() but skips the feasibility check; for solvers that
// build configurations which are feasible by construction.
LatencyBreakdown evaluate_unchecked(const Instance& instance,
                                    const Configuration& config);

std::vector<Violation> check_constraints(const Instance& instance,
                                         const Configuration& config);

// Minimal sigma satisfying the TEE-consistency constraint.
std::vector<std::uint8_t> derive_sigma(const Instance& instance,
                                       const std::vector<NodeId>& leader_of);

// Per committee, the (2+sigma_i) f followers with the smallest rtt to the
// leader (ties: lower id). Throws InfeasibleError if a committee is short.
std::set<Link> optimal_links(const Instance& instance,
                             const std::vector<NodeId>& leader_of,
                             const std::vector<std::uint8_t>& sigma);

// Membership -> complete configuration via derive_sigma and optimal_links.
Configuration complete(const Instance& instance, std::vector<NodeId> leader_of);

// { i : b_i <= B and c_i <= C }, ascending.
std::vector<NodeId> eligible_leaders(const Instance& instance);

Solution solve_exact(const Instance& instance, const SolveLimits& limits = {});

Solution solve_heuristic(const Instance& instance, std::uint64_t seed,
                         std::size_t iteration_budget,
                         const SolveLimits& limits = {});

// Exhaustive enumeration of partitions, leaders, sigma and link subsets.
// Refuses instances with more than 10 nodes.
Solution brute_force(const Instance& instance, const SolveLimits& limits = {});

struct FallbackOptions {
  bool allow_repartition = true;
};

// Marks `failed_tees` as TEE-failed and re-optimizes. The returned solution's
// instance view is `with_tee_failures(instance, failed_tees)`.
Solution reoptimize_fallback(const Instance& instance,
                             const std::set<NodeId>& failed_tees,
                             const Configuration& previous,
                             const SolveLimits& limits = {},
                             const FallbackOptions& options = {});

Instance with_tee_failures(const Instance& instance,
                           const std::set<NodeId>& failed_tees);

// Solve with the exact method when N_c fits under the cap, else heuristic.
Solution solve_auto(const Instance& instance, const SolveLimits& limits = {});

}  // namespace topcco::cco
