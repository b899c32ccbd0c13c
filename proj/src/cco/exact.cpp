// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Exact committee-configuration search.
//
// The objective is 4 * M + max_{leaders} d_iv + max_{leaders} d_vi + t_ver,
// where M is the largest active leader<->follower rtt. Once the leader set L
// is fixed, the two verification terms are fixed too, and M is the smallest
// rtt threshold under which every follower can be placed so that each
// committee still has its required number of "near" followers. That is a
// bounded bipartite flow question (see threshold.cpp), monotone in the
// threshold, so it is answered by binary search over the distinct rtt values.
//
// The outer branch-and-bound enumerates leader sets, largest committee count
// first, and prunes any L whose bound
//     base(L) + 4 * max_i (a_i-th smallest rtt from i)
// cannot strictly beat the incumbent. Ties keep the first incumbent found,
// which makes larger p and lexicographically smaller leader sets win.

#include <algorithm>
#include <chrono>
#include <limits>

#include "threshold.hpp"
#include "topcco/cco.hpp"

namespace topcco::cco {

namespace {

using Clock = std::chrono::steady_clock;

// a-th smallest rtt from i to any other node (1-based a).
Micros kth_nearest(const Instance& instance, NodeId i, std::size_t a) {
  std::vector<Micros> r;
  for (NodeId j = 0; j < instance.node_count(); ++j) {
    if (j != i) r.push_back(rtt(instance.delays, i, j));
  }
  if (a == 0 || a > r.size()) return Micros::max();
  std::nth_element(r.begin(), r.begin() + (a - 1), r.end());
  return r[a - 1];
}

// Advances `combo` to the next k-subset of [0, n) in lexicographic order.
bool next_combination(std::vector<std::size_t>& combo, std::size_t n) {
  const std::size_t k = combo.size();
  for (std::size_t pos = k; pos-- > 0;) {
    if (combo[pos] < n - k + pos) {
      ++combo[pos];
      for (std::size_t q = pos + 1; q < k; ++q) combo[q] = combo[q - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

Solution solve_exact(const Instance& instance, const SolveLimits& limits) {
  const std::size_t n = instance.node_count();
  const std::size_t f = instance.params.f;
  if (n > limits.node_cap_exact) {
    throw RefusedError("solve_exact: N_c exceeds node_cap_exact");
  }
  if (n < instance.params.min_committee_size()) {
    throw InfeasibleError("infeasible: N_c < 3f+1");
  }
  const auto eligible = eligible_leaders(instance);
  if (eligible.empty()) {
    throw InfeasibleError("infeasible: no eligible leader");
  }
  const auto range = committee_range(instance, limits);
  const std::size_t p_hi = std::min(range.hi, eligible.size());
  if (p_hi < range.lo) {
    throw InfeasibleError("infeasible: committee-count window is empty");
  }

  std::vector<Micros> thresholds;
  for (NodeId i : eligible) {
    for (NodeId j = 0; j < n; ++j) {
      if (j != i) thresholds.push_back(rtt(instance.delays, i, j));
    }
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  std::vector<Micros> own_bound(n);
  for (NodeId i : eligible) {
    own_bound[i] =
        kth_nearest(instance, i, (instance.nodes[i].tee_failed ? 3 : 2) * f);
  }
  const Micros t_ver = 4 * instance.verification.max_leader_rtt();

  // Global lower bound, used for the gap annotation.
  Micros global_lb = Micros::max();
  {
    Micros min_to = Micros::max(), min_from = Micros::max();
    Micros min_own = Micros::max();
    for (NodeId i : eligible) {
      min_to = std::min(min_to, instance.delays.to_verification[i]);
      min_from = std::min(min_from, instance.delays.from_verification[i]);
      min_own = std::min(min_own, own_bound[i]);
    }
    if (min_own != Micros::max()) {
      global_lb = t_ver + min_to + min_from + 4 * min_own;
    }
  }

  const auto start = Clock::now();
  const auto budget = std::chrono::duration<double>(limits.time_budget_seconds);
  Micros best = Micros::max();
  std::vector<NodeId> best_membership;
  bool timed_out = false;

  for (std::size_t p = p_hi; p >= range.lo && p >= 1 && !timed_out; --p) {
    std::vector<std::size_t> combo(p);
    for (std::size_t k = 0; k < p; ++k) combo[k] = k;
    do {
      if (Clock::now() - start > budget) {
        timed_out = true;
        break;
      }
      std::vector<NodeId> leaders(p);
      Micros to_v{0}, from_v{0}, lb_link{0};
      for (std::size_t k = 0; k < p; ++k) {
        const NodeId i = eligible[combo[k]];
        leaders[k] = i;
        to_v = std::max(to_v, instance.delays.to_verification[i]);
        from_v = std::max(from_v, instance.delays.from_verification[i]);
        lb_link = std::max(lb_link, own_bound[i]);
      }
      if (lb_link == Micros::max()) continue;
      const Micros base = to_v + from_v + t_ver;
      if (best != Micros::max() && base + 4 * lb_link >= best) continue;

      // Candidate thresholds strictly better than the incumbent.
      auto lo = std::lower_bound(thresholds.begin(), thresholds.end(), lb_link);
      auto hi = thresholds.end();
      if (best != Micros::max()) {
        hi = std::partition_point(lo, thresholds.end(), [&](Micros tau) {
          return base + 4 * tau < best;
        });
      }
      if (lo == hi) continue;
      auto top = detail::assign_within(instance, leaders, *(hi - 1));
      if (!top) continue;
      // Smallest feasible threshold in [lo, hi); `membership` always holds
      // the assignment found at `right`.
      std::vector<NodeId> membership = std::move(*top);
      auto left = lo, right = hi - 1;
      while (left < right) {
        auto mid = left + (right - left) / 2;
        if (auto found = detail::assign_within(instance, leaders, *mid)) {
          membership = std::move(*found);
          right = mid;
        } else {
          left = mid + 1;
        }
      }
      best = base + 4 * (*left);
      best_membership = std::move(membership);
    } while (next_combination(combo, eligible.size()));
    if (p == 1) break;
  }

  if (best_membership.empty()) {
    if (timed_out) throw TimeoutError("solve_exact: budget exhausted, no incumbent");
    throw InfeasibleError("infeasible: no feasible partition");
  }
  if (timed_out && limits.optimality_required) {
    throw TimeoutError("solve_exact: budget exhausted before optimality proof");
  }

  Solution out;
  out.config = complete(instance, std::move(best_membership));
  out.latency = evaluate(instance, out.config);
  out.optimal = !timed_out;
  if (timed_out && out.latency.t_tr > Micros{0} && global_lb != Micros::max()) {
    out.gap = std::max(0.0, static_cast<double>((out.latency.t_tr - global_lb).count()) /
                                static_cast<double>(out.latency.t_tr.count()));
  }
  return out;
}

}  // namespace topcco::cco
