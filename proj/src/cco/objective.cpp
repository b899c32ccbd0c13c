// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <numeric>
#include <sstream>

#include "topcco/cco.hpp"

namespace topcco::cco {

std::vector<NodeId> Configuration::leaders() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < leader_of.size(); ++i) {
    if (leader_of[i] == i) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> Configuration::members_of(NodeId leader) const {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < leader_of.size(); ++j) {
    if (j != leader && leader_of[j] == leader) out.push_back(j);
  }
  return out;
}

std::vector<NodeId> Configuration::active_of(NodeId leader) const {
  std::vector<NodeId> out;
  for (auto it = active_links.lower_bound(Link{leader, 0});
       it != active_links.end() && it->leader == leader; ++it) {
    out.push_back(it->follower);
  }
  return out;
}

Configuration from_membership(std::vector<NodeId> leader_of) {
  Configuration config;
  config.sigma.assign(leader_of.size(), 0);
  for (NodeId i = 0; i < leader_of.size(); ++i) {
    if (leader_of[i] == i) ++config.committee_count;
  }
  config.leader_of = std::move(leader_of);
  return config;
}

const char* to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::CommitteeCount: return "CommitteeCount";
    case ConstraintId::LeaderScope: return "LeaderScope";
    case ConstraintId::UniqueMembership: return "UniqueMembership";
    case ConstraintId::CommitteeSize: return "CommitteeSize";
    case ConstraintId::LeaderByzantine: return "LeaderByzantine";
    case ConstraintId::LeaderCrash: return "LeaderCrash";
    case ConstraintId::LinkScope: return "LinkScope";
    case ConstraintId::SigmaConsistency: return "SigmaConsistency";
    case ConstraintId::ConnectionCount: return "ConnectionCount";
  }
  return "?";
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << "infeasible configuration:";
  for (const auto& v : violations) {
    out << ' ' << to_string(v.constraint) << "(" << v.subject << ")";
  }
  return out.str();
}

}  // namespace

InfeasibleConfiguration::InfeasibleConfiguration(
    std::vector<Violation> violations)
    : InfeasibleError(describe(violations)),
      violations_(std::move(violations)) {}

CommitteeRange committee_range(const Instance& instance,
                               const SolveLimits& limits) {
  CommitteeRange range;
  range.hi = instance.max_committees();
  if (limits.max_committees != 0) {
    range.hi = std::min(range.hi, limits.max_committees);
  }
  range.lo = std::max<std::size_t>(1, limits.min_committees);
  return range;
}

std::vector<NodeId> eligible_leaders(const Instance& instance) {
  std::vector<NodeId> out;
  const auto& params = instance.params;
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    const auto& node = instance.nodes[i];
    if (node.byzantine_rate <= params.max_leader_byzantine &&
        node.crash_rate <= params.max_leader_crash) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<Violation> check_constraints(const Instance& instance,
                                         const Configuration& config) {
  std::vector<Violation> out;
  const std::size_t n = instance.node_count();
  const std::size_t f = instance.params.f;

  if (config.leader_of.size() != n) {
    out.push_back({ConstraintId::UniqueMembership, 0, std::nullopt,
                   "membership map does not cover every node"});
    return out;
  }
  for (NodeId j = 0; j < n; ++j) {
    if (config.leader_of[j] >= n) {
      out.push_back({ConstraintId::UniqueMembership, j, std::nullopt,
                     "node has no valid committee"});
    }
  }
  if (!out.empty()) return out;

  std::vector<bool> is_leader(n, false);
  std::size_t leader_count = 0;
  for (NodeId i = 0; i < n; ++i) {
    if (config.leader_of[i] == i) {
      is_leader[i] = true;
      ++leader_count;
    }
  }
  if (leader_count != config.committee_count) {
    out.push_back({ConstraintId::CommitteeCount, 0, std::nullopt,
                   "p does not match the number of leaders"});
  }

  std::vector<std::size_t> size(n, 0);
  std::vector<bool> tee_hit(n, false);
  for (NodeId j = 0; j < n; ++j) {
    const NodeId i = config.leader_of[j];
    if (!is_leader[i]) {
      out.push_back({ConstraintId::LeaderScope, i, j,
                     "node follows a non-leader"});
      continue;
    }
    ++size[i];
    if (instance.nodes[j].tee_failed) tee_hit[i] = true;
  }

  const auto& params = instance.params;
  std::vector<std::size_t> links(n, 0);
  for (const auto& link : config.active_links) {
    if (link.leader >= n || link.follower >= n || link.leader == link.follower ||
        config.leader_of[link.follower] != link.leader ||
        !is_leader[link.leader]) {
      out.push_back({ConstraintId::LinkScope, link.leader, link.follower,
                     "link outside the leader's committee"});
      continue;
    }
    ++links[link.leader];
  }

  const bool sigma_sized = config.sigma.size() == n;
  if (!sigma_sized) {
    out.push_back({ConstraintId::SigmaConsistency, 0, std::nullopt,
                   "sigma map does not cover every node"});
  }
  for (NodeId i = 0; i < n; ++i) {
    const std::uint8_t sigma = sigma_sized ? config.sigma[i] : 0;
    if (!is_leader[i]) {
      if (sigma != 0) {
        out.push_back({ConstraintId::SigmaConsistency, i, std::nullopt,
                       "sigma set on a non-leader"});
      }
      continue;
    }
    if (size[i] < params.min_committee_size()) {
      out.push_back({ConstraintId::CommitteeSize, i, std::nullopt,
                     "committee smaller than 3f+1"});
    }
    if (instance.nodes[i].byzantine_rate > params.max_leader_byzantine) {
      out.push_back({ConstraintId::LeaderByzantine, i, std::nullopt,
                     "leader byzantine rate above B"});
    }
    if (instance.nodes[i].crash_rate > params.max_leader_crash) {
      out.push_back({ConstraintId::LeaderCrash, i, std::nullopt,
                     "leader crash rate above C"});
    }
    if (tee_hit[i] && sigma == 0) {
      out.push_back({ConstraintId::SigmaConsistency, i, std::nullopt,
                     "committee contains a failed TEE but sigma = 0"});
    }
    if (links[i] < (2 + std::size_t{sigma != 0}) * f) {
      out.push_back({ConstraintId::ConnectionCount, i, std::nullopt,
                     "too few active links"});
    }
  }
  return out;
}

LatencyBreakdown evaluate_unchecked(const Instance& instance,
                                    const Configuration& config) {
  LatencyBreakdown out;
  Micros worst_link{0};
  for (const auto& link : config.active_links) {
    worst_link = std::max(worst_link,
                          rtt(instance.delays, link.leader, link.follower));
  }
  out.t_pre = 2 * worst_link;
  out.t_com = 2 * worst_link;
  for (NodeId i = 0; i < config.leader_of.size(); ++i) {
    if (config.leader_of[i] != i) continue;
    out.t_cv = std::max(out.t_cv, instance.delays.to_verification[i]);
    out.t_vc = std::max(out.t_vc, instance.delays.from_verification[i]);
  }
  out.t_ver = 4 * instance.verification.max_leader_rtt();
  out.t_tr = out.t_pre + out.t_cv + out.t_ver + out.t_vc + out.t_com;
  return out;
}

LatencyBreakdown evaluate(const Instance& instance,
                          const Configuration& config) {
  auto violations = check_constraints(instance, config);
  if (!violations.empty()) {
    throw InfeasibleConfiguration(std::move(violations));
  }
  return evaluate_unchecked(instance, config);
}

std::vector<std::uint8_t> derive_sigma(const Instance& instance,
                                       const std::vector<NodeId>& leader_of) {
  std::vector<std::uint8_t> sigma(leader_of.size(), 0);
  for (NodeId j = 0; j < leader_of.size(); ++j) {
    if (instance.nodes[j].tee_failed) sigma[leader_of[j]] = 1;
  }
  return sigma;
}

std::set<Link> optimal_links(const Instance& instance,
                             const std::vector<NodeId>& leader_of,
                             const std::vector<std::uint8_t>& sigma) {
  const std::size_t n = leader_of.size();
  const std::size_t f = instance.params.f;
  std::vector<std::vector<NodeId>> followers(n);
  for (NodeId j = 0; j < n; ++j) {
    if (leader_of[j] != j) followers[leader_of[j]].push_back(j);
  }
  std::set<Link> links;
  for (NodeId i = 0; i < n; ++i) {
    if (leader_of[i] != i) continue;
    const std::size_t need = (2 + std::size_t{sigma[i] != 0}) * f;
    auto& fs = followers[i];
    if (fs.size() < need) {
      std::ostringstream msg;
      msg << "committee " << i << " has " << fs.size()
          << " followers, needs " << need << " active";
      throw InfeasibleError(msg.str());
    }
    std::stable_sort(fs.begin(), fs.end(), [&](NodeId a, NodeId b) {
      return rtt(instance.delays, i, a) < rtt(instance.delays, i, b);
    });
    for (std::size_t k = 0; k < need; ++k) links.insert({i, fs[k]});
  }
  return links;
}

Configuration complete(const Instance& instance, std::vector<NodeId> leader_of) {
  Configuration config = from_membership(std::move(leader_of));
  config.sigma = derive_sigma(instance, config.leader_of);
  config.active_links = optimal_links(instance, config.leader_of, config.sigma);
  return config;
}

}  // namespace topcco::cco
