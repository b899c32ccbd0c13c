// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace topcco {

// Consensus nodes are indexed densely 0..N_c-1. Verification-committee
// members live in their own index space and use plain `std::size_t`.
using NodeId = std::uint32_t;

// All latency arithmetic is done in integer microsecond ticks so analytic and
// simulated values compare exactly.
using Micros = std::chrono::microseconds;

Micros from_ms(double ms);
double to_ms(Micros t);

struct NodeProfile {
  double byzantine_rate = 0.0;  // b_i
  double crash_rate = 0.0;      // c_i
  bool tee_failed = false;      // t_i
};

// One-way delays. `d[i][j]` is i -> j; the diagonal is zero.
struct DelayMatrix {
  std::vector<std::vector<Micros>> d;
  std::vector<Micros> to_verification;    // d_iv, node -> verification leader
  std::vector<Micros> from_verification;  // d_vi, verification leader -> node

  std::size_t size() const { return d.size(); }
  Micros operator()(NodeId i, NodeId j) const { return d[i][j]; }
};

// Fixed input: the verification committee is not part of the optimization.
struct VerificationCommittee {
  std::size_t member_count = 1;
  std::size_t leader_index = 0;
  // rtts[a][b]: one-way delay from member a to member b.
  std::vector<std::vector<Micros>> internal_rtts;

  // Largest f_v with member_count >= 3 f_v + 1.
  std::size_t tolerance() const { return (member_count - 1) / 3; }
  // Signers needed on a verification multi-signature.
  std::size_t quorum() const { return 2 * tolerance() + 1; }
  // max over members m != leader of (rtts[l][m] + rtts[m][l]).
  Micros max_leader_rtt() const;
};

struct SystemParams {
  std::uint32_t f = 1;
  double max_leader_byzantine = 1.0;  // B
  double max_leader_crash = 1.0;      // C

  std::size_t min_committee_size() const { return 3 * std::size_t{f} + 1; }
};

struct Instance {
  std::vector<NodeProfile> nodes;
  DelayMatrix delays;
  VerificationCommittee verification;
  SystemParams params;

  std::size_t node_count() const { return nodes.size(); }
  // floor(N_c / (3f+1)); zero when the instance is too small.
  std::size_t max_committees() const {
    return node_count() / params.min_committee_size();
  }
};

struct ValidationIssue {
  std::string what;
};

// Returns every structural problem found; empty means the instance is usable.
std::vector<ValidationIssue> validate_instance(const Instance& instance);

// d_ij + d_ji. Throws ContractViolation when i == j.
Micros rtt(const DelayMatrix& delays, NodeId i, NodeId j);

// Multiplies every delay (consensus, node<->verification, verification
// internal) by `factor`, rounding to the nearest tick.
Instance scaled(const Instance& instance, double factor);

}  // namespace topcco
