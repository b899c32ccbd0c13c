// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "topcco/cco.hpp"
#include "topcco/model.hpp"
#include "topcco/protocol.hpp"

namespace topcco::sim {

// Independent per-run seed for sweeps.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

enum class EventKind : std::uint8_t {
  Deliver,
  ClientSubmit,
  FaultInject,
  RecoverTee,
  OpenEpoch,
  Deadline,
};

// Scheduled event; ordered by (time, tiebreak).
struct Event {
  Micros time{0};
  std::uint64_t tiebreak = 0;
  EventKind kind = EventKind::Deliver;
  protocol::Address to;
  protocol::ProtocolMessage msg;
  std::size_t index = 0;  // request id, fault id or epoch id
};

struct Workload {
  enum class Arrival : std::uint8_t { ClosedLoop, Poisson };
  enum class Target : std::uint8_t { RoundRobin, Pinned };

  std::size_t total_requests = 1;
  Arrival arrival = Arrival::ClosedLoop;
  double rate_per_second = 1000.0;  // Poisson only
  std::uint64_t payload_bytes = 0;
  Target target = Target::RoundRobin;
  NodeId pinned_leader = 0;
  Micros client_delay{0};
};

struct FaultPlan {
  std::set<NodeId> slow_nodes;
  double slow_multiplier = 1.0;
  std::map<NodeId, Micros> crashes;
  std::map<NodeId, Micros> tee_failures;
  std::map<NodeId, Micros> tee_recoveries;
  // Leaders that send a conflicting pre-prepare for their latest sequence.
  std::map<NodeId, Micros> equivocations;

  std::set<NodeId> faulty() const;
};

// Throws ContractViolation when ids are out of range or more than 30% of the
// nodes are faulty.
void validate_faults(const FaultPlan& faults, std::size_t node_count);

// Each node crashes with probability c_i at a uniform time in [0, horizon)
// and equivocates (if it leads a committee) with probability b_i. Stops adding
// faults at the 30% cap.
FaultPlan sample_faults(const Instance& instance, const cco::Configuration& config,
                        Micros horizon, std::uint64_t seed);

struct SimOptions {
  double bandwidth_bits_per_second = 1e9;
  // Entries per verification block; zero means unbounded.
  std::size_t block_capacity = 0;
  // Re-run the optimizer at the next epoch boundary after a TEE failure or
  // recovery.
  bool adaptive = false;
  // A TEE failure switches every committee to fallback.
  bool global_fallback = false;
  // Zero: ten times the analytic epoch length.
  Micros stall_timeout{0};
  bool record_trace = false;
  cco::SolveLimits limits;
};

struct TxRecord {
  std::size_t id = 0;
  NodeId committee = 0;
  Micros submit{0};  // client send time
  Micros start{0};   // arrival at the leader
  Micros commit{0};  // reply leaves the leader
  cco::LatencyBreakdown phases;
  bool committed = false;
  bool stalled = false;

  Micros latency() const { return commit - start; }
};

struct FaultRecord {
  Micros at{0};
  std::string kind;
  std::string node;
  std::uint64_t sequence = 0;
  std::string detail;
};

struct TraceRecord {
  Micros t{0};
  std::string from;
  std::string to;
  std::string kind;
  NodeId committee = 0;
  std::uint64_t sequence = 0;
};

struct SafetyAudit {
  std::size_t rebinds = 0;                 // one (committee, seq), two digests
  std::size_t accepted_equivocations = 0;  // committed digest differs from request
  std::size_t counter_gaps = 0;            // attested values not 1..n
  std::size_t block_mismatches = 0;        // verification members disagree

  bool clean() const {
    return rebinds == 0 && accepted_equivocations == 0 && counter_gaps == 0 &&
           block_mismatches == 0;
  }
};

struct SimReport {
  std::vector<TxRecord> transactions;  // every request, by id
  double throughput = 0.0;             // committed ops per simulated second
  Micros wall_time{0};
  cco::LatencyBreakdown phase_mean;
  std::size_t committed = 0;
  std::size_t stalled = 0;
  std::size_t in_flight = 0;
  std::size_t blocks = 0;
  std::size_t reconfigurations = 0;
  std::vector<FaultRecord> fault_log;
  std::vector<TraceRecord> trace;
  SafetyAudit safety;

  // Phase 2-5 latency of each committed transaction.
  std::vector<Micros> per_tx_latency() const;
};

// Executes the protocol over the instance's delays. Throws
// cco::InfeasibleConfiguration when `config` is infeasible for the instance.
SimReport run(const Instance& instance, const cco::Configuration& config,
              const Workload& workload, const FaultPlan& faults,
              std::uint64_t seed, const SimOptions& options = {});

// ---------------------------------------------------------------------------

struct ComparisonRow {
  std::string name;
  std::size_t runs = 0;
  double mean_latency_ms = 0.0;
  double median_latency_ms = 0.0;
  double p99_latency_ms = 0.0;
  double throughput = 0.0;  // mean over runs
  std::size_t stalled = 0;
  // Relative to the first row; positive is better.
  double latency_improvement_pct = 0.0;
  double throughput_improvement_pct = 0.0;
};

using NamedConfig = std::pair<std::string, cco::Configuration>;

// Runs every configuration under the same derived seeds.
std::vector<ComparisonRow> compare(const Instance& instance,
                                   const std::vector<NamedConfig>& configs,
                                   const Workload& workload,
                                   const FaultPlan& faults, std::uint64_t seed,
                                   std::size_t repetitions,
                                   const SimOptions& options = {});

// Random feasible partition into floor(N_c/(3f+1)) committees with random
// eligible leaders and random active links. With `fallback_all` every
// committee runs classical mode with all followers active.
cco::Configuration random_configuration(const Instance& instance,
                                        std::uint64_t seed, bool fallback_all);

// Single-committee reference models over all N_c nodes.
struct BaselineOptions {
  Micros per_message_cost{20};
  // The leader broadcasts the payload to every other node once per request.
  std::uint64_t payload_bytes = 0;
  double bandwidth_bits_per_second = 1e9;
};

struct Baseline {
  std::string name;
  Micros latency{0};
  double throughput = 0.0;
};

// "hotstuff": three leader phases, quorum 2f+1 of n = 3f+1.
// "fastbft": two leader phases, quorum f+1 of n = 2f+1 (TEE-assisted).
std::vector<Baseline> analytic_baselines(const Instance& instance,
                                         const BaselineOptions& options = {});

// ---------------------------------------------------------------------------

void write_csv(std::ostream& out, const SimReport& report);
nlohmann::json summary_json(const SimReport& report);
void write_trace(std::ostream& out, const SimReport& report);

}  // namespace topcco::sim
