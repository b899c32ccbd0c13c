// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Parameter sweeps over generated topologies.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "topcco/sim.hpp"
#include "topcco/topology.hpp"

namespace topcco::experiment {

struct Options {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  topology::Kind kind = topology::Clustered{};
  std::uint32_t f = 1;
  // Closed-loop requests per committee in every simulated run.
  std::size_t requests_per_committee = 4;
  std::uint64_t payload_bytes = 0;
  double tee_failed_fraction = 0.3;  // fallback_compare only
  sim::SimOptions sim;
  sim::BaselineOptions baseline;
  cco::SolveLimits limits;
  std::size_t threads = 1;
};

// One (configuration, axis value, seed) measurement. Analytic baselines fill
// the same columns from their closed form.
struct Cell {
  std::string config;
  double axis = 0.0;
  std::uint64_t seed = 0;
  double throughput = 0.0;
  double latency_ms = 0.0;
  std::size_t committees = 0;
  std::size_t committed = 0;
  std::size_t stalled = 0;
  std::string error;
};

// Mean over seeds of one (configuration, axis value).
struct Point {
  std::string config;
  double axis = 0.0;
  double throughput = 0.0;
  double latency_ms = 0.0;
  std::size_t samples = 0;
};

// Configurations: "cco", "random", "hotstuff", "fastbft"; axis = n.
std::vector<Cell> node_sweep(const std::vector<std::size_t>& node_counts,
                             const Options& options);

// Same configurations at fixed n; axis = payload bytes.
std::vector<Cell> payload_sweep(std::size_t n,
                                const std::vector<std::uint64_t>& payloads,
                                const Options& options);

// With `tee_failed_fraction` of nodes TEE-failed: "adaptive"
// (reoptimize_fallback of the healthy optimum) vs "fallback_all" (random,
// every committee classical); axis = n.
std::vector<Cell> fallback_compare(std::size_t n, const Options& options);

std::vector<Point> summarize(const std::vector<Cell>& cells);

void write_cells_csv(std::ostream& out, const std::vector<Cell>& cells);
void write_points_csv(std::ostream& out, const std::vector<Point>& points,
                      const std::string& axis_name);

// Runs `count` independent jobs on up to `threads` workers; job i writes only
// its own result slot.
template <typename Job>
void parallel_for(std::size_t count, std::size_t threads, Job job);

}  // namespace topcco::experiment

#include "topcco/detail/parallel.hpp"
