// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Synthetic instance generators.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "topcco/model.hpp"

namespace topcco::topology {

struct Uniform {
  double lo_ms = 1.0;
  double hi_ms = 50.0;
};

// `k` contiguous clusters; delays are intra/inter with multiplicative jitter.
// The verification committee sits in cluster 0.
struct Clustered {
  std::size_t k = 5;
  double intra_ms = 0.1;
  double inter_ms = 5.0;
  double jitter = 0.1;
};

// One-way delay exp(N(mu, sigma)) milliseconds.
struct LogNormal {
  double mu = 1.5;
  double sigma = 0.5;
};

using Kind = std::variant<Uniform, Clustered, LogNormal>;

struct Profiles {
  double max_byzantine = 0.1;  // b_i ~ U(0, max_byzantine)
  double max_crash = 0.1;      // c_i ~ U(0, max_crash)
  double leader_byzantine = 0.08;  // B
  double leader_crash = 0.08;      // C
  double tee_failed_fraction = 0.0;
};

struct Spec {
  Kind kind = Clustered{};
  std::size_t n = 40;
  std::uint32_t f = 1;
  std::uint64_t seed = 1;
  Profiles profiles;
  std::size_t verification_members = 4;
};

// Throws ContractViolation when n < 3f+1 or a parameter is out of range.
Instance generate(const Spec& spec);

// Cluster index of every node under `Clustered` with `k` clusters.
std::vector<std::size_t> clusters(std::size_t n, std::size_t k);

}  // namespace topcco::topology
