// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "topcco/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "topcco/errors.hpp"

namespace topcco::topology {

namespace {

Micros ticks(double ms) { return std::max(Micros{1}, from_ms(ms)); }

class DelaySource {
 public:
  DelaySource(const Kind& kind, std::size_t n, std::mt19937_64& rng)
      : kind_(kind), rng_(rng) {
    if (const auto* c = std::get_if<Clustered>(&kind_)) {
      cluster_ = clusters(n, c->k);
    }
  }

  // One-way delay between consensus nodes.
  Micros between(NodeId i, NodeId j) {
    return draw(cluster_.empty() ? 0 : cluster_[i],
                cluster_.empty() ? 0 : cluster_[j]);
  }

  // Between node i and the verification committee (cluster 0).
  Micros verification(NodeId i) {
    return draw(cluster_.empty() ? 0 : cluster_[i], 0);
  }

  Micros internal() { return draw(0, 0); }

 private:
  Micros draw(std::size_t a, std::size_t b) {
    if (const auto* u = std::get_if<Uniform>(&kind_)) {
      return ticks(std::uniform_real_distribution<double>(u->lo_ms, u->hi_ms)(rng_));
    }
    if (const auto* c = std::get_if<Clustered>(&kind_)) {
      const double base = a == b ? c->intra_ms : c->inter_ms;
      std::uniform_real_distribution<double> jitter(1.0 - c->jitter,
                                                    1.0 + c->jitter);
      return ticks(base * jitter(rng_));
    }
    const auto& l = std::get<LogNormal>(kind_);
    return ticks(std::lognormal_distribution<double>(l.mu, l.sigma)(rng_));
  }

  const Kind& kind_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> cluster_;
};

void check(const Spec& spec) {
  if (spec.n < 3 * std::size_t{spec.f} + 1) {
    throw ContractViolation("n < 3f+1 (n=" + std::to_string(spec.n) +
                            ", f=" + std::to_string(spec.f) + ")");
  }
  if (spec.f == 0) throw ContractViolation("f must be positive");
  if (spec.verification_members == 0) {
    throw ContractViolation("verification committee needs a member");
  }
  const auto& p = spec.profiles;
  if (p.tee_failed_fraction < 0.0 || p.tee_failed_fraction > 1.0) {
    throw ContractViolation("tee failure fraction must lie in [0, 1]");
  }
  if (const auto* u = std::get_if<Uniform>(&spec.kind)) {
    if (!(u->lo_ms > 0.0 && u->lo_ms <= u->hi_ms)) {
      throw ContractViolation("uniform delays need 0 < lo <= hi");
    }
  } else if (const auto* c = std::get_if<Clustered>(&spec.kind)) {
    if (c->k == 0 || c->k > spec.n) {
      throw ContractViolation("cluster count must lie in [1, n]");
    }
    if (!(c->intra_ms > 0.0 && c->inter_ms > 0.0) || c->jitter < 0.0 ||
        c->jitter >= 1.0) {
      throw ContractViolation("cluster delays must be positive, jitter in [0, 1)");
    }
  } else if (std::get<LogNormal>(spec.kind).sigma < 0.0) {
    throw ContractViolation("lognormal sigma must be non-negative");
  }
}

}  // namespace

std::vector<std::size_t> clusters(std::size_t n, std::size_t k) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i * k / n;
  return out;
}

Instance generate(const Spec& spec) {
  check(spec);
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n;
  Instance inst;
  inst.params.f = spec.f;
  inst.params.max_leader_byzantine = spec.profiles.leader_byzantine;
  inst.params.max_leader_crash = spec.profiles.leader_crash;

  std::uniform_real_distribution<double> b(0.0, spec.profiles.max_byzantine);
  std::uniform_real_distribution<double> c(0.0, spec.profiles.max_crash);
  inst.nodes.resize(n);
  for (auto& node : inst.nodes) {
    node.byzantine_rate = b(rng);
    node.crash_rate = c(rng);
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto failed = static_cast<std::size_t>(
      std::llround(spec.profiles.tee_failed_fraction * static_cast<double>(n)));
  for (std::size_t k = 0; k < failed; ++k) inst.nodes[order[k]].tee_failed = true;

  DelaySource source(spec.kind, n, rng);
  inst.delays.d.assign(n, std::vector<Micros>(n, Micros{0}));
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j) inst.delays.d[i][j] = source.between(i, j);
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    inst.delays.to_verification.push_back(source.verification(i));
    inst.delays.from_verification.push_back(source.verification(i));
  }
  const std::size_t m = spec.verification_members;
  auto& vc = inst.verification;
  vc.member_count = m;
  vc.leader_index = 0;
  vc.internal_rtts.assign(m, std::vector<Micros>(m, Micros{0}));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t z = 0; z < m; ++z) {
      if (a != z) vc.internal_rtts[a][z] = source.internal();
    }
  }
  return inst;
}

}  // namespace topcco::topology
