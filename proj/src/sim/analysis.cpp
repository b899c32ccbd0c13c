// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "topcco/errors.hpp"
#include "topcco/sim.hpp"

namespace topcco::sim {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return protocol::hash_combine({0x5eedULL, base, index}).value;
}

std::set<NodeId> FaultPlan::faulty() const {
  std::set<NodeId> out = slow_nodes;
  for (const auto* m : {&crashes, &tee_failures, &equivocations}) {
    for (const auto& [node, at] : *m) out.insert(node);
  }
  return out;
}

void validate_faults(const FaultPlan& faults, std::size_t node_count) {
  const auto faulty = faults.faulty();
  for (NodeId i : faulty) {
    if (i >= node_count) {
      throw ContractViolation("fault plan: node " + std::to_string(i) +
                              " out of range");
    }
  }
  for (const auto& [node, at] : faults.tee_recoveries) {
    if (node >= node_count) {
      throw ContractViolation("fault plan: node " + std::to_string(node) +
                              " out of range");
    }
  }
  if (faulty.size() * 10 > node_count * 3) {
    throw ContractViolation("fault plan: " + std::to_string(faulty.size()) +
                            " faulty nodes exceed 30% of " +
                            std::to_string(node_count));
  }
  if (faults.slow_multiplier < 1.0) {
    throw ContractViolation("fault plan: slow multiplier must be >= 1");
  }
}

FaultPlan sample_faults(const Instance& instance, const cco::Configuration& config,
                        Micros horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> when(
      0, std::max<std::int64_t>(0, horizon.count() - 1));
  const std::size_t cap = instance.node_count() * 3 / 10;
  FaultPlan plan;
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    if (plan.faulty().size() >= cap) break;
    if (unit(rng) < instance.nodes[i].crash_rate) {
      plan.crashes[i] = Micros{when(rng)};
    } else if (config.leader_of[i] == i &&
               unit(rng) < instance.nodes[i].byzantine_rate) {
      plan.equivocations[i] = Micros{when(rng)};
    }
  }
  return plan;
}

cco::Configuration random_configuration(const Instance& instance,
                                        std::uint64_t seed, bool fallback_all) {
  std::size_t p = instance.max_committees();
  if (p == 0) throw InfeasibleError("infeasible: N_c < 3f+1");
  auto eligible = cco::eligible_leaders(instance);
  if (eligible.empty()) throw InfeasibleError("infeasible: no eligible leader");
  p = std::min(p, eligible.size());

  std::mt19937_64 rng(seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  std::vector<NodeId> leaders(eligible.begin(), eligible.begin() + p);
  std::sort(leaders.begin(), leaders.end());

  const auto n = static_cast<NodeId>(instance.node_count());
  std::vector<NodeId> leader_of(n, n);
  for (NodeId l : leaders) leader_of[l] = l;
  std::vector<NodeId> rest;
  for (NodeId i = 0; i < n; ++i) {
    if (leader_of[i] == n) rest.push_back(i);
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  for (std::size_t k = 0; k < rest.size(); ++k) {
    leader_of[rest[k]] = leaders[k % p];
  }

  cco::Configuration config = cco::from_membership(leader_of);
  config.sigma = cco::derive_sigma(instance, leader_of);
  const std::uint32_t f = instance.params.f;
  for (NodeId l : leaders) {
    if (fallback_all) config.sigma[l] = 1;
    auto members = config.members_of(l);
    std::size_t need = members.size();
    if (!fallback_all) {
      need = (2 + std::size_t{config.sigma[l]}) * f;
      std::shuffle(members.begin(), members.end(), rng);
    }
    for (std::size_t k = 0; k < need; ++k) {
      config.active_links.insert({l, members[k]});
    }
  }
  return config;
}

std::vector<Baseline> analytic_baselines(const Instance& instance,
                                         const BaselineOptions& options) {
  const std::size_t n = instance.node_count();
  // Best leader for a quorum needing `q` replies from other nodes.
  auto quorum_rtt = [&](std::size_t q) {
    if (q == 0 || n < 2) return Micros{0};
    Micros best = Micros::max();
    for (NodeId l = 0; l < n; ++l) {
      std::vector<Micros> rtts;
      for (NodeId j = 0; j < n; ++j) {
        if (j != l) rtts.push_back(rtt(instance.delays, l, j));
      }
      std::nth_element(rtts.begin(), rtts.begin() + (q - 1), rtts.end());
      best = std::min(best, rtts[q - 1]);
    }
    return best;
  };
  auto make = [&](std::string name, std::size_t phases, std::size_t replies) {
    const auto count = static_cast<std::int64_t>(phases);
    const double broadcast_us =
        static_cast<double>(options.payload_bytes) * 8.0 /
        options.bandwidth_bits_per_second * 1e6 * static_cast<double>(n - 1);
    const Micros latency =
        count * quorum_rtt(replies) +
        count * static_cast<std::int64_t>(n) * options.per_message_cost +
        Micros{static_cast<std::int64_t>(std::llround(broadcast_us))};
    const double tput =
        latency > Micros{0} ? 1e6 / static_cast<double>(latency.count()) : 0.0;
    return Baseline{std::move(name), latency, tput};
  };
  const std::size_t f3 = n == 0 ? 0 : (n - 1) / 3;
  const std::size_t f2 = n == 0 ? 0 : (n - 1) / 2;
  return {make("hotstuff", 3, 2 * f3), make("fastbft", 2, f2)};
}

std::vector<ComparisonRow> compare(const Instance& instance,
                                   const std::vector<NamedConfig>& configs,
                                   const Workload& workload,
                                   const FaultPlan& faults, std::uint64_t seed,
                                   std::size_t repetitions,
                                   const SimOptions& options) {
  if (repetitions == 0) {
    throw ContractViolation("compare: repetitions must be positive");
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [name, config] : configs) {
    ComparisonRow row;
    row.name = name;
    std::vector<double> latencies;
    double tput = 0.0;
    for (std::size_t r = 0; r < repetitions; ++r) {
      const auto rep = run(instance, config, workload, faults,
                           derive_seed(seed, r), options);
      for (Micros l : rep.per_tx_latency()) latencies.push_back(to_ms(l));
      tput += rep.throughput;
      row.stalled += rep.stalled;
      ++row.runs;
    }
    row.throughput = tput / static_cast<double>(repetitions);
    if (!latencies.empty()) {
      std::sort(latencies.begin(), latencies.end());
      const std::size_t m = latencies.size();
      row.mean_latency_ms =
          std::accumulate(latencies.begin(), latencies.end(), 0.0) /
          static_cast<double>(m);
      row.median_latency_ms = m % 2 == 1
                                  ? latencies[m / 2]
                                  : (latencies[m / 2 - 1] + latencies[m / 2]) / 2;
      const auto rank = static_cast<std::size_t>(
          std::ceil(0.99 * static_cast<double>(m)));
      row.p99_latency_ms = latencies[std::max<std::size_t>(rank, 1) - 1];
    }
    rows.push_back(row);
  }
  if (!rows.empty()) {
    const auto& base = rows.front();
    for (auto& row : rows) {
      if (base.mean_latency_ms > 0.0) {
        row.latency_improvement_pct =
            (base.mean_latency_ms - row.mean_latency_ms) / base.mean_latency_ms *
            100.0;
      }
      if (base.throughput > 0.0) {
        row.throughput_improvement_pct =
            (row.throughput - base.throughput) / base.throughput * 100.0;
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const SimReport& report) {
  out << "id,committee,submit_us,start_us,commit_us,latency_us,t_pre_us,"
         "t_cv_us,t_ver_us,t_vc_us,t_com_us,status\n";
  for (const auto& tx : report.transactions) {
    out << tx.id << ',' << tx.committee << ',' << tx.submit.count() << ',';
    if (tx.committed) {
      out << tx.start.count() << ',' << tx.commit.count() << ','
          << tx.latency().count() << ',' << tx.phases.t_pre.count() << ','
          << tx.phases.t_cv.count() << ',' << tx.phases.t_ver.count() << ','
          << tx.phases.t_vc.count() << ',' << tx.phases.t_com.count()
          << ",committed\n";
    } else {
      out << ",,,,,,,,stalled\n";
    }
  }
}

nlohmann::json summary_json(const SimReport& report) {
  using nlohmann::json;
  const auto& p = report.phase_mean;
  json faults = json::array();
  for (const auto& f : report.fault_log) {
    faults.push_back({{"t_us", f.at.count()},
                      {"kind", f.kind},
                      {"node", f.node},
                      {"seq", f.sequence},
                      {"detail", f.detail}});
  }
  return {
      {"committed", report.committed},
      {"stalled", report.stalled},
      {"in_flight", report.in_flight},
      {"throughput_ops", report.throughput},
      {"wall_time_ms", to_ms(report.wall_time)},
      {"mean_latency_ms", to_ms(p.t_tr)},
      {"phase_mean_ms",
       {{"t_pre", to_ms(p.t_pre)},
        {"t_cv", to_ms(p.t_cv)},
        {"t_ver", to_ms(p.t_ver)},
        {"t_vc", to_ms(p.t_vc)},
        {"t_com", to_ms(p.t_com)}}},
      {"blocks", report.blocks},
      {"reconfigurations", report.reconfigurations},
      {"safety",
       {{"rebinds", report.safety.rebinds},
        {"accepted_equivocations", report.safety.accepted_equivocations},
        {"counter_gaps", report.safety.counter_gaps},
        {"block_mismatches", report.safety.block_mismatches}}},
      {"faults", faults},
  };
}

void write_trace(std::ostream& out, const SimReport& report) {
  for (const auto& r : report.trace) {
    const nlohmann::json line = {{"t", r.t.count()},   {"from", r.from},
                                 {"to", r.to},         {"kind", r.kind},
                                 {"committee", r.committee}, {"seq", r.sequence}};
    out << line.dump() << '\n';
  }
}

}  // namespace topcco::sim
