// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "topcco/experiment.hpp"

#include <functional>
#include <iomanip>
#include <map>

namespace topcco::experiment {

namespace {

Cell blank(std::string config, double axis, std::uint64_t seed) {
  Cell cell;
  cell.config = std::move(config);
  cell.axis = axis;
  cell.seed = seed;
  return cell;
}

Instance make_instance(std::size_t n, std::uint64_t seed, const Options& o,
                       double tee_fraction) {
  topology::Spec spec;
  spec.kind = o.kind;
  spec.n = n;
  spec.f = o.f;
  spec.seed = sim::derive_seed(seed, n);
  spec.profiles.tee_failed_fraction = tee_fraction;
  return topology::generate(spec);
}

cco::SolveLimits pinned(const Instance& inst, const Options& o) {
  cco::SolveLimits limits = o.limits;
  limits.min_committees = inst.max_committees();
  limits.max_committees = inst.max_committees();
  return limits;
}

Cell simulate(std::string name, double axis, std::uint64_t seed,
              const Instance& inst, const cco::Configuration& config,
              const Options& o, std::uint64_t payload) {
  Cell cell = blank(std::move(name), axis, seed);
  cell.committees = config.committee_count;
  sim::Workload w;
  w.total_requests = config.committee_count * o.requests_per_committee;
  w.payload_bytes = payload;
  const auto rep = sim::run(inst, config, w, {}, sim::derive_seed(seed, 7), o.sim);
  cell.throughput = rep.throughput;
  cell.latency_ms = to_ms(rep.phase_mean.t_tr);
  cell.committed = rep.committed;
  cell.stalled = rep.stalled;
  return cell;
}

// Runs `make` and records an exception as a failed cell.
Cell guarded(std::string name, double axis, std::uint64_t seed,
             const std::function<Cell()>& make) {
  try {
    return make();
  } catch (const std::exception& e) {
    Cell cell = blank(std::move(name), axis, seed);
    cell.error = e.what();
    return cell;
  }
}

std::vector<Cell> standard_cells(const Instance& inst, double axis,
                                 std::uint64_t seed, const Options& o,
                                 std::uint64_t payload) {
  std::vector<Cell> out;
  out.push_back(guarded("cco", axis, seed, [&] {
    const auto sol = cco::solve_auto(inst, pinned(inst, o));
    return simulate("cco", axis, seed, inst, sol.config, o, payload);
  }));
  out.push_back(guarded("random", axis, seed, [&] {
    const auto config =
        sim::random_configuration(inst, sim::derive_seed(seed, 0xdefa), false);
    return simulate("random", axis, seed, inst, config, o, payload);
  }));
  sim::BaselineOptions bopt = o.baseline;
  bopt.payload_bytes = payload;
  bopt.bandwidth_bits_per_second = o.sim.bandwidth_bits_per_second;
  for (const auto& b : sim::analytic_baselines(inst, bopt)) {
    Cell cell = blank(b.name, axis, seed);
    cell.throughput = b.throughput;
    cell.latency_ms = to_ms(b.latency);
    cell.committees = 1;
    out.push_back(cell);
  }
  return out;
}

std::vector<Cell> flatten(std::vector<std::vector<Cell>> parts) {
  std::vector<Cell> out;
  for (auto& p : parts) {
    for (auto& c : p) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<Cell> node_sweep(const std::vector<std::size_t>& node_counts,
                             const Options& o) {
  const std::size_t seeds = o.seeds.size();
  std::vector<std::vector<Cell>> parts(node_counts.size() * seeds);
  parallel_for(parts.size(), o.threads, [&](std::size_t i) {
    const std::size_t n = node_counts[i / seeds];
    const std::uint64_t seed = o.seeds[i % seeds];
    try {
      const auto inst = make_instance(n, seed, o, 0.0);
      parts[i] = standard_cells(inst, static_cast<double>(n), seed, o,
                                o.payload_bytes);
    } catch (const std::exception& e) {
      Cell cell = blank("topology", static_cast<double>(n), seed);
      cell.error = e.what();
      parts[i] = {cell};
    }
  });
  return flatten(std::move(parts));
}

std::vector<Cell> payload_sweep(std::size_t n,
                                const std::vector<std::uint64_t>& payloads,
                                const Options& o) {
  const std::size_t seeds = o.seeds.size();
  std::vector<std::vector<Cell>> parts(payloads.size() * seeds);
  parallel_for(parts.size(), o.threads, [&](std::size_t i) {
    const std::uint64_t payload = payloads[i / seeds];
    const std::uint64_t seed = o.seeds[i % seeds];
    try {
      const auto inst = make_instance(n, seed, o, 0.0);
      parts[i] = standard_cells(inst, static_cast<double>(payload), seed, o,
                                payload);
    } catch (const std::exception& e) {
      Cell cell = blank("topology", static_cast<double>(payload), seed);
      cell.error = e.what();
      parts[i] = {cell};
    }
  });
  return flatten(std::move(parts));
}

std::vector<Cell> fallback_compare(std::size_t n, const Options& o) {
  const auto axis = static_cast<double>(n);
  std::vector<std::vector<Cell>> parts(o.seeds.size());
  parallel_for(parts.size(), o.threads, [&](std::size_t i) {
    const std::uint64_t seed = o.seeds[i];
    std::vector<Cell> cells;
    try {
      const Instance degraded = make_instance(n, seed, o, o.tee_failed_fraction);
      Instance healthy = degraded;
      std::set<NodeId> failed;
      for (NodeId v = 0; v < n; ++v) {
        if (healthy.nodes[v].tee_failed) failed.insert(v);
        healthy.nodes[v].tee_failed = false;
      }
      const auto limits = pinned(healthy, o);
      const auto base = cco::solve_auto(healthy, limits);
      cells.push_back(guarded("adaptive", axis, seed, [&] {
        const auto sol = cco::reoptimize_fallback(healthy, failed, base.config,
                                                  limits, {true});
        return simulate("adaptive", axis, seed, degraded, sol.config, o,
                        o.payload_bytes);
      }));
      cells.push_back(guarded("kept", axis, seed, [&] {
        const auto sol = cco::reoptimize_fallback(healthy, failed, base.config,
                                                  limits, {false});
        return simulate("kept", axis, seed, degraded, sol.config, o,
                        o.payload_bytes);
      }));
      cells.push_back(guarded("fallback_all", axis, seed, [&] {
        const auto config = sim::random_configuration(
            degraded, sim::derive_seed(seed, 0xfa11), true);
        return simulate("fallback_all", axis, seed, degraded, config, o,
                        o.payload_bytes);
      }));
    } catch (const std::exception& e) {
      Cell cell = blank("topology", axis, seed);
      cell.error = e.what();
      cells.push_back(cell);
    }
    parts[i] = std::move(cells);
  });
  return flatten(std::move(parts));
}

std::vector<Point> summarize(const std::vector<Cell>& cells) {
  std::vector<Point> out;
  std::map<std::pair<std::string, double>, std::size_t> index;
  for (const auto& c : cells) {
    if (!c.error.empty()) continue;
    auto [it, fresh] = index.emplace(std::pair(c.config, c.axis), out.size());
    if (fresh) out.push_back({c.config, c.axis, 0.0, 0.0, 0});
    auto& p = out[it->second];
    p.throughput += c.throughput;
    p.latency_ms += c.latency_ms;
    ++p.samples;
  }
  for (auto& p : out) {
    p.throughput /= static_cast<double>(p.samples);
    p.latency_ms /= static_cast<double>(p.samples);
  }
  return out;
}

void write_cells_csv(std::ostream& out, const std::vector<Cell>& cells) {
  out << "config,axis,seed,committees,throughput_ops,latency_ms,committed,"
         "stalled,error\n";
  for (const auto& c : cells) {
    out << c.config << ',' << c.axis << ',' << c.seed << ',' << c.committees
        << ',' << c.throughput << ',' << c.latency_ms << ',' << c.committed
        << ',' << c.stalled << ',' << std::quoted(c.error, '"', '"') << '\n';
  }
}

void write_points_csv(std::ostream& out, const std::vector<Point>& points,
                      const std::string& axis_name) {
  out << "config," << axis_name << ",throughput_ops,latency_ms,samples\n";
  for (const auto& p : points) {
    out << p.config << ',' << p.axis << ',' << p.throughput << ','
        << p.latency_ms << ',' << p.samples << '\n';
  }
}

}  // namespace topcco::experiment
