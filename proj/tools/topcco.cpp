// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 infeasible, 3 timeout.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "topcco/cco.hpp"
#include "topcco/errors.hpp"
#include "topcco/experiment.hpp"
#include "topcco/io.hpp"
#include "topcco/sim.hpp"
#include "topcco/topology.hpp"

namespace fs = std::filesystem;
using namespace topcco;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kTimeout = 3;

std::size_t default_threads() {
  if (const char* env = std::getenv("TOPCCO_THREADS")) {
    try {
      return std::max<long>(1, std::stol(env));
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct TopologyFlags {
  std::string kind = "clustered";
  std::size_t clusters = 5;
  double intra_ms = 0.1;
  double inter_ms = 5.0;
  double jitter = 0.1;
  double lo_ms = 1.0;
  double hi_ms = 50.0;
  double mu = 1.5;
  double sigma = 0.5;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "uniform, clustered or lognormal")
        ->check(CLI::IsMember({"uniform", "clustered", "lognormal"}))
        ->capture_default_str();
    app->add_option("--clusters", clusters, "clustered: cluster count")
        ->capture_default_str();
    app->add_option("--intra-ms", intra_ms, "clustered: intra-cluster delay")
        ->capture_default_str();
    app->add_option("--inter-ms", inter_ms, "clustered: inter-cluster delay")
        ->capture_default_str();
    app->add_option("--jitter", jitter, "clustered: relative jitter")
        ->capture_default_str();
    app->add_option("--lo-ms", lo_ms, "uniform: lower bound")->capture_default_str();
    app->add_option("--hi-ms", hi_ms, "uniform: upper bound")->capture_default_str();
    app->add_option("--mu", mu, "lognormal: mean of ln(ms)")->capture_default_str();
    app->add_option("--sigma", sigma, "lognormal: sd of ln(ms)")
        ->capture_default_str();
  }

  topology::Kind build() const {
    if (kind == "uniform") return topology::Uniform{lo_ms, hi_ms};
    if (kind == "lognormal") return topology::LogNormal{mu, sigma};
    return topology::Clustered{clusters, intra_ms, inter_ms, jitter};
  }
};

// "node@ms" pairs.
std::map<NodeId, Micros> timed_nodes(const std::vector<std::string>& specs) {
  std::map<NodeId, Micros> out;
  for (const auto& s : specs) {
    const auto at = s.find('@');
    try {
      const auto node = static_cast<NodeId>(std::stoul(s.substr(0, at)));
      const double ms = at == std::string::npos ? 0.0 : std::stod(s.substr(at + 1));
      out[node] = from_ms(ms);
    } catch (const std::exception&) {
      throw ContractViolation("expected NODE@MS, got '" + s + "'");
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void print_latency(const cco::LatencyBreakdown& l) {
  std::cout << "t_pre " << to_ms(l.t_pre) << " ms\n"
            << "t_cv  " << to_ms(l.t_cv) << " ms\n"
            << "t_ver " << to_ms(l.t_ver) << " ms\n"
            << "t_vc  " << to_ms(l.t_vc) << " ms\n"
            << "t_com " << to_ms(l.t_com) << " ms\n"
            << "t_tr  " << to_ms(l.t_tr) << " ms\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Committee configuration optimizer and protocol simulator"};
  app.require_subcommand(1);

  // gen-topology
  auto* gen = app.add_subcommand("gen-topology", "Write a synthetic instance");
  TopologyFlags topo;
  topo.add(gen);
  std::size_t gen_n = 40;
  std::uint32_t gen_f = 1;
  std::uint64_t gen_seed = 1;
  double gen_tee = 0.0;
  std::size_t gen_members = 4;
  std::string gen_out;
  gen->add_option("-n,--nodes", gen_n, "consensus nodes")->capture_default_str();
  gen->add_option("-f", gen_f, "faults tolerated per committee")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--tee-failed-fraction", gen_tee)->capture_default_str();
  gen->add_option("--verification-members", gen_members)->capture_default_str();
  gen->add_option("-o,--out", gen_out, "instance JSON")->required();

  // optimize
  auto* opt = app.add_subcommand("optimize", "Solve the committee configuration");
  std::string opt_instance, opt_out, solver = "auto";
  cco::SolveLimits limits;
  bool pin_max = false;
  opt->add_option("-i,--instance", opt_instance)->required()->check(CLI::ExistingFile);
  opt->add_option("-o,--out", opt_out, "configuration JSON")->required();
  opt->add_option("--solver", solver, "exact, heuristic, brute or auto")
      ->check(CLI::IsMember({"exact", "heuristic", "brute", "auto"}))
      ->capture_default_str();
  opt->add_option("--time-budget", limits.time_budget_seconds, "seconds")
      ->capture_default_str();
  opt->add_option("--node-cap-exact", limits.node_cap_exact)->capture_default_str();
  opt->add_flag("--optimality-required", limits.optimality_required);
  opt->add_option("--min-committees", limits.min_committees)->capture_default_str();
  opt->add_option("--max-committees", limits.max_committees)->capture_default_str();
  opt->add_flag("--max-parallel", pin_max,
                "pin the committee count to floor(N/(3f+1))");
  opt->add_option("--seed", limits.seed)->capture_default_str();
  opt->add_option("--iterations", limits.iteration_budget)->capture_default_str();
  std::vector<NodeId> failed_tees;
  opt->add_option("--failed-tees", failed_tees, "mark these TEEs failed first");

  // simulate
  auto* simc = app.add_subcommand("simulate", "Run the protocol simulator");
  std::string sim_instance, sim_config, sim_out = "sim_out", arrival = "closed";
  sim::Workload workload;
  sim::SimOptions sopts;
  double client_ms = 0.0, bandwidth_gbps = 1.0;
  std::uint64_t sim_seed = 1;
  std::optional<NodeId> pinned;
  std::vector<std::string> crashes, tee_fail, tee_recover, equivocate;
  std::vector<NodeId> slow;
  double slow_multiplier = 1.0;
  simc->add_option("-i,--instance", sim_instance)->required()->check(CLI::ExistingFile);
  simc->add_option("-c,--config", sim_config)->required()->check(CLI::ExistingFile);
  simc->add_option("-o,--out-dir", sim_out)->capture_default_str();
  simc->add_option("--requests", workload.total_requests)->capture_default_str();
  simc->add_option("--arrival", arrival, "closed or poisson")
      ->check(CLI::IsMember({"closed", "poisson"}))
      ->capture_default_str();
  simc->add_option("--rate", workload.rate_per_second, "poisson: requests/s")
      ->capture_default_str();
  simc->add_option("--payload", workload.payload_bytes, "bytes")->capture_default_str();
  simc->add_option("--pinned", pinned, "send every request to this leader");
  simc->add_option("--client-delay-ms", client_ms)->capture_default_str();
  simc->add_option("--bandwidth-gbps", bandwidth_gbps)->capture_default_str();
  simc->add_option("--block-capacity", sopts.block_capacity, "0 = unbounded")
      ->capture_default_str();
  simc->add_flag("--adaptive", sopts.adaptive, "re-optimize after TEE failures");
  simc->add_flag("--global-fallback", sopts.global_fallback,
                 "a TEE failure switches every committee");
  simc->add_option("--crash", crashes, "NODE@MS");
  simc->add_option("--tee-fail", tee_fail, "NODE@MS");
  simc->add_option("--tee-recover", tee_recover, "NODE@MS");
  simc->add_option("--equivocate", equivocate, "LEADER@MS");
  simc->add_option("--slow", slow, "slow nodes");
  simc->add_option("--slow-multiplier", slow_multiplier)->capture_default_str();
  simc->add_flag("--trace", sopts.record_trace, "write trace.jsonl");
  simc->add_option("--seed", sim_seed)->capture_default_str();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a parameter sweep");
  std::string exp_name, exp_out = "results";
  experiment::Options eopts;
  TopologyFlags etopo;
  etopo.add(exp);
  std::vector<std::size_t> nodes{40, 80, 120, 160, 200, 240};
  std::vector<std::uint64_t> payloads{0, 1000, 10000, 100000, 1000000};
  std::size_t exp_n = 40;
  eopts.threads = default_threads();
  exp->add_option("name", exp_name, "node_sweep, payload_sweep or fallback_compare")
      ->required()
      ->check(CLI::IsMember({"node_sweep", "payload_sweep", "fallback_compare"}));
  exp->add_option("--nodes", nodes, "node_sweep axis")->capture_default_str();
  exp->add_option("--payloads", payloads, "payload_sweep axis (bytes)")
      ->capture_default_str();
  exp->add_option("-n", exp_n, "node count for payload_sweep/fallback_compare")
      ->capture_default_str();
  exp->add_option("--seeds", eopts.seeds)->capture_default_str();
  exp->add_option("-f", eopts.f)->capture_default_str();
  exp->add_option("--requests-per-committee", eopts.requests_per_committee)
      ->capture_default_str();
  exp->add_option("--payload", eopts.payload_bytes)->capture_default_str();
  exp->add_option("--tee-failed-fraction", eopts.tee_failed_fraction)
      ->capture_default_str();
  exp->add_option("--block-capacity", eopts.sim.block_capacity)->capture_default_str();
  exp->add_option("--iterations", eopts.limits.iteration_budget)->capture_default_str();
  exp->add_option("--threads", eopts.threads, "default: $TOPCCO_THREADS or cores")
      ->capture_default_str();
  exp->add_option("-o,--out-dir", exp_out)->capture_default_str();

  // check
  auto* chk = app.add_subcommand("check", "Check a configuration's constraints");
  std::string chk_instance, chk_config;
  chk->add_option("-i,--instance", chk_instance)->required()->check(CLI::ExistingFile);
  chk->add_option("-c,--config", chk_config)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      topology::Spec spec;
      spec.kind = topo.build();
      spec.n = gen_n;
      spec.f = gen_f;
      spec.seed = gen_seed;
      spec.profiles.tee_failed_fraction = gen_tee;
      spec.verification_members = gen_members;
      io::write_json(gen_out, io::to_json(topology::generate(spec)));
      return kOk;
    }

    if (opt->parsed()) {
      Instance inst = io::load_instance(opt_instance);
      inst = cco::with_tee_failures(inst, {failed_tees.begin(), failed_tees.end()});
      if (pin_max) {
        limits.min_committees = inst.max_committees();
        limits.max_committees = inst.max_committees();
      }
      cco::Solution sol;
      if (solver == "exact") {
        sol = cco::solve_exact(inst, limits);
      } else if (solver == "heuristic") {
        sol = cco::solve_heuristic(inst, limits.seed, limits.iteration_budget, limits);
      } else if (solver == "brute") {
        sol = cco::brute_force(inst, limits);
      } else {
        sol = cco::solve_auto(inst, limits);
      }
      io::write_json(opt_out, io::to_json(sol));
      std::cout << "committees " << sol.config.committee_count << "\n";
      print_latency(sol.latency);
      std::cout << "optimal " << (sol.optimal ? "true" : "false") << "\n";
      return kOk;
    }

    if (simc->parsed()) {
      const Instance inst = io::load_instance(sim_instance);
      const auto config =
          io::solution_from_json(io::read_json(sim_config), inst.node_count()).config;
      workload.arrival = arrival == "poisson" ? sim::Workload::Arrival::Poisson
                                              : sim::Workload::Arrival::ClosedLoop;
      if (pinned) {
        workload.target = sim::Workload::Target::Pinned;
        workload.pinned_leader = *pinned;
      }
      workload.client_delay = from_ms(client_ms);
      sopts.bandwidth_bits_per_second = bandwidth_gbps * 1e9;
      sim::FaultPlan faults;
      faults.crashes = timed_nodes(crashes);
      faults.tee_failures = timed_nodes(tee_fail);
      faults.tee_recoveries = timed_nodes(tee_recover);
      faults.equivocations = timed_nodes(equivocate);
      faults.slow_nodes = {slow.begin(), slow.end()};
      faults.slow_multiplier = slow_multiplier;

      const auto rep = sim::run(inst, config, workload, faults, sim_seed, sopts);
      const fs::path dir(sim_out);
      fs::create_directories(dir);
      std::ostringstream csv;
      sim::write_csv(csv, rep);
      write_text(dir / "transactions.csv", csv.str());
      io::write_json(dir / "summary.json", sim::summary_json(rep));
      if (sopts.record_trace) {
        std::ostringstream trace;
        sim::write_trace(trace, rep);
        write_text(dir / "trace.jsonl", trace.str());
      }
      std::cout << "committed " << rep.committed << " stalled " << rep.stalled
                << "\nthroughput " << rep.throughput << " op/s\n";
      print_latency(rep.phase_mean);
      return kOk;
    }

    if (exp->parsed()) {
      eopts.kind = etopo.build();
      std::vector<experiment::Cell> cells;
      std::string axis = "n";
      if (exp_name == "node_sweep") {
        cells = experiment::node_sweep(nodes, eopts);
      } else if (exp_name == "payload_sweep") {
        cells = experiment::payload_sweep(exp_n, payloads, eopts);
        axis = "payload_bytes";
      } else {
        cells = experiment::fallback_compare(exp_n, eopts);
      }
      const fs::path dir(exp_out);
      fs::create_directories(dir);
      std::ostringstream raw, points;
      experiment::write_cells_csv(raw, cells);
      experiment::write_points_csv(points, experiment::summarize(cells), axis);
      write_text(dir / (exp_name + "_runs.csv"), raw.str());
      write_text(dir / (exp_name + ".csv"), points.str());
      std::cout << points.str();
      std::size_t failures = 0;
      for (const auto& c : cells) failures += !c.error.empty();
      if (failures > 0) std::cerr << failures << " cell(s) failed; see runs CSV\n";
      return kOk;
    }

    if (chk->parsed()) {
      const Instance inst = io::load_instance(chk_instance);
      const auto config =
          io::solution_from_json(io::read_json(chk_config), inst.node_count()).config;
      const auto violations = cco::check_constraints(inst, config);
      for (const auto& v : violations) {
        std::cout << cco::to_string(v.constraint) << " node " << v.subject;
        if (v.other) std::cout << " / " << *v.other;
        std::cout << ": " << v.detail << "\n";
      }
      if (!violations.empty()) return kInfeasible;
      std::cout << "feasible\n";
      print_latency(cco::evaluate(inst, config));
      return kOk;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const TimeoutError& e) {
    std::cerr << "timeout: " << e.what() << "\n";
    return kTimeout;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
