// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include "topcco/io.hpp"

#include <fstream>

#include "topcco/errors.hpp"

namespace topcco::io {

namespace {

json ms_row(const std::vector<Micros>& row) {
  json out = json::array();
  for (auto v : row) out.push_back(to_ms(v));
  return out;
}

std::vector<Micros> ticks_row(const json& row) {
  std::vector<Micros> out;
  for (const auto& v : row) out.push_back(from_ms(v.get<double>()));
  return out;
}

json ms_matrix(const std::vector<std::vector<Micros>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(ms_row(row));
  return out;
}

std::vector<std::vector<Micros>> ticks_matrix(const json& m) {
  std::vector<std::vector<Micros>> out;
  for (const auto& row : m) out.push_back(ticks_row(row));
  return out;
}

}  // namespace

json to_json(const Instance& instance) {
  json nodes = json::array();
  for (const auto& node : instance.nodes) {
    nodes.push_back({{"b", node.byzantine_rate},
                     {"c", node.crash_rate},
                     {"t", node.tee_failed ? 1 : 0}});
  }
  const auto& vc = instance.verification;
  return {{"f", instance.params.f},
          {"B", instance.params.max_leader_byzantine},
          {"C", instance.params.max_leader_crash},
          {"nodes", std::move(nodes)},
          {"d", ms_matrix(instance.delays.d)},
          {"d_to_v", ms_row(instance.delays.to_verification)},
          {"d_from_v", ms_row(instance.delays.from_verification)},
          {"verification",
           {{"members", vc.member_count},
            {"leader", vc.leader_index},
            {"rtts", ms_matrix(vc.internal_rtts)}}}};
}

Instance instance_from_json(const json& j) {
  try {
    Instance out;
    out.params.f = j.at("f").get<std::uint32_t>();
    out.params.max_leader_byzantine = j.at("B").get<double>();
    out.params.max_leader_crash = j.at("C").get<double>();
    for (const auto& node : j.at("nodes")) {
      out.nodes.push_back({node.at("b").get<double>(), node.at("c").get<double>(),
                           node.at("t").get<int>() != 0});
    }
    out.delays.d = ticks_matrix(j.at("d"));
    out.delays.to_verification = ticks_row(j.at("d_to_v"));
    out.delays.from_verification = ticks_row(j.at("d_from_v"));
    const auto& vc = j.at("verification");
    out.verification.member_count = vc.at("members").get<std::size_t>();
    out.verification.leader_index = vc.at("leader").get<std::size_t>();
    out.verification.internal_rtts = ticks_matrix(vc.at("rtts"));
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed instance: ") + e.what());
  }
}

json to_json(const cco::LatencyBreakdown& latency) {
  return {{"t_pre", to_ms(latency.t_pre)}, {"t_cv", to_ms(latency.t_cv)},
          {"t_ver", to_ms(latency.t_ver)}, {"t_vc", to_ms(latency.t_vc)},
          {"t_com", to_ms(latency.t_com)}, {"t_tr", to_ms(latency.t_tr)}};
}

json to_json(const cco::Solution& solution) {
  const auto& config = solution.config;
  json committees = json::array();
  for (NodeId leader : config.leaders()) {
    committees.push_back({{"leader", leader},
                          {"members", config.members_of(leader)},
                          {"active", config.active_of(leader)},
                          {"sigma", config.sigma[leader] ? 1 : 0}});
  }
  return {{"p", config.committee_count},
          {"committees", std::move(committees)},
          {"latency", to_json(solution.latency)},
          {"optimal", solution.optimal},
          {"gap", solution.gap}};
}

cco::Solution solution_from_json(const json& j, std::size_t node_count) {
  try {
    cco::Solution out;
    auto& config = out.config;
    // Nodes the file never mentions get an out-of-range leader so the
    // constraint checker reports them.
    config.leader_of.assign(node_count, static_cast<NodeId>(node_count));
    config.sigma.assign(node_count, 0);
    config.committee_count = j.at("p").get<std::size_t>();
    auto in_range = [&](NodeId id) {
      if (id >= node_count) throw Error("configuration references unknown node");
      return id;
    };
    for (const auto& c : j.at("committees")) {
      const NodeId leader = in_range(c.at("leader").get<NodeId>());
      config.leader_of[leader] = leader;
      config.sigma[leader] = static_cast<std::uint8_t>(c.at("sigma").get<int>());
      for (const auto& m : c.at("members")) {
        config.leader_of[in_range(m.get<NodeId>())] = leader;
      }
      for (const auto& a : c.at("active")) {
        config.active_links.insert({leader, in_range(a.get<NodeId>())});
      }
    }
    if (j.contains("latency")) {
      const auto& l = j.at("latency");
      out.latency = {from_ms(l.at("t_pre").get<double>()),
                     from_ms(l.at("t_cv").get<double>()),
                     from_ms(l.at("t_ver").get<double>()),
                     from_ms(l.at("t_vc").get<double>()),
                     from_ms(l.at("t_com").get<double>()),
                     from_ms(l.at("t_tr").get<double>())};
    }
    out.optimal = j.value("optimal", false);
    out.gap = j.value("gap", 0.0);
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed configuration: ") + e.what());
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json(path));
}

}  // namespace topcco::io
