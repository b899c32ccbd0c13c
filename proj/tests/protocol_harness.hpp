// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// A latency-free message pool for driving protocol state machines in tests.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>
#include <sstream>
#include <string>
#include <vector>

#include "topcco/protocol.hpp"

namespace topcco::testing {

namespace pr = topcco::protocol;

struct InFlight {
  pr::Address to;
  pr::ProtocolMessage msg;
};

struct Network {
  std::map<pr::Address, pr::NodeState> nodes;
  std::vector<InFlight> pool;
  std::vector<pr::ProtocolMessage> replies;
  std::vector<pr::ProtocolEvent> events;
  std::map<pr::MessageKind, std::size_t> sent;
  std::set<pr::Address> crashed;

  void add(std::vector<pr::NodeState> states) {
    for (auto& s : states) nodes[s.self] = std::move(s);
  }

  void absorb(std::vector<pr::Outgoing> out) {
    for (auto& o : out) {
      if (o.timer_delay > Micros{0}) continue;
      ++sent[o.msg.kind];
      if (o.to.kind == pr::Address::Kind::Client) {
        replies.push_back(std::move(o.msg));
      } else {
        pool.push_back({o.to, std::move(o.msg)});
      }
    }
  }

  void inject(pr::Address to, pr::ProtocolMessage msg) {
    pool.push_back({to, std::move(msg)});
  }

  void deliver(std::size_t index) {
    InFlight item = std::move(pool[index]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(index));
    if (crashed.count(item.to) != 0) return;
    auto it = nodes.find(item.to);
    if (it == nodes.end()) return;
    auto t = pr::handle_message(it->second, item.msg, Micros{0});
    it->second = std::move(t.state);
    events.insert(events.end(), t.events.begin(), t.events.end());
    absorb(std::move(t.out));
  }

  void run_fifo(std::size_t limit = 100000) {
    for (std::size_t i = 0; i < limit && !pool.empty(); ++i) deliver(0);
  }

  std::size_t count(pr::EventKind kind) const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.kind == kind;
    return n;
  }
};

inline pr::ProtocolMessage request(NodeId leader, std::uint64_t digest,
                                   std::uint64_t payload = 0) {
  pr::ProtocolMessage m;
  m.kind = pr::MessageKind::Request;
  m.from = pr::client(leader);
  m.committee = leader;
  m.digest = {digest};
  m.payload_bytes = payload;
  return m;
}

// One committee (leader 0, followers 1..3f) plus a verification committee.
inline Network single_committee(std::uint32_t f, std::size_t vc_members,
                                bool fallback) {
  std::vector<NodeId> active, passive;
  for (NodeId j = 1; j <= 3 * f; ++j) {
    (j <= 2 * f ? active : passive).push_back(j);
  }
  pr::VerificationView view;
  view.members = vc_members;
  std::set<NodeId> followers(active.begin(), active.end());
  followers.insert(passive.begin(), passive.end());
  view.committees[0] = followers;
  view.tolerance[0] = f;
  Network net;
  net.add(pr::make_committee(0, active, passive, f, view, fallback));
  net.add(pr::make_verification(view, 0));
  return net;
}

// Canonical text for a node state, used to deduplicate explored states.
inline std::string state_key(const pr::NodeState& s) {
  std::ostringstream o;
  o << int(s.role) << int(s.mode) << ':' << s.counter.value() << ':'
    << s.last_sequence << '|';
  for (const auto& [k, d] : s.log) o << k.first << '.' << k.second << '=' << d.value << ',';
  o << '|';
  for (const auto& [seq, r] : s.pending) {
    o << seq << ':' << int(r.phase) << ':';
    for (auto j : r.responded) o << j << ',';
    o << ';';
  }
  o << '|';
  for (const auto& [seq, d] : s.replied) o << seq << '=' << d.value << ',';
  o << '|' << s.inbox.size() << ',' << s.queue.size() << ',' << s.next_height;
  if (s.ordering) {
    o << "|o" << s.ordering->round << ':' << s.ordering->block.digest().value
      << ':' << s.ordering->votes.size();
  }
  o << '|';
  for (const auto& b : s.blocks) o << b.digest().value << ',';
  o << '|' << s.deferred.size();
  return o.str();
}

inline std::string message_key(const InFlight& m) {
  std::ostringstream o;
  o << pr::to_string(m.to) << '<' << pr::to_string(m.msg.from) << ':'
    << int(m.msg.kind) << ':' << m.msg.committee << ':' << m.msg.sequence
    << ':' << m.msg.digest.value << ':' << m.msg.round << ':' << m.msg.height;
  return o.str();
}

inline std::string network_key(const Network& net) {
  std::string key;
  for (const auto& [a, s] : net.nodes) key += state_key(s) + '#';
  std::vector<std::string> msgs;
  for (const auto& m : net.pool) msgs.push_back(message_key(m));
  std::sort(msgs.begin(), msgs.end());
  for (const auto& m : msgs) key += m + ';';
  key += std::to_string(net.replies.size());
  return key;
}

struct ExploreResult {
  std::size_t states = 0;
  std::size_t terminals = 0;
  std::vector<std::string> violations;
};

// Safety predicates that must hold in every reachable state.
inline void check_safety(const Network& net, std::vector<std::string>& out) {
  std::map<std::pair<NodeId, std::uint64_t>, std::uint64_t> committed;
  for (const auto& r : net.replies) {
    auto [it, fresh] = committed.emplace(std::pair(r.committee, r.sequence),
                                         r.digest.value);
    if (!fresh && it->second != r.digest.value) {
      out.push_back("conflicting replies for one sequence");
    }
  }
  const std::vector<pr::Block>* longest = nullptr;
  for (const auto& [a, s] : net.nodes) {
    if (a.kind != pr::Address::Kind::Verification) continue;
    if (longest == nullptr || s.blocks.size() > longest->size()) {
      longest = &s.blocks;
    }
  }
  for (const auto& [a, s] : net.nodes) {
    if (a.kind != pr::Address::Kind::Verification) continue;
    for (std::size_t h = 0; h < s.blocks.size(); ++h) {
      if (!(s.blocks[h] == (*longest)[h])) {
        out.push_back("verification members disagree on block " +
                      std::to_string(h));
      }
    }
  }
}

// Explores every delivery order reachable from `start`, deduplicating
// states. `terminal` checks quiescent states.
inline ExploreResult explore(
    Network start,
    const std::function<void(const Network&, std::vector<std::string>&)>&
        terminal,
    std::size_t state_limit = 2000000) {
  ExploreResult result;
  std::unordered_set<std::string> seen;
  std::vector<Network> stack{std::move(start)};
  while (!stack.empty() && result.violations.empty()) {
    Network net = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(network_key(net)).second) continue;
    if (++result.states > state_limit) {
      result.violations.push_back("state limit exceeded");
      break;
    }
    check_safety(net, result.violations);
    if (net.pool.empty()) {
      ++result.terminals;
      terminal(net, result.violations);
      continue;
    }
    for (std::size_t i = 0; i < net.pool.size(); ++i) {
      Network next = net;
      next.deliver(i);
      stack.push_back(std::move(next));
    }
  }
  return result;
}

}  // namespace topcco::testing
