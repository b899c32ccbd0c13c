// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "protocol_harness.hpp"
#include "topcco/errors.hpp"

using namespace topcco;
using namespace topcco::protocol;
using topcco::testing::Network;
using topcco::testing::request;
using topcco::testing::single_committee;

TEST_CASE("trusted counter: monotone, bound, refuses when compromised") {
  TrustedCounter c(7);
  auto a = counter_assign(c, {11});
  auto b = counter_assign(c, {12});
  CHECK(a.value == 1);
  CHECK(b.value == 2);
  CHECK(counter_verify(a));
  CHECK(counter_verify(b));
  CHECK(c.bindings().at(1) == Digest{11});

  auto tampered = a;
  tampered.digest = {99};
  CHECK_FALSE(counter_verify(tampered));
  CHECK_FALSE(counter_verify(forge_attestation(c, 3, {13})));

  c.compromise();
  CHECK_THROWS_AS(counter_assign(c, {14}), RefusedError);
  CHECK(c.value() == 2);
  c.restore();
  CHECK(counter_assign(c, {14}).value == 3);
}

TEST_CASE("multisig verification") {
  MultiSignature sig{{5}, {1, 2}};
  CHECK(verify_multisig(sig, {5}, {1, 2, 3}, 2));
  CHECK_FALSE(verify_multisig(sig, {6}, {1, 2, 3}, 2));
  CHECK_FALSE(verify_multisig(sig, {5}, {1, 2, 3}, 3));
  CHECK_FALSE(verify_multisig(sig, {5}, {2, 3}, 1));
}

TEST_CASE("normal mode message counts for f = 1") {
  auto net = single_committee(1, 4, false);
  net.inject(consensus(0), request(0, 42));
  net.run_fifo();
  REQUIRE(net.replies.size() == 1);
  CHECK(net.replies[0].digest == Digest{42});
  CHECK(net.sent[MessageKind::PrePrepare] == 2);
  CHECK(net.sent[MessageKind::Prepare] == 2);
  CHECK(net.sent[MessageKind::AggregatePrepared] == 1);
  CHECK(net.sent[MessageKind::CommitNotice] == 1);
  CHECK(net.sent[MessageKind::Commit] == 2);
  CHECK(net.sent[MessageKind::Reply] == 1);
  // Four ordering round trips with three verification followers.
  CHECK(net.sent[MessageKind::OrderPropose] == 12);
  CHECK(net.sent[MessageKind::OrderVote] == 12);
  // The passive follower never hears about the request.
  CHECK(net.nodes.at(consensus(3)).log.empty());
  CHECK(net.count(EventKind::Committed) == 1);
  CHECK(net.count(EventKind::EquivocationAlarm) == 0);
}

TEST_CASE("fallback mode uses all 3f followers") {
  auto net = single_committee(1, 4, true);
  net.inject(consensus(0), request(0, 42));
  net.run_fifo();
  REQUIRE(net.replies.size() == 1);
  CHECK(net.sent[MessageKind::PrePrepare] == 3);
  CHECK(net.sent[MessageKind::Prepare] == 3);
  CHECK(net.sent[MessageKind::Commit] == 3);
}

TEST_CASE("verification committee blocks agree and carry the entry") {
  auto net = single_committee(1, 4, false);
  net.inject(consensus(0), request(0, 1));
  net.inject(consensus(0), request(0, 2));
  net.run_fifo();
  CHECK(net.replies.size() == 2);
  const auto& ref = net.nodes.at(verifier(0)).blocks;
  REQUIRE(ref.size() == 2);
  for (std::size_t m = 1; m < 4; ++m) CHECK(net.nodes.at(verifier(m)).blocks == ref);
  CHECK(ref[0].transactions.at(0).sequence == 1);
  CHECK(ref[1].transactions.at(0).sequence == 2);
}

TEST_CASE("replayed pre-prepare with another digest raises an alarm") {
  auto net = single_committee(1, 1, false);
  net.inject(consensus(0), request(0, 42));
  net.run_fifo();
  const auto logged = net.nodes.at(consensus(1)).log;

  // Same counter value, different digest: the attestation no longer matches.
  auto& leader = net.nodes.at(consensus(0));
  ProtocolMessage pp;
  pp.kind = MessageKind::PrePrepare;
  pp.from = consensus(0);
  pp.committee = 0;
  pp.sequence = 1;
  pp.digest = {43};
  pp.attestation = forge_attestation(leader.counter, 1, {43});
  net.inject(consensus(1), pp);
  net.run_fifo();
  CHECK(net.count(EventKind::EquivocationAlarm) == 1);
  CHECK(net.nodes.at(consensus(1)).log == logged);
  CHECK(net.sent[MessageKind::Prepare] == 2);

  // A classical leader replaying a bound sequence is caught by the log.
  auto fb = single_committee(1, 1, true);
  fb.inject(consensus(0), request(0, 42));
  fb.run_fifo();
  pp.attestation.reset();
  pp.fallback = true;
  fb.inject(consensus(2), pp);
  fb.run_fifo();
  CHECK(fb.count(EventKind::EquivocationAlarm) == 1);
  CHECK(fb.nodes.at(consensus(2)).log.at({0, 1}) == Digest{42});
}

TEST_CASE("proof for an unknown sequence is buffered then served") {
  auto net = single_committee(1, 1, false);
  net.inject(consensus(0), request(0, 42));
  // Deliver the leader's request, then hold back the pre-prepare to node 1.
  net.deliver(0);
  auto& n1 = net.nodes.at(consensus(1));
  ProtocolMessage proof;
  proof.kind = MessageKind::PrepareProof;
  proof.from = consensus(0);
  proof.committee = 0;
  proof.sequence = 1;
  proof.digest = {42};
  proof.signatures = {{42}, {1, 2}};
  auto t = handle_message(n1, proof, Micros{0});
  CHECK(t.out.empty());
  REQUIRE(t.events.size() == 1);
  CHECK(t.events[0].kind == EventKind::Buffered);
  n1 = t.state;
  net.run_fifo();
  CHECK(net.replies.size() == 1);
}

TEST_CASE("follower with a failed TEE refuses to prepare") {
  auto net = single_committee(1, 1, false);
  net.nodes.at(consensus(1)).counter.compromise();
  net.inject(consensus(0), request(0, 42));
  net.run_fifo();
  CHECK(net.replies.empty());
  CHECK(net.count(EventKind::TeeRefused) == 1);
}

TEST_CASE("leader timer widens to passive followers, then stalls") {
  auto net = single_committee(1, 1, false);
  net.nodes.at(consensus(0)).retry_timeout = Micros{1000};
  net.crashed.insert(consensus(1));
  auto t = handle_message(net.nodes.at(consensus(0)), request(0, 42), Micros{0});
  net.nodes.at(consensus(0)) = t.state;
  const auto timer = std::find_if(t.out.begin(), t.out.end(), [](const auto& o) {
    return o.msg.kind == MessageKind::Timer;
  });
  REQUIRE(timer != t.out.end());
  CHECK(timer->timer_delay == Micros{1000});
  net.absorb(t.out);
  net.run_fifo();
  CHECK(net.replies.empty());

  // First expiry widens; the passive follower makes the quorum.
  auto fired = handle_message(net.nodes.at(consensus(0)), timer->msg, Micros{1000});
  net.nodes.at(consensus(0)) = fired.state;
  net.absorb(fired.out);
  net.run_fifo();
  CHECK(net.replies.size() == 1);
  CHECK(net.nodes.at(consensus(3)).role == Role::ActiveFollower);

  // Two crashed followers: the second expiry stalls the round.
  auto stuck = single_committee(1, 1, false);
  stuck.nodes.at(consensus(0)).retry_timeout = Micros{1000};
  stuck.crashed = {consensus(1), consensus(2)};
  ProtocolMessage tick;
  tick.kind = MessageKind::Timer;
  tick.from = consensus(0);
  tick.sequence = 1;
  auto s0 = handle_message(stuck.nodes.at(consensus(0)), request(0, 7), Micros{0});
  tick.round = s0.state.pending.at(1).timer_serial;
  auto s1 = handle_message(s0.state, tick, Micros{1000});
  tick.round = s1.state.pending.at(1).timer_serial;
  auto s2 = handle_message(s1.state, tick, Micros{2000});
  CHECK(s2.state.pending.at(1).phase == Phase::Stalled);
  REQUIRE(s2.events.size() == 1);
  CHECK(s2.events[0].kind == EventKind::Stalled);
}

TEST_CASE("total order: deterministic, drops duplicates and bad certificates") {
  VerificationView view;
  view.committees[0] = {1, 2, 3};
  view.committees[4] = {5, 6, 7};
  view.tolerance[0] = 1;
  view.tolerance[4] = 1;
  BlockEntry a{4, 1, {10}, {{10}, {5, 6}}, false, 0};
  BlockEntry b{0, 2, {11}, {{11}, {1, 2}}, false, 0};
  BlockEntry c{0, 1, {12}, {{12}, {1, 3}}, false, 0};
  BlockEntry dup = c;
  BlockEntry weak{0, 3, {13}, {{13}, {1}}, false, 0};
  BlockEntry fb_short{4, 2, {14}, {{14}, {5, 6}}, true, 0};

  std::vector<BlockEntry> excluded;
  auto block = total_order({a, b, c, dup, weak, fb_short}, 1, view, &excluded);
  REQUIRE(block.transactions.size() == 3);
  CHECK(block.transactions[0] == c);
  CHECK(block.transactions[1] == b);
  CHECK(block.transactions[2] == a);
  CHECK(excluded.size() == 3);
  CHECK(total_order({c, b, a}, 1, view) == total_order({a, c, b}, 1, view));
}

TEST_CASE("trigger_fallback: activates passives, restarts rounds, idempotent") {
  auto net = single_committee(1, 1, false);
  std::vector<NodeState> states;
  for (NodeId i = 0; i < 4; ++i) states.push_back(net.nodes.at(consensus(i)));
  auto t = handle_message(states[0], request(0, 42), Micros{0});
  states[0] = t.state;

  auto once = trigger_fallback(states, 2);
  for (const auto& s : once.states) {
    CHECK(s.mode == Mode::Fallback);
    CHECK(s.committee.passive.empty());
  }
  CHECK(once.states[2].counter.compromised());
  std::size_t activations = 0, preprepares = 0;
  for (const auto& o : once.out) {
    activations += o.msg.kind == MessageKind::FallbackActivate;
    preprepares += o.msg.kind == MessageKind::PrePrepare;
  }
  CHECK(activations == 1);
  CHECK(preprepares == 3);

  auto twice = trigger_fallback(once.states, 2);
  CHECK(twice.out.empty());
  CHECK_THROWS_AS(trigger_fallback(states, 9), ContractViolation);
}

TEST_CASE("fallback after a leader TEE failure serves deferred requests") {
  auto net = single_committee(1, 1, false);
  net.nodes.at(consensus(0)).counter.compromise();
  net.inject(consensus(0), request(0, 42));
  net.run_fifo();
  CHECK(net.count(EventKind::TeeRefused) == 1);
  CHECK(net.replies.empty());

  std::vector<NodeState> states;
  for (NodeId i = 0; i < 4; ++i) states.push_back(net.nodes.at(consensus(i)));
  auto fb = trigger_fallback(states, 0);
  for (auto& s : fb.states) net.nodes[s.self] = s;
  net.absorb(fb.out);
  net.run_fifo();
  REQUIRE(net.replies.size() == 1);
  CHECK(net.replies[0].digest == Digest{42});
  CHECK(net.sent[MessageKind::Commit] == 3);
}

TEST_CASE("handle_message is pure") {
  auto net = single_committee(1, 1, false);
  const auto before = net.nodes.at(consensus(0));
  auto a = handle_message(before, request(0, 5), Micros{0});
  auto b = handle_message(before, request(0, 5), Micros{0});
  CHECK(testing::state_key(a.state) == testing::state_key(b.state));
  CHECK(a.out.size() == b.out.size());
  CHECK(testing::state_key(before) == testing::state_key(net.nodes.at(consensus(0))));
  CHECK(before.pending.empty());
}

TEST_CASE("exhaustive interleavings: one committee, two requests") {
  auto net = single_committee(1, 1, false);
  net.inject(consensus(0), request(0, 1));
  net.inject(consensus(0), request(0, 2));
  auto result = testing::explore(net, [](const Network& n, auto& out) {
    if (n.replies.size() != 2) out.push_back("request not answered");
  });
  for (const auto& v : result.violations) MESSAGE(v);
  CHECK(result.violations.empty());
  CHECK(result.terminals >= 1);
  MESSAGE("explored " << result.states << " states");
}
