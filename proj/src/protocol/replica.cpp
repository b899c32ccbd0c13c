// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Replica state machines.
//
// Consensus committee, per request (phases 2-6):
//
//   leader                       followers                verification
//   Request ──PrePrepare────────▶ attest, log
//           ◀──────────Prepare──
//           ──PrepareProof──────▶ check certificate
//           ◀───────PrepareAck──                        (t_pre: 2 rtts)
//           ──AggregatePrepared───────────────────────▶ batch, 4 ordering
//           ◀─────────────────────────────CommitNotice── round trips
//           ──Commit────────────▶
//           ◀───────CommitVote──
//           ──CommitProof───────▶
//           ◀────────CommitAck──                        (t_com: 2 rtts)
//   Reply to client
//
// Quorum is 2f in normal mode and 3f in fallback mode. A per-phase timer,
// when enabled, first widens a round to every follower (activating passive
// nodes) and on a second expiry marks the round stalled.

#include <algorithm>

#include "topcco/errors.hpp"
#include "topcco/protocol.hpp"

namespace topcco::protocol {

namespace {

class Context {
 public:
  explicit Context(Transition& t) : t_(t) {}

  NodeState& state() { return t_.state; }

  void send(Address to, ProtocolMessage msg) {
    msg.from = t_.state.self;
    t_.out.push_back({to, std::move(msg), Micros{0}});
  }

  void timer(std::uint64_t sequence, std::uint32_t serial) {
    if (t_.state.retry_timeout <= Micros{0}) return;
    ProtocolMessage msg;
    msg.kind = MessageKind::Timer;
    msg.from = t_.state.self;
    msg.sequence = sequence;
    msg.round = serial;
    t_.out.push_back({t_.state.self, std::move(msg), t_.state.retry_timeout});
  }

  void event(EventKind kind, NodeId committee, std::uint64_t sequence,
             Digest digest, std::string detail = {}) {
    t_.events.push_back(
        {kind, t_.state.self, committee, sequence, digest, std::move(detail)});
  }

 private:
  Transition& t_;
};

NodeId self_id(const NodeState& s) { return s.self.index; }

std::size_t quorum(const NodeState& s) {
  return (s.mode == Mode::Fallback ? 3u : 2u) * s.committee.f;
}

bool from_follower(const NodeState& s, const ProtocolMessage& msg) {
  if (msg.from.kind != Address::Kind::Consensus) return false;
  const auto followers = s.committee.followers();
  return followers.count(msg.from.index) != 0;
}

bool from_leader(const NodeState& s, const ProtocolMessage& msg) {
  return msg.from == consensus(s.committee.leader) &&
         msg.committee == s.committee.leader;
}

// ---------------------------------------------------------------------------
// Consensus leader.

ProtocolMessage phase_message(const NodeState& s, const Round& r) {
  ProtocolMessage msg;
  msg.sequence = r.sequence;
  msg.committee = self_id(s);
  msg.digest = r.digest;
  msg.fallback = s.mode == Mode::Fallback;
  switch (r.phase) {
    case Phase::PrePrepare:
      msg.kind = MessageKind::PrePrepare;
      msg.payload_bytes = r.payload_bytes;
      msg.attestation = r.attestation;
      break;
    case Phase::PrepareProof:
      msg.kind = MessageKind::PrepareProof;
      msg.signatures = r.certificate;
      break;
    case Phase::Commit:
      msg.kind = MessageKind::Commit;
      msg.signatures = r.block_proof;
      break;
    case Phase::CommitProof:
      msg.kind = MessageKind::CommitProof;
      msg.signatures = r.certificate;
      break;
    default:
      break;
  }
  return msg;
}

void enter_phase(Context& ctx, Round& r, Phase phase,
                 const std::set<NodeId>& targets) {
  r.phase = phase;
  r.participants = targets;
  r.responded.clear();
  ++r.timer_serial;
  const auto msg = phase_message(ctx.state(), r);
  for (NodeId j : targets) ctx.send(consensus(j), msg);
  ctx.timer(r.sequence, r.timer_serial);
}

std::set<NodeId> initial_targets(const NodeState& s) {
  if (s.mode == Mode::Fallback) return s.committee.followers();
  return {s.committee.active.begin(), s.committee.active.end()};
}

void leader_request(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  Round r;
  r.digest = msg.digest;
  r.payload_bytes = msg.payload_bytes;
  if (s.mode == Mode::Normal) {
    try {
      r.attestation = counter_assign(s.counter, msg.digest);
    } catch (const RefusedError& e) {
      s.deferred.push_back(msg);
      ctx.event(EventKind::TeeRefused, self_id(s), 0, msg.digest, e.what());
      return;
    }
    // Skip values already used by plain sequences while in fallback.
    while (r.attestation->value <= s.last_sequence) {
      r.attestation = counter_assign(s.counter, msg.digest);
    }
    r.sequence = r.attestation->value;
  } else {
    r.sequence = std::max(s.last_sequence, s.counter.value()) + 1;
  }
  s.last_sequence = std::max(s.last_sequence, r.sequence);
  s.log[{self_id(s), r.sequence}] = r.digest;
  auto [it, inserted] = s.pending.emplace(r.sequence, std::move(r));
  enter_phase(ctx, it->second, Phase::PrePrepare, initial_targets(s));
}

void leader_response(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  auto it = s.pending.find(msg.sequence);
  if (it == s.pending.end() || !from_follower(s, msg)) return;
  Round& r = it->second;
  if (msg.digest != r.digest) {
    ctx.event(EventKind::EquivocationAlarm, self_id(s), msg.sequence,
              msg.digest, "response for a different digest");
    return;
  }
  const NodeId j = msg.from.index;
  const bool expected =
      (msg.kind == MessageKind::Prepare && r.phase == Phase::PrePrepare) ||
      (msg.kind == MessageKind::PrepareAck && r.phase == Phase::PrepareProof) ||
      (msg.kind == MessageKind::CommitVote && r.phase == Phase::Commit) ||
      (msg.kind == MessageKind::CommitAck && r.phase == Phase::CommitProof);
  if (!expected || r.participants.count(j) == 0) return;

  if (msg.kind == MessageKind::Prepare && s.mode == Mode::Normal) {
    const auto token = prepare_token(self_id(s), r.sequence, r.digest);
    if (!msg.attestation || !counter_verify(*msg.attestation) ||
        msg.attestation->node != j || msg.attestation->digest != token) {
      ctx.event(EventKind::InvalidAttestation, self_id(s), msg.sequence,
                msg.digest, "prepare from " + std::to_string(j));
      return;
    }
  }
  r.responded.insert(j);
  if (r.responded.size() < quorum(s)) return;

  const std::set<NodeId> signers = r.responded;
  switch (r.phase) {
    case Phase::PrePrepare:
      r.certificate = {r.digest, signers};
      enter_phase(ctx, r, Phase::PrepareProof, signers);
      break;
    case Phase::PrepareProof: {
      r.phase = Phase::AwaitCommit;
      ++r.timer_serial;
      ProtocolMessage agg;
      agg.kind = MessageKind::AggregatePrepared;
      agg.sequence = r.sequence;
      agg.committee = self_id(s);
      agg.digest = r.digest;
      agg.payload_bytes = r.payload_bytes;
      agg.fallback = s.mode == Mode::Fallback;
      agg.signatures = r.certificate;
      agg.entries.push_back({self_id(s), r.sequence, r.digest, r.certificate,
                             agg.fallback, r.payload_bytes});
      ctx.send(verifier(s.verification.leader), std::move(agg));
      break;
    }
    case Phase::Commit:
      r.certificate = {r.digest, signers};
      enter_phase(ctx, r, Phase::CommitProof, signers);
      break;
    case Phase::CommitProof: {
      r.phase = Phase::Done;
      ++r.timer_serial;
      ProtocolMessage reply;
      reply.kind = MessageKind::Reply;
      reply.sequence = r.sequence;
      reply.committee = self_id(s);
      reply.digest = r.digest;
      ctx.send(client(self_id(s)), std::move(reply));
      ctx.event(EventKind::Committed, self_id(s), r.sequence, r.digest);
      s.replied[r.sequence] = r.digest;
      s.pending.erase(it);
      break;
    }
    default:
      break;
  }
}

void leader_commit_notice(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  std::set<NodeId> members;
  for (std::size_t m = 0; m < s.verification.members; ++m) {
    members.insert(static_cast<NodeId>(m));
  }
  if (!verify_multisig(msg.signatures, msg.signatures.digest, members,
                       s.verification.quorum())) {
    ctx.event(EventKind::EquivocationAlarm, self_id(s), msg.sequence,
              msg.digest, "commit notice with a bad block signature");
    return;
  }
  for (const auto& entry : msg.entries) {
    if (entry.committee != self_id(s)) continue;
    auto it = s.pending.find(entry.sequence);
    if (it == s.pending.end() || it->second.phase != Phase::AwaitCommit ||
        it->second.digest != entry.digest) {
      continue;
    }
    Round& r = it->second;
    r.block_proof = msg.signatures;
    enter_phase(ctx, r, Phase::Commit, r.certificate.signers);
  }
}

void restart_round(Context& ctx, Round& r) {
  const auto all = ctx.state().committee.followers();
  switch (r.phase) {
    case Phase::PrePrepare:
    case Phase::PrepareProof:
      enter_phase(ctx, r, Phase::PrePrepare, all);
      break;
    case Phase::Commit:
    case Phase::CommitProof:
      enter_phase(ctx, r, Phase::Commit, all);
      break;
    default:
      break;
  }
}

void leader_timer(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  if (msg.from != s.self) return;
  auto it = s.pending.find(msg.sequence);
  if (it == s.pending.end()) return;
  Round& r = it->second;
  if (r.timer_serial != msg.round) return;
  if (r.phase == Phase::AwaitCommit || r.phase == Phase::Done ||
      r.phase == Phase::Stalled) {
    return;
  }
  if (!r.widened) {
    r.widened = true;
    restart_round(ctx, r);
    return;
  }
  r.phase = Phase::Stalled;
  ctx.event(EventKind::Stalled, self_id(s), r.sequence, r.digest,
            "quorum unreachable");
}

// ---------------------------------------------------------------------------
// Consensus follower.

void follower_message(Context& ctx, const ProtocolMessage& msg);

void replay_deferred(Context& ctx, std::uint64_t sequence) {
  auto& s = ctx.state();
  std::vector<ProtocolMessage> ready;
  auto keep = std::stable_partition(
      s.deferred.begin(), s.deferred.end(),
      [&](const ProtocolMessage& m) { return m.sequence != sequence; });
  ready.assign(std::make_move_iterator(keep),
               std::make_move_iterator(s.deferred.end()));
  s.deferred.erase(keep, s.deferred.end());
  for (const auto& m : ready) follower_message(ctx, m);
}

// Records (committee, sequence) -> digest; false on a conflicting binding.
bool bind(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  const auto key = std::pair(msg.committee, msg.sequence);
  auto [it, inserted] = s.log.emplace(key, msg.digest);
  if (!inserted && it->second != msg.digest) {
    ctx.event(EventKind::EquivocationAlarm, msg.committee, msg.sequence,
              msg.digest, "sequence already bound to another digest");
    return false;
  }
  return true;
}

void respond(Context& ctx, const ProtocolMessage& msg, MessageKind kind) {
  ProtocolMessage out;
  out.kind = kind;
  out.sequence = msg.sequence;
  out.committee = msg.committee;
  out.digest = msg.digest;
  ctx.send(msg.from, std::move(out));
}

void follower_message(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  if (!from_leader(s, msg)) return;
  const bool classical = s.mode == Mode::Fallback || msg.fallback;

  if (msg.kind == MessageKind::PrePrepare) {
    if (!classical) {
      const auto& a = msg.attestation;
      if (!a || !counter_verify(*a) || a->node != msg.committee ||
          a->value != msg.sequence || a->digest != msg.digest) {
        ctx.event(EventKind::EquivocationAlarm, msg.committee, msg.sequence,
                  msg.digest, "pre-prepare attestation does not verify");
        return;
      }
    }
    if (!bind(ctx, msg)) return;
    if (s.role == Role::PassiveFollower) s.role = Role::ActiveFollower;
    ProtocolMessage prepare;
    prepare.kind = MessageKind::Prepare;
    prepare.sequence = msg.sequence;
    prepare.committee = msg.committee;
    prepare.digest = msg.digest;
    if (!classical) {
      try {
        prepare.attestation = counter_assign(
            s.counter, prepare_token(msg.committee, msg.sequence, msg.digest));
      } catch (const RefusedError& e) {
        ctx.event(EventKind::TeeRefused, msg.committee, msg.sequence,
                  msg.digest, e.what());
        return;
      }
    }
    ctx.send(msg.from, std::move(prepare));
    replay_deferred(ctx, msg.sequence);
    return;
  }

  const auto key = std::pair(msg.committee, msg.sequence);
  auto logged = s.log.find(key);
  switch (msg.kind) {
    case MessageKind::PrepareProof:
    case MessageKind::CommitProof: {
      if (logged == s.log.end()) {
        s.deferred.push_back(msg);
        ctx.event(EventKind::Buffered, msg.committee, msg.sequence, msg.digest);
        return;
      }
      if (logged->second != msg.digest) {
        ctx.event(EventKind::EquivocationAlarm, msg.committee, msg.sequence,
                  msg.digest, "certificate for another digest");
        return;
      }
      if (!verify_multisig(msg.signatures, msg.digest, s.committee.followers(),
                           (classical ? 3u : 2u) * s.committee.f)) {
        ctx.event(EventKind::EquivocationAlarm, msg.committee, msg.sequence,
                  msg.digest, "certificate does not verify");
        return;
      }
      respond(ctx, msg, msg.kind == MessageKind::PrepareProof
                            ? MessageKind::PrepareAck
                            : MessageKind::CommitAck);
      return;
    }
    case MessageKind::Commit: {
      // The verification signature vouches for the prepared certificate, so
      // a freshly activated node may learn the digest here.
      std::set<NodeId> vmembers;
      for (std::size_t m = 0; m < s.verification.members; ++m) {
        vmembers.insert(static_cast<NodeId>(m));
      }
      if (!verify_multisig(msg.signatures, msg.signatures.digest, vmembers,
                           s.verification.quorum())) {
        ctx.event(EventKind::EquivocationAlarm, msg.committee, msg.sequence,
                  msg.digest, "commit without a verification signature");
        return;
      }
      if (!bind(ctx, msg)) return;
      if (s.role == Role::PassiveFollower) s.role = Role::ActiveFollower;
      respond(ctx, msg, MessageKind::CommitVote);
      replay_deferred(ctx, msg.sequence);
      return;
    }
    default:
      return;
  }
}

// ---------------------------------------------------------------------------
// Verification committee.

std::size_t follower_count(const NodeState& s) {
  return s.verification.members - 1;
}

void send_round(Context& ctx) {
  auto& s = ctx.state();
  const auto& ord = *s.ordering;
  ProtocolMessage msg;
  msg.kind = MessageKind::OrderPropose;
  msg.round = ord.round;
  msg.height = ord.block.height;
  msg.digest = ord.block.digest();
  if (ord.round == 0) {
    msg.entries = ord.block.transactions;
    for (const auto& e : msg.entries) msg.payload_bytes += e.payload_bytes;
  }
  for (std::size_t m = 0; m < s.verification.members; ++m) {
    if (m != s.verification.leader) ctx.send(verifier(m), msg);
  }
}

MultiSignature full_signature(const NodeState& s, Digest digest) {
  MultiSignature sig{digest, {}};
  for (std::size_t m = 0; m < s.verification.members; ++m) {
    sig.signers.insert(static_cast<NodeId>(m));
  }
  return sig;
}

void finish_block(Context& ctx);

void advance_ordering(Context& ctx) {
  auto& s = ctx.state();
  // Four leader<->member round trips; with no other members they are free.
  while (s.ordering && s.ordering->votes.size() == follower_count(s)) {
    if (s.ordering->round == 3) {
      finish_block(ctx);
      return;
    }
    ++s.ordering->round;
    s.ordering->votes.clear();
    if (follower_count(s) > 0) send_round(ctx);
  }
}

void start_next_block(Context& ctx) {
  auto& s = ctx.state();
  if (s.ordering || s.queue.empty()) return;
  std::size_t take = s.queue.size();
  if (s.block_capacity > 0) take = std::min(take, s.block_capacity);
  std::vector<BlockEntry> batch(s.queue.begin(), s.queue.begin() + take);
  s.queue.erase(s.queue.begin(), s.queue.begin() + take);
  std::vector<BlockEntry> excluded;
  Block block = total_order(std::move(batch), s.next_height++, s.verification,
                            &excluded);
  for (const auto& e : excluded) {
    ctx.event(EventKind::EntryExcluded, e.committee, e.sequence, e.digest,
              "duplicate or unverifiable entry");
  }
  s.ordering = OrderingRound{std::move(block), 0, {}};
  if (follower_count(s) > 0) send_round(ctx);
  advance_ordering(ctx);
}

void finish_block(Context& ctx) {
  auto& s = ctx.state();
  Block block = std::move(s.ordering->block);
  s.ordering.reset();
  block.signatures = full_signature(s, block.digest());
  std::map<NodeId, std::vector<BlockEntry>> per_committee;
  for (const auto& e : block.transactions) per_committee[e.committee].push_back(e);
  for (auto& [leader, entries] : per_committee) {
    ProtocolMessage notice;
    notice.kind = MessageKind::CommitNotice;
    notice.committee = leader;
    notice.height = block.height;
    notice.digest = block.digest();
    notice.signatures = block.signatures;
    notice.sequence = entries.front().sequence;
    notice.entries = std::move(entries);
    ctx.send(consensus(leader), std::move(notice));
  }
  ctx.event(EventKind::BlockFormed, 0, block.height, block.digest());
  s.blocks.push_back(std::move(block));
  start_next_block(ctx);
}

void release_batch(Context& ctx) {
  auto& s = ctx.state();
  if (s.expected) {
    std::set<NodeId> have;
    for (const auto& e : s.inbox) have.insert(e.committee);
    if (!std::includes(have.begin(), have.end(), s.expected->begin(),
                       s.expected->end())) {
      return;
    }
    s.expected.reset();
  }
  if (s.inbox.empty()) return;
  s.queue.insert(s.queue.end(), std::make_move_iterator(s.inbox.begin()),
                 std::make_move_iterator(s.inbox.end()));
  s.inbox.clear();
  start_next_block(ctx);
}

void verification_leader(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  switch (msg.kind) {
    case MessageKind::BatchOpen:
      s.expected = std::set<NodeId>(msg.committees.begin(), msg.committees.end());
      if (s.expected->empty()) s.expected.reset();
      release_batch(ctx);
      return;
    case MessageKind::AggregatePrepared:
      for (const auto& e : msg.entries) s.inbox.push_back(e);
      release_batch(ctx);
      return;
    case MessageKind::OrderVote: {
      if (!s.ordering || msg.round != s.ordering->round ||
          msg.height != s.ordering->block.height ||
          msg.digest != s.ordering->block.digest()) {
        return;
      }
      s.ordering->votes.insert(msg.from.index);
      advance_ordering(ctx);
      return;
    }
    default:
      return;
  }
}

void verification_follower(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  if (msg.kind != MessageKind::OrderPropose ||
      msg.from != verifier(s.verification.leader)) {
    return;
  }
  if (msg.round == 0) {
    Block candidate = total_order(msg.entries, msg.height, s.verification);
    s.ordering = OrderingRound{std::move(candidate), 0, {}};
  }
  if (!s.ordering || s.ordering->block.height != msg.height ||
      s.ordering->block.digest() != msg.digest) {
    ctx.event(EventKind::EquivocationAlarm, 0, msg.height, msg.digest,
              "proposal does not match the locally ordered block");
    return;
  }
  s.ordering->round = msg.round;
  ProtocolMessage vote;
  vote.kind = MessageKind::OrderVote;
  vote.round = msg.round;
  vote.height = msg.height;
  vote.digest = msg.digest;
  ctx.send(msg.from, std::move(vote));
  if (msg.round == 3) {
    Block block = std::move(s.ordering->block);
    s.ordering.reset();
    block.signatures = full_signature(s, block.digest());
    s.blocks.push_back(std::move(block));
  }
}

void dispatch(Context& ctx, const ProtocolMessage& msg) {
  auto& s = ctx.state();
  switch (s.role) {
    case Role::ConsensusLeader:
      switch (msg.kind) {
        case MessageKind::Request: leader_request(ctx, msg); return;
        case MessageKind::Prepare:
        case MessageKind::PrepareAck:
        case MessageKind::CommitVote:
        case MessageKind::CommitAck: leader_response(ctx, msg); return;
        case MessageKind::CommitNotice: leader_commit_notice(ctx, msg); return;
        case MessageKind::Timer: leader_timer(ctx, msg); return;
        default: return;
      }
    case Role::ActiveFollower:
    case Role::PassiveFollower:
      if (msg.kind == MessageKind::FallbackActivate) {
        if (from_leader(s, msg)) {
          s.mode = Mode::Fallback;
          s.role = Role::ActiveFollower;
        }
        return;
      }
      follower_message(ctx, msg);
      return;
    case Role::VerificationLeader:
      verification_leader(ctx, msg);
      return;
    case Role::VerificationFollower:
      verification_follower(ctx, msg);
      return;
  }
}

}  // namespace

Transition handle_message(NodeState state, const ProtocolMessage& msg,
                          Micros /*now*/) {
  Transition t{std::move(state), {}, {}};
  Context ctx(t);
  dispatch(ctx, msg);
  return t;
}

FallbackResult trigger_fallback(std::vector<NodeState> states, NodeId failed) {
  auto leader_it = std::find_if(states.begin(), states.end(), [](const auto& s) {
    return s.role == Role::ConsensusLeader;
  });
  if (leader_it == states.end()) {
    throw ContractViolation("trigger_fallback: committee has no leader state");
  }
  const auto followers = leader_it->committee.followers();
  if (failed != leader_it->committee.leader && followers.count(failed) == 0) {
    throw ContractViolation("trigger_fallback: node is not in this committee");
  }
  for (auto& s : states) {
    if (s.self == consensus(failed)) s.counter.compromise();
  }
  return enter_fallback(std::move(states));
}

FallbackResult enter_fallback(std::vector<NodeState> states) {
  auto leader_it = std::find_if(states.begin(), states.end(), [](const auto& s) {
    return s.role == Role::ConsensusLeader;
  });
  if (leader_it == states.end()) {
    throw ContractViolation("enter_fallback: committee has no leader state");
  }
  FallbackResult result;
  if (leader_it->mode == Mode::Fallback) {
    result.states = std::move(states);
    return result;
  }

  const std::vector<NodeId> activated = leader_it->committee.passive;
  for (auto& s : states) {
    s.mode = Mode::Fallback;
    s.committee.active.insert(s.committee.active.end(), activated.begin(),
                              activated.end());
    std::sort(s.committee.active.begin(), s.committee.active.end());
    s.committee.passive.clear();
    if (s.role == Role::PassiveFollower) s.role = Role::ActiveFollower;
  }

  Transition t{std::move(*leader_it), {}, {}};
  Context ctx(t);
  for (NodeId j : activated) {
    ProtocolMessage activate;
    activate.kind = MessageKind::FallbackActivate;
    activate.committee = t.state.committee.leader;
    ctx.send(consensus(j), std::move(activate));
  }
  for (auto& [seq, round] : t.state.pending) restart_round(ctx, round);
  auto deferred = std::move(t.state.deferred);
  t.state.deferred.clear();
  for (const auto& request : deferred) leader_request(ctx, request);

  *leader_it = std::move(t.state);
  result.states = std::move(states);
  result.out = std::move(t.out);
  return result;
}

std::vector<NodeState> make_committee(NodeId leader,
                                      const std::vector<NodeId>& active,
                                      const std::vector<NodeId>& passive,
                                      std::uint32_t f,
                                      const VerificationView& view,
                                      bool fallback) {
  CommitteeView cv{leader, active, passive, f};
  std::sort(cv.active.begin(), cv.active.end());
  std::sort(cv.passive.begin(), cv.passive.end());
  auto make = [&](NodeId id, Role role) {
    NodeState s;
    s.self = consensus(id);
    s.role = role;
    s.mode = fallback ? Mode::Fallback : Mode::Normal;
    s.counter = TrustedCounter(id);
    s.committee = cv;
    s.verification = view;
    return s;
  };
  std::vector<NodeState> out;
  out.push_back(make(leader, Role::ConsensusLeader));
  for (NodeId j : cv.active) out.push_back(make(j, Role::ActiveFollower));
  for (NodeId j : cv.passive) out.push_back(make(j, Role::PassiveFollower));
  return out;
}

std::vector<NodeState> make_verification(const VerificationView& view,
                                         std::size_t block_capacity) {
  std::vector<NodeState> out;
  for (std::size_t m = 0; m < view.members; ++m) {
    NodeState s;
    s.self = verifier(m);
    s.role = m == view.leader ? Role::VerificationLeader
                              : Role::VerificationFollower;
    s.verification = view;
    s.block_capacity = block_capacity;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace topcco::protocol
