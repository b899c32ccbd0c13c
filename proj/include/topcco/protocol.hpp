// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topcco/model.hpp"

namespace topcco::protocol {

// Collision-free message digest token.
struct Digest {
  std::uint64_t value = 0;
  auto operator<=>(const Digest&) const = default;
};

Digest hash_combine(std::initializer_list<std::uint64_t> parts);

// ---------------------------------------------------------------------------
// Trusted monotonic counter (software emulation of the enclave service).

struct CounterAttestation {
  NodeId node = 0;
  std::uint64_t value = 0;
  Digest digest;
  bool valid = false;
  std::uint64_t mac = 0;

  bool operator==(const CounterAttestation&) const = default;
};

class TrustedCounter {
 public:
  explicit TrustedCounter(NodeId node = 0) : node_(node) {}

  NodeId node() const { return node_; }
  std::uint64_t value() const { return value_; }
  bool compromised() const { return compromised_; }

  // Models a TEE failure; from then on assignments are refused.
  void compromise() { compromised_ = true; }
  void restore() { compromised_ = false; }

  // Every value handed out so far and the digest it is bound to.
  const std::map<std::uint64_t, Digest>& bindings() const { return bound_; }

 private:
  friend CounterAttestation counter_assign(TrustedCounter&, Digest);

  NodeId node_;
  std::uint64_t value_ = 0;
  bool compromised_ = false;
  std::map<std::uint64_t, Digest> bound_;
};

// Increments the counter and binds the new value to `digest`. Throws
// RefusedError when the counter is compromised.
CounterAttestation counter_assign(TrustedCounter& counter, Digest digest);

// True iff produced by counter_assign on a healthy counter and unmodified.
bool counter_verify(const CounterAttestation& attestation);

// What a failed enclave can still emit: an attestation that never verifies.
CounterAttestation forge_attestation(const TrustedCounter& counter,
                                     std::uint64_t value, Digest digest);

// ---------------------------------------------------------------------------
// Multi-signature abstraction: a signer set over a digest.

struct MultiSignature {
  Digest digest;
  std::set<NodeId> signers;
  bool operator==(const MultiSignature&) const = default;
};

// Signers must be a subset of `allowed`, at least `threshold` of them, over
// `expected`.
bool verify_multisig(const MultiSignature& sig, Digest expected,
                     const std::set<NodeId>& allowed, std::size_t threshold);

// ---------------------------------------------------------------------------
// Addresses and messages.

struct Address {
  enum class Kind : std::uint8_t { Consensus, Verification, Client };
  Kind kind = Kind::Consensus;
  std::uint32_t index = 0;
  auto operator<=>(const Address&) const = default;
};

inline Address consensus(NodeId i) { return {Address::Kind::Consensus, i}; }
inline Address verifier(std::size_t m) {
  return {Address::Kind::Verification, static_cast<std::uint32_t>(m)};
}
// The client attached to committee `leader`.
inline Address client(NodeId leader) { return {Address::Kind::Client, leader}; }

std::string to_string(const Address& a);

enum class MessageKind : std::uint8_t {
  Request,
  PrePrepare,
  Prepare,
  PrepareProof,  // leader shares the aggregated prepare certificate
  PrepareAck,
  AggregatePrepared,
  BatchOpen,  // driver tells the verification leader which committees to await
  OrderPropose,
  OrderVote,
  CommitNotice,
  Commit,
  CommitVote,
  CommitProof,
  CommitAck,
  Reply,
  FallbackActivate,
  Timer,
};

const char* to_string(MessageKind kind);

// One ordered transaction inside a block.
struct BlockEntry {
  NodeId committee = 0;
  std::uint64_t sequence = 0;
  Digest digest;
  MultiSignature certificate;
  bool fallback = false;
  std::uint64_t payload_bytes = 0;
  bool operator==(const BlockEntry&) const = default;
};

struct Block {
  std::uint64_t height = 0;
  std::vector<BlockEntry> transactions;
  MultiSignature signatures;
  Digest digest() const;
  bool operator==(const Block&) const = default;
};

struct ProtocolMessage {
  MessageKind kind = MessageKind::Request;
  Address from;
  std::uint64_t sequence = 0;
  NodeId committee = 0;
  std::uint64_t payload_bytes = 0;
  Digest digest;
  std::optional<CounterAttestation> attestation;
  MultiSignature signatures;
  // OrderPropose/OrderVote round, or the timer serial.
  std::uint32_t round = 0;
  std::uint64_t height = 0;
  std::vector<BlockEntry> entries;
  std::vector<NodeId> committees;
  bool fallback = false;
};

// Digest a follower attests to when preparing (committee, sequence, digest).
Digest prepare_token(NodeId committee, std::uint64_t sequence, Digest digest);

// ---------------------------------------------------------------------------
// Replica state.

enum class Role : std::uint8_t {
  ConsensusLeader,
  ActiveFollower,
  PassiveFollower,
  VerificationLeader,
  VerificationFollower,
};

enum class Mode : std::uint8_t { Normal, Fallback };

struct CommitteeView {
  NodeId leader = 0;
  std::vector<NodeId> active;
  std::vector<NodeId> passive;
  std::uint32_t f = 1;

  std::set<NodeId> followers() const;
};

struct VerificationView {
  std::size_t members = 1;
  std::size_t leader = 0;
  // Committee leader -> its followers, used to check prepare certificates.
  std::map<NodeId, std::set<NodeId>> committees;
  std::map<NodeId, std::uint32_t> tolerance;
  std::size_t quorum() const;
};

enum class Phase : std::uint8_t {
  PrePrepare,
  PrepareProof,
  AwaitCommit,
  Commit,
  CommitProof,
  Done,
  Stalled,
};

// Leader-side bookkeeping for one in-flight sequence number.
struct Round {
  std::uint64_t sequence = 0;
  Digest digest;
  std::uint64_t payload_bytes = 0;
  std::optional<CounterAttestation> attestation;
  Phase phase = Phase::PrePrepare;
  std::set<NodeId> participants;
  std::set<NodeId> responded;
  MultiSignature certificate;
  MultiSignature block_proof;
  Digest block_digest;
  bool widened = false;
  std::uint32_t timer_serial = 0;
};

struct OrderingRound {
  Block block;
  std::uint32_t round = 0;
  std::set<std::size_t> votes;
};

struct NodeState {
  Address self;
  Role role = Role::ActiveFollower;
  Mode mode = Mode::Normal;
  TrustedCounter counter;
  // (committee, sequence) -> digest; never rebound.
  std::map<std::pair<NodeId, std::uint64_t>, Digest> log;

  // Consensus nodes.
  CommitteeView committee;
  std::map<std::uint64_t, Round> pending;
  std::uint64_t last_sequence = 0;
  std::vector<ProtocolMessage> deferred;  // requests refused by a failed TEE
  std::map<std::uint64_t, Digest> replied;

  // Verification nodes (consensus leaders use `verification.leader` too).
  VerificationView verification;
  std::optional<std::set<NodeId>> expected;  // committees awaited this batch
  std::vector<BlockEntry> inbox;
  std::vector<BlockEntry> queue;
  std::optional<OrderingRound> ordering;
  std::uint64_t next_height = 1;
  std::vector<Block> blocks;
  std::size_t block_capacity = 0;  // 0 = unbounded

  // Per-phase retry timer for consensus leaders; zero disables timers.
  Micros retry_timeout{0};
};

struct Outgoing {
  Address to;
  ProtocolMessage msg;
  // Local timers only: fire after this delay instead of a network hop.
  Micros timer_delay{0};
};

enum class EventKind : std::uint8_t {
  EquivocationAlarm,
  InvalidAttestation,
  Buffered,
  Stalled,
  Committed,
  TeeRefused,
  BlockFormed,
  EntryExcluded,
};

const char* to_string(EventKind kind);

struct ProtocolEvent {
  EventKind kind;
  Address at;
  NodeId committee = 0;
  std::uint64_t sequence = 0;
  Digest digest;
  std::string detail;
};

struct Transition {
  NodeState state;
  std::vector<Outgoing> out;
  std::vector<ProtocolEvent> events;
};

// Pure transition function. Handles phases 2-6 for every role.
Transition handle_message(NodeState state, const ProtocolMessage& msg,
                          Micros now);

// Deterministic total order over verified entries: sorted by (committee,
// sequence); duplicates and entries failing `verify` are excluded and
// reported through `excluded`.
Block total_order(std::vector<BlockEntry> batch, std::uint64_t height,
                  const VerificationView& view,
                  std::vector<BlockEntry>* excluded = nullptr);

// Switches a committee (leader first, then its followers in any order) to
// classical 3f+1 operation. Idempotent.
struct FallbackResult {
  std::vector<NodeState> states;
  std::vector<Outgoing> out;
};
FallbackResult trigger_fallback(std::vector<NodeState> states, NodeId failed);

// The mode switch of trigger_fallback without marking any TEE as failed.
FallbackResult enter_fallback(std::vector<NodeState> states);

// Builds the states for one committee of a configuration.
std::vector<NodeState> make_committee(NodeId leader,
                                      const std::vector<NodeId>& active,
                                      const std::vector<NodeId>& passive,
                                      std::uint32_t f,
                                      const VerificationView& view,
                                      bool fallback);

std::vector<NodeState> make_verification(const VerificationView& view,
                                         std::size_t block_capacity);

}  // namespace topcco::protocol
