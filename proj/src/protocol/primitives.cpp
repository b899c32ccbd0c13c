// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>

#include "topcco/errors.hpp"
#include "topcco/protocol.hpp"

namespace topcco::protocol {

namespace {

// Key held "inside" the emulated enclaves.
constexpr std::uint64_t kEnclaveKey = 0x5eed'7ee5'c0de'1234ULL;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t attestation_mac(NodeId node, std::uint64_t value, Digest digest) {
  return hash_combine({kEnclaveKey, node, value, digest.value}).value;
}

}  // namespace

Digest hash_combine(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto p : parts) h = mix(h ^ mix(p));
  return {h};
}

CounterAttestation counter_assign(TrustedCounter& counter, Digest digest) {
  if (counter.compromised_) {
    throw RefusedError("trusted counter of node " +
                       std::to_string(counter.node_) + " is compromised");
  }
  const std::uint64_t value = ++counter.value_;
  counter.bound_.emplace(value, digest);
  return {counter.node_, value, digest, true,
          attestation_mac(counter.node_, value, digest)};
}

bool counter_verify(const CounterAttestation& a) {
  return a.valid && a.mac == attestation_mac(a.node, a.value, a.digest);
}

CounterAttestation forge_attestation(const TrustedCounter& counter,
                                     std::uint64_t value, Digest digest) {
  return {counter.node(), value, digest, false, 0};
}

bool verify_multisig(const MultiSignature& sig, Digest expected,
                     const std::set<NodeId>& allowed, std::size_t threshold) {
  if (sig.digest != expected || sig.signers.size() < threshold) return false;
  return std::includes(allowed.begin(), allowed.end(), sig.signers.begin(),
                       sig.signers.end());
}

Digest prepare_token(NodeId committee, std::uint64_t sequence, Digest digest) {
  return hash_combine({0x707265ULL, committee, sequence, digest.value});
}

Digest Block::digest() const {
  Digest d = hash_combine({0x626c6bULL, height});
  for (const auto& t : transactions) {
    d = hash_combine({d.value, t.committee, t.sequence, t.digest.value});
  }
  return d;
}

std::string to_string(const Address& a) {
  switch (a.kind) {
    case Address::Kind::Consensus: return "c" + std::to_string(a.index);
    case Address::Kind::Verification: return "v" + std::to_string(a.index);
    case Address::Kind::Client: return "client" + std::to_string(a.index);
  }
  return "?";
}

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Request: return "Request";
    case MessageKind::PrePrepare: return "PrePrepare";
    case MessageKind::Prepare: return "Prepare";
    case MessageKind::PrepareProof: return "PrepareProof";
    case MessageKind::PrepareAck: return "PrepareAck";
    case MessageKind::AggregatePrepared: return "AggregatePrepared";
    case MessageKind::BatchOpen: return "BatchOpen";
    case MessageKind::OrderPropose: return "OrderPropose";
    case MessageKind::OrderVote: return "OrderVote";
    case MessageKind::CommitNotice: return "CommitNotice";
    case MessageKind::Commit: return "Commit";
    case MessageKind::CommitVote: return "CommitVote";
    case MessageKind::CommitProof: return "CommitProof";
    case MessageKind::CommitAck: return "CommitAck";
    case MessageKind::Reply: return "Reply";
    case MessageKind::FallbackActivate: return "FallbackActivate";
    case MessageKind::Timer: return "Timer";
  }
  return "?";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::EquivocationAlarm: return "EquivocationAlarm";
    case EventKind::InvalidAttestation: return "InvalidAttestation";
    case EventKind::Buffered: return "Buffered";
    case EventKind::Stalled: return "Stalled";
    case EventKind::Committed: return "Committed";
    case EventKind::TeeRefused: return "TeeRefused";
    case EventKind::BlockFormed: return "BlockFormed";
    case EventKind::EntryExcluded: return "EntryExcluded";
  }
  return "?";
}

std::set<NodeId> CommitteeView::followers() const {
  std::set<NodeId> out(active.begin(), active.end());
  out.insert(passive.begin(), passive.end());
  return out;
}

std::size_t VerificationView::quorum() const {
  return 2 * ((members - 1) / 3) + 1;
}

Block total_order(std::vector<BlockEntry> batch, std::uint64_t height,
                  const VerificationView& view,
                  std::vector<BlockEntry>* excluded) {
  std::stable_sort(batch.begin(), batch.end(),
                   [](const BlockEntry& a, const BlockEntry& b) {
                     return std::pair(a.committee, a.sequence) <
                            std::pair(b.committee, b.sequence);
                   });
  Block block;
  block.height = height;
  for (auto& entry : batch) {
    bool ok = true;
    if (!block.transactions.empty()) {
      const auto& last = block.transactions.back();
      ok = !(last.committee == entry.committee &&
             last.sequence == entry.sequence);
    }
    if (ok) {
      auto members = view.committees.find(entry.committee);
      auto tol = view.tolerance.find(entry.committee);
      ok = members != view.committees.end() && tol != view.tolerance.end() &&
           verify_multisig(entry.certificate, entry.digest, members->second,
                           (entry.fallback ? 3u : 2u) * tol->second);
    }
    if (ok) {
      block.transactions.push_back(std::move(entry));
    } else if (excluded != nullptr) {
      excluded->push_back(std::move(entry));
    }
  }
  return block;
}

}  // namespace topcco::protocol
