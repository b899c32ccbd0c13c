// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

// Discrete-event driver for the protocol state machines.
//
// Committees run in lockstep epochs. Within an epoch every participating
// committee processes one request; the driver holds
//   AggregatePrepared until every committee has prepared,
//   CommitNotice until the last one would arrive,
//   Reply until every committee has committed,
// so one epoch lasts t_pre + t_cv + t_ver + t_vc + t_com. A committee that
// misses the epoch deadline is declared stalled and leaves the rotation.

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>

#include "topcco/errors.hpp"
#include "topcco/sim.hpp"

namespace topcco::sim {

namespace pr = topcco::protocol;

namespace {

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.tiebreak) > std::tie(b.time, b.tiebreak);
  }
};

struct FaultItem {
  enum class Kind { Crash, TeeFailure, TeeRecovery, Equivocation } kind;
  NodeId node;
};

enum class Stage { Prepare, Verify, Commit };

struct Epoch {
  std::size_t id = 0;
  Micros start{0};
  Stage stage = Stage::Prepare;
  std::map<NodeId, std::size_t> tx;  // leader -> request id
  std::map<NodeId, pr::Outgoing> held;
  std::set<NodeId> released;
  std::map<NodeId, std::pair<Micros, pr::Outgoing>> notices;
  std::set<NodeId> replied;
  Micros pre_end{0};
  Micros cv_end{0};
  Micros ver_end{0};
  Micros notify_end{0};
};

Micros scale(Micros t, double factor) {
  return Micros{static_cast<std::int64_t>(
      std::llround(static_cast<double>(t.count()) * factor))};
}

class Simulator {
 public:
  Simulator(const Instance& instance, const cco::Configuration& config,
            const Workload& workload, const FaultPlan& faults,
            std::uint64_t seed, const SimOptions& options)
      : base_(instance),
        view_(instance),
        config_(config),
        workload_(workload),
        faults_(faults),
        options_(options),
        rng_(seed) {
    auto violations = cco::check_constraints(view_, config_);
    if (!violations.empty()) {
      throw cco::InfeasibleConfiguration(std::move(violations));
    }
    if (workload_.total_requests == 0) {
      throw ContractViolation("workload: total_requests must be positive");
    }
    validate_faults(faults_, instance.node_count());
    for (NodeId i = 0; i < instance.node_count(); ++i) {
      if (instance.nodes[i].tee_failed) failed_tees_.insert(i);
    }
    build_states(/*keep=*/false);
    schedule_workload();
    schedule_faults();
  }

  SimReport run() {
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::Deliver: deliver(ev); break;
        case EventKind::ClientSubmit: submit(ev.index); break;
        case EventKind::FaultInject:
        case EventKind::RecoverTee: fault(ev.index); break;
        case EventKind::OpenEpoch: open_epoch(); break;
        case EventKind::Deadline: deadline(ev.index); break;
      }
    }
    return finish();
  }

 private:
  // ---- scheduling ---------------------------------------------------------

  void push(Event ev) {
    ev.tiebreak = next_tiebreak_++;
    queue_.push(std::move(ev));
  }

  void push_simple(Micros at, EventKind kind, std::size_t index) {
    Event ev;
    ev.time = at;
    ev.kind = kind;
    ev.index = index;
    push(std::move(ev));
  }

  void deliver_at(Micros at, pr::Address to, pr::ProtocolMessage msg) {
    Event ev;
    ev.time = at;
    ev.kind = EventKind::Deliver;
    ev.to = to;
    ev.msg = std::move(msg);
    push(std::move(ev));
  }

  Micros transmission(std::uint64_t bytes) const {
    if (bytes == 0) return Micros{0};
    const double us = static_cast<double>(bytes) * 8.0 /
                      options_.bandwidth_bits_per_second * 1e6;
    return Micros{static_cast<std::int64_t>(std::llround(us))};
  }

  bool slow(const pr::Address& a) const {
    return a.kind == pr::Address::Kind::Consensus &&
           faults_.slow_nodes.count(a.index) != 0;
  }

  Micros link_delay(const pr::Address& from, const pr::Address& to,
                    std::uint64_t bytes) const {
    using K = pr::Address::Kind;
    Micros prop{0};
    if (from.kind == K::Client || to.kind == K::Client) {
      prop = workload_.client_delay;
    } else if (from.kind == K::Consensus && to.kind == K::Consensus) {
      prop = view_.delays(from.index, to.index);
    } else if (from.kind == K::Consensus) {
      prop = view_.delays.to_verification[from.index];
    } else if (to.kind == K::Consensus) {
      prop = view_.delays.from_verification[to.index];
    } else {
      prop = view_.verification.internal_rtts[from.index][to.index];
    }
    if (slow(from) || slow(to)) prop = scale(prop, faults_.slow_multiplier);
    return prop + transmission(bytes);
  }

  // ---- state construction ------------------------------------------------

  pr::VerificationView verification_view() const {
    pr::VerificationView view;
    view.members = view_.verification.member_count;
    view.leader = view_.verification.leader_index;
    for (NodeId leader : config_.leaders()) {
      const auto members = config_.members_of(leader);
      view.committees[leader] = {members.begin(), members.end()};
      view.tolerance[leader] = view_.params.f;
    }
    return view;
  }

  void build_states(bool keep) {
    leaders_ = config_.leaders();
    const auto vview = verification_view();
    const Micros epoch = epoch_estimate();
    stall_timeout_ =
        options_.stall_timeout > Micros{0} ? options_.stall_timeout : 10 * epoch;
    std::map<pr::Address, pr::NodeState> fresh;
    for (NodeId leader : leaders_) {
      const auto members = config_.members_of(leader);
      const auto active = config_.active_of(leader);
      std::vector<NodeId> passive;
      std::set_difference(members.begin(), members.end(), active.begin(),
                          active.end(), std::back_inserter(passive));
      for (auto& s : pr::make_committee(leader, active, passive, view_.params.f,
                                        vview, config_.sigma[leader] != 0)) {
        s.retry_timeout = 3 * epoch;
        fresh[s.self] = std::move(s);
      }
    }
    for (auto& s : pr::make_verification(vview, options_.block_capacity)) {
      fresh[s.self] = std::move(s);
    }
    for (auto& [addr, s] : fresh) {
      auto old = nodes_.find(addr);
      if (keep && old != nodes_.end()) {
        s.counter = old->second.counter;
        s.log = old->second.log;
        s.last_sequence = old->second.last_sequence;
        s.blocks = old->second.blocks;
        s.next_height = old->second.next_height;
      }
      if (addr.kind == pr::Address::Kind::Consensus &&
          failed_tees_.count(addr.index) != 0) {
        s.counter.compromise();
      }
    }
    nodes_ = std::move(fresh);
    dead_.clear();
  }

  // Length of one fault-free epoch including payload transmission.
  Micros epoch_estimate() const {
    const auto lat = cco::evaluate_unchecked(view_, config_);
    const std::size_t p = std::max<std::size_t>(1, config_.committee_count);
    const std::size_t cap =
        options_.block_capacity == 0 ? p : options_.block_capacity;
    const std::size_t blocks = (p + cap - 1) / cap;
    Micros e = lat.t_tr + static_cast<std::int64_t>(blocks - 1) * lat.t_ver +
               transmission(workload_.payload_bytes) *
                   static_cast<std::int64_t>(2 + 4 * p);
    e = scale(e, std::max(1.0, faults_.slow_multiplier));
    return std::max(e, Micros{1});
  }

  // ---- workload ----------------------------------------------------------

  void schedule_workload() {
    const std::size_t p = leaders_.size();
    std::size_t pinned = 0;
    if (workload_.target == Workload::Target::Pinned) {
      auto it = std::find(leaders_.begin(), leaders_.end(),
                          workload_.pinned_leader);
      if (it == leaders_.end()) {
        throw ContractViolation("workload: pinned node is not a leader");
      }
      pinned = static_cast<std::size_t>(it - leaders_.begin());
    }
    report_.transactions.resize(workload_.total_requests);
    backlog_.assign(p, {});
    waiting_.assign(p, {});
    for (std::size_t r = 0; r < workload_.total_requests; ++r) {
      auto& tx = report_.transactions[r];
      tx.id = r;
      const std::size_t slot =
          workload_.target == Workload::Target::Pinned ? pinned : r % p;
      tx.committee = leaders_[slot];
      slot_of_.push_back(slot);
      digests_.push_back(pr::hash_combine({0x7478ULL, r}).value);
    }
    if (workload_.arrival == Workload::Arrival::ClosedLoop) {
      for (std::size_t r = 0; r < workload_.total_requests; ++r) {
        backlog_[slot_of_[r]].push_back(r);
      }
      for (std::size_t c = 0; c < p; ++c) submit_next(c, Micros{0});
    } else {
      if (workload_.rate_per_second <= 0.0) {
        throw ContractViolation("workload: Poisson rate must be positive");
      }
      std::exponential_distribution<double> gap(workload_.rate_per_second);
      double t = 0.0;
      for (std::size_t r = 0; r < workload_.total_requests; ++r) {
        t += gap(rng_);
        const Micros at{static_cast<std::int64_t>(std::llround(t * 1e6))};
        report_.transactions[r].submit = at;
        push_simple(at + workload_.client_delay, EventKind::ClientSubmit, r);
      }
    }
  }

  void submit_next(std::size_t slot, Micros at) {
    if (backlog_[slot].empty()) return;
    const std::size_t r = backlog_[slot].front();
    backlog_[slot].pop_front();
    report_.transactions[r].submit = at;
    push_simple(at + workload_.client_delay, EventKind::ClientSubmit, r);
  }

  void submit(std::size_t r) {
    waiting_[slot_of_[r]].push_back(r);
    push_simple(now_, EventKind::OpenEpoch, 0);
  }

  // ---- faults ------------------------------------------------------------

  void schedule_faults() {
    auto add = [&](const std::map<NodeId, Micros>& m, FaultItem::Kind kind,
                   EventKind ev) {
      for (const auto& [node, at] : m) {
        fault_items_.push_back({kind, node});
        push_simple(at, ev, fault_items_.size() - 1);
      }
    };
    add(faults_.crashes, FaultItem::Kind::Crash, EventKind::FaultInject);
    add(faults_.tee_failures, FaultItem::Kind::TeeFailure,
        EventKind::FaultInject);
    add(faults_.equivocations, FaultItem::Kind::Equivocation,
        EventKind::FaultInject);
    add(faults_.tee_recoveries, FaultItem::Kind::TeeRecovery,
        EventKind::RecoverTee);
  }

  void log_fault(std::string kind, pr::Address at, std::uint64_t seq = 0,
                 std::string detail = {}) {
    report_.fault_log.push_back(
        {now_, std::move(kind), pr::to_string(at), seq, std::move(detail)});
  }

  std::vector<pr::NodeState> committee_states(NodeId leader) const {
    std::vector<pr::NodeState> out{nodes_.at(pr::consensus(leader))};
    for (NodeId j : config_.members_of(leader)) {
      out.push_back(nodes_.at(pr::consensus(j)));
    }
    return out;
  }

  void apply_fallback(pr::FallbackResult result) {
    const pr::Address from = result.states.front().self;
    for (auto& s : result.states) nodes_[s.self] = std::move(s);
    emit(from, std::move(result.out));
  }

  void fault(std::size_t index) {
    const FaultItem item = fault_items_[index];
    const NodeId i = item.node;
    const NodeId leader = config_.leader_of[i];
    switch (item.kind) {
      case FaultItem::Kind::Crash:
        crashed_.insert(i);
        log_fault("Crash", pr::consensus(i));
        return;
      case FaultItem::Kind::TeeFailure: {
        failed_tees_.insert(i);
        log_fault("TeeFailure", pr::consensus(i));
        apply_fallback(pr::trigger_fallback(committee_states(leader), i));
        if (options_.global_fallback) {
          for (NodeId other : leaders_) {
            if (other != leader) {
              apply_fallback(pr::enter_fallback(committee_states(other)));
            }
          }
        }
        if (options_.adaptive) reconfigure_pending_ = true;
        return;
      }
      case FaultItem::Kind::TeeRecovery:
        failed_tees_.erase(i);
        nodes_.at(pr::consensus(i)).counter.restore();
        log_fault("TeeRecovery", pr::consensus(i));
        reconfigure_pending_ = true;
        return;
      case FaultItem::Kind::Equivocation:
        equivocate(i);
        return;
    }
  }

  // A Byzantine leader re-proposes its latest sequence with another digest.
  void equivocate(NodeId leader) {
    if (crashed_.count(leader) != 0) return;
    auto it = nodes_.find(pr::consensus(leader));
    if (it == nodes_.end() || it->second.role != pr::Role::ConsensusLeader) {
      log_fault("Equivocation", pr::consensus(leader), 0, "not a leader");
      return;
    }
    const auto& s = it->second;
    if (s.last_sequence == 0) {
      log_fault("Equivocation", s.self, 0, "no sequence issued yet");
      return;
    }
    pr::ProtocolMessage pp;
    pp.kind = pr::MessageKind::PrePrepare;
    pp.from = s.self;
    pp.committee = leader;
    pp.sequence = s.last_sequence;
    pp.digest = pr::hash_combine({0xbadULL, leader, s.last_sequence});
    pp.payload_bytes = workload_.payload_bytes;
    if (s.mode == pr::Mode::Fallback) {
      pp.fallback = true;
    } else {
      pp.attestation = pr::forge_attestation(s.counter, pp.sequence, pp.digest);
    }
    log_fault("Equivocation", s.self, pp.sequence);
    for (NodeId j : s.committee.followers()) {
      deliver_at(now_ + link_delay(s.self, pr::consensus(j), pp.payload_bytes),
                 pr::consensus(j), pp);
    }
  }

  void reconfigure() {
    reconfigure_pending_ = false;
    Instance solve_view = base_;
    for (NodeId i = 0; i < solve_view.node_count(); ++i) {
      solve_view.nodes[i].tee_failed = failed_tees_.count(i) != 0;
      if (crashed_.count(i) != 0) solve_view.nodes[i].byzantine_rate = 2.0;
    }
    cco::SolveLimits limits = options_.limits;
    limits.min_committees = config_.committee_count;
    limits.max_committees = config_.committee_count;
    cco::Solution next;
    try {
      next = cco::reoptimize_fallback(solve_view, {}, config_, limits);
    } catch (const Error& e) {
      log_fault("ReconfigureFailed", pr::verifier(0), 0, e.what());
      return;
    }
    for (NodeId i = 0; i < view_.node_count(); ++i) {
      view_.nodes[i].tee_failed = failed_tees_.count(i) != 0;
    }
    config_ = next.config;
    build_states(/*keep=*/true);
    ++report_.reconfigurations;
    log_fault("Reconfigured", pr::verifier(0), 0,
              "t_tr " + std::to_string(next.latency.t_tr.count()) + "us");
  }

  // ---- message flow ------------------------------------------------------

  void deliver(const Event& ev) {
    if (ev.to.kind == pr::Address::Kind::Consensus &&
        crashed_.count(ev.to.index) != 0) {
      return;
    }
    auto it = nodes_.find(ev.to);
    if (it == nodes_.end()) return;
    if (options_.record_trace && ev.msg.kind != pr::MessageKind::Timer) {
      report_.trace.push_back({now_, pr::to_string(ev.msg.from),
                               pr::to_string(ev.to), pr::to_string(ev.msg.kind),
                               ev.msg.committee, ev.msg.sequence});
    }
    if (epoch_ && ev.msg.kind == pr::MessageKind::AggregatePrepared) {
      epoch_->cv_end = std::max(epoch_->cv_end, now_);
    }
    const auto key = std::pair(ev.msg.committee, ev.msg.sequence);
    const auto before = it->second.log.find(key);
    const bool was_bound = before != it->second.log.end();
    const pr::Digest bound = was_bound ? before->second : pr::Digest{};

    auto t = pr::handle_message(it->second, ev.msg, now_);
    it->second = std::move(t.state);

    if (was_bound) {
      auto after = it->second.log.find(key);
      if (after == it->second.log.end() || after->second != bound) {
        ++report_.safety.rebinds;
      }
    }
    for (const auto& e : t.events) {
      if (e.kind == pr::EventKind::Committed ||
          e.kind == pr::EventKind::BlockFormed ||
          e.kind == pr::EventKind::Buffered) {
        continue;
      }
      log_fault(pr::to_string(e.kind), e.at, e.sequence, e.detail);
    }
    emit(ev.to, std::move(t.out));
  }

  void emit(pr::Address from, std::vector<pr::Outgoing> out) {
    for (auto& o : out) {
      if (o.timer_delay > Micros{0}) {
        deliver_at(now_ + o.timer_delay, o.to, std::move(o.msg));
        continue;
      }
      switch (o.msg.kind) {
        case pr::MessageKind::AggregatePrepared: hold_aggregate(std::move(o)); break;
        case pr::MessageKind::CommitNotice: hold_notice(std::move(o)); break;
        case pr::MessageKind::Reply: reply(std::move(o)); break;
        default: {
          const Micros at = now_ + link_delay(from, o.to, o.msg.payload_bytes);
          deliver_at(at, o.to, std::move(o.msg));
        }
      }
    }
  }

  // ---- epochs ------------------------------------------------------------

  void open_epoch() {
    if (epoch_) return;
    if (reconfigure_pending_) reconfigure();
    Epoch e;
    e.id = next_epoch_++;
    e.start = now_;
    for (std::size_t slot = 0; slot < leaders_.size(); ++slot) {
      if (dead_.count(slot) != 0 || waiting_[slot].empty()) continue;
      const std::size_t r = waiting_[slot].front();
      waiting_[slot].pop_front();
      const NodeId leader = leaders_[slot];
      e.tx[leader] = r;
      report_.transactions[r].start = now_;
      report_.transactions[r].committee = leader;
      pr::ProtocolMessage req;
      req.kind = pr::MessageKind::Request;
      req.from = pr::client(leader);
      req.committee = leader;
      req.digest = {digests_[r]};
      req.payload_bytes = workload_.payload_bytes;
      deliver_at(now_, pr::consensus(leader), std::move(req));
    }
    if (e.tx.empty()) return;
    push_simple(now_ + stall_timeout_, EventKind::Deadline, e.id);
    epoch_ = std::move(e);
  }

  void hold_aggregate(pr::Outgoing o) {
    const NodeId k = o.msg.committee;
    if (!epoch_ || epoch_->stage != Stage::Prepare || epoch_->tx.count(k) == 0 ||
        epoch_->held.count(k) != 0) {
      return;
    }
    epoch_->held.emplace(k, std::move(o));
    progress();
  }

  void release_aggregates() {
    auto& e = *epoch_;
    e.stage = Stage::Verify;
    e.pre_end = now_;
    e.cv_end = now_;
    pr::ProtocolMessage open;
    open.kind = pr::MessageKind::BatchOpen;
    const auto vleader = pr::verifier(view_.verification.leader_index);
    open.from = vleader;
    for (const auto& [k, o] : e.held) open.committees.push_back(k);
    deliver_at(now_, vleader, std::move(open));
    for (auto& [k, o] : e.held) {
      e.released.insert(k);
      const Micros at =
          now_ + link_delay(pr::consensus(k), o.to, o.msg.payload_bytes);
      deliver_at(at, o.to, std::move(o.msg));
    }
    e.held.clear();
  }

  void hold_notice(pr::Outgoing o) {
    const NodeId k = o.msg.committee;
    if (!epoch_ || epoch_->stage != Stage::Verify ||
        epoch_->released.count(k) == 0 || epoch_->notices.count(k) != 0) {
      return;
    }
    epoch_->ver_end = std::max(epoch_->ver_end, now_);
    const Micros at = now_ + link_delay(o.msg.from, o.to, o.msg.payload_bytes);
    epoch_->notices.emplace(k, std::pair(at, std::move(o)));
    progress();
  }

  void release_notices() {
    auto& e = *epoch_;
    e.stage = Stage::Commit;
    Micros last = now_;
    for (const auto& [k, n] : e.notices) last = std::max(last, n.first);
    e.notify_end = last;
    for (auto& [k, n] : e.notices) deliver_at(last, n.second.to, std::move(n.second.msg));
    e.notices.clear();
  }

  void reply(pr::Outgoing o) {
    const NodeId k = o.msg.committee;
    if (!epoch_ || epoch_->stage != Stage::Commit ||
        epoch_->released.count(k) == 0 ||
        digests_[epoch_->tx.at(k)] != o.msg.digest.value) {
      if (epoch_ && epoch_->tx.count(k) != 0 &&
          digests_[epoch_->tx.at(k)] != o.msg.digest.value) {
        ++report_.safety.accepted_equivocations;
      }
      return;
    }
    epoch_->replied.insert(k);
    progress();
  }

  void progress() {
    if (!epoch_) return;
    auto& e = *epoch_;
    if (e.stage == Stage::Prepare && e.held.size() == e.tx.size()) {
      release_aggregates();
    }
    if (e.stage == Stage::Verify && e.notices.size() == e.released.size()) {
      release_notices();
    }
    if (e.stage == Stage::Commit && e.replied.size() == e.released.size()) {
      close_epoch();
    }
  }

  void stall(NodeId leader) {
    auto& e = *epoch_;
    const std::size_t slot = static_cast<std::size_t>(
        std::find(leaders_.begin(), leaders_.end(), leader) - leaders_.begin());
    dead_.insert(slot);
    report_.transactions[e.tx.at(leader)].stalled = true;
    e.tx.erase(leader);
    e.released.erase(leader);
    e.held.erase(leader);
    e.notices.erase(leader);
    log_fault("CommitteeStalled", pr::consensus(leader));
  }

  void deadline(std::size_t id) {
    if (!epoch_ || epoch_->id != id) return;
    auto& e = *epoch_;
    std::vector<NodeId> missing;
    for (const auto& [k, r] : e.tx) {
      const bool ok = e.stage == Stage::Prepare  ? e.held.count(k) != 0
                      : e.stage == Stage::Verify ? e.notices.count(k) != 0
                                                 : e.replied.count(k) != 0;
      if (!ok) missing.push_back(k);
    }
    for (NodeId k : missing) stall(k);
    if (e.tx.empty()) {
      epoch_.reset();
      push_simple(now_, EventKind::OpenEpoch, 0);
      return;
    }
    progress();
  }

  void close_epoch() {
    auto& e = *epoch_;
    for (const auto& [k, r] : e.tx) {
      auto& tx = report_.transactions[r];
      tx.commit = now_;
      tx.committed = true;
      tx.phases.t_pre = e.pre_end - e.start;
      tx.phases.t_cv = e.cv_end - e.pre_end;
      tx.phases.t_ver = e.ver_end - e.cv_end;
      tx.phases.t_vc = e.notify_end - e.ver_end;
      tx.phases.t_com = now_ - e.notify_end;
      tx.phases.t_tr = now_ - e.start;
      last_reply_ = std::max(last_reply_, now_ + workload_.client_delay);
      if (workload_.arrival == Workload::Arrival::ClosedLoop) {
        submit_next(slot_of_[r], now_ + workload_.client_delay);
      }
    }
    epoch_.reset();
    push_simple(now_, EventKind::OpenEpoch, 0);
  }

  // ---- report ------------------------------------------------------------

  SimReport finish() {
    auto& rep = report_;
    cco::LatencyBreakdown sum;
    for (auto& tx : rep.transactions) {
      if (tx.committed) {
        ++rep.committed;
        sum.t_pre += tx.phases.t_pre;
        sum.t_cv += tx.phases.t_cv;
        sum.t_ver += tx.phases.t_ver;
        sum.t_vc += tx.phases.t_vc;
        sum.t_com += tx.phases.t_com;
        sum.t_tr += tx.phases.t_tr;
      } else {
        tx.stalled = true;
      }
    }
    rep.stalled = rep.transactions.size() - rep.committed;
    rep.in_flight = 0;
    if (rep.committed > 0) {
      const auto n = static_cast<std::int64_t>(rep.committed);
      rep.phase_mean = {sum.t_pre / n, sum.t_cv / n,  sum.t_ver / n,
                        sum.t_vc / n,  sum.t_com / n, sum.t_tr / n};
    }
    rep.wall_time = last_reply_;
    if (rep.committed > 0 && rep.wall_time > Micros{0}) {
      rep.throughput = static_cast<double>(rep.committed) /
                       (static_cast<double>(rep.wall_time.count()) / 1e6);
    }
    audit();
    return std::move(rep);
  }

  void audit() {
    const std::vector<pr::Block>* reference = nullptr;
    for (const auto& [addr, s] : nodes_) {
      if (addr.kind == pr::Address::Kind::Verification) {
        if (reference == nullptr) {
          reference = &s.blocks;
          report_.blocks = s.blocks.size();
        } else if (s.blocks != *reference) {
          ++report_.safety.block_mismatches;
        }
        continue;
      }
      const auto& bindings = s.counter.bindings();
      std::uint64_t expect = 1;
      for (const auto& [value, digest] : bindings) {
        if (value != expect++) ++report_.safety.counter_gaps;
      }
      if (bindings.size() != s.counter.value()) ++report_.safety.counter_gaps;
    }
    // Committed entries must agree across blocks.
    std::map<std::pair<NodeId, std::uint64_t>, pr::Digest> committed;
    if (reference != nullptr) {
      for (const auto& b : *reference) {
        for (const auto& e : b.transactions) {
          auto [it, fresh] = committed.emplace(std::pair(e.committee, e.sequence),
                                               e.digest);
          if (!fresh && it->second != e.digest) {
            ++report_.safety.accepted_equivocations;
          }
        }
      }
    }
  }

  const Instance& base_;
  Instance view_;
  cco::Configuration config_;
  Workload workload_;
  FaultPlan faults_;
  SimOptions options_;
  std::mt19937_64 rng_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_tiebreak_ = 0;
  Micros now_{0};

  std::map<pr::Address, pr::NodeState> nodes_;
  std::vector<NodeId> leaders_;
  std::set<NodeId> crashed_;
  std::set<NodeId> failed_tees_;
  std::vector<FaultItem> fault_items_;
  bool reconfigure_pending_ = false;
  Micros stall_timeout_{0};

  std::vector<std::size_t> slot_of_;
  std::vector<std::uint64_t> digests_;
  std::vector<std::deque<std::size_t>> backlog_;
  std::vector<std::deque<std::size_t>> waiting_;
  std::set<std::size_t> dead_;

  std::optional<Epoch> epoch_;
  std::size_t next_epoch_ = 0;
  Micros last_reply_{0};
  SimReport report_;
};

}  // namespace

SimReport run(const Instance& instance, const cco::Configuration& config,
              const Workload& workload, const FaultPlan& faults,
              std::uint64_t seed, const SimOptions& options) {
  return Simulator(instance, config, workload, faults, seed, options).run();
}

std::vector<Micros> SimReport::per_tx_latency() const {
  std::vector<Micros> out;
  for (const auto& tx : transactions) {
    if (tx.committed) out.push_back(tx.latency());
  }
  return out;
}

}  // namespace topcco::sim
