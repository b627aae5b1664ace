#pragma once

#include <deque>
#include <optional>
#include <set>

#include "wqs/dwas.hpp"
#include "wqs/quorum.hpp"
#include "wqs/trace.hpp"

namespace wqs::rpwr {

using sim::Payload;
using sim::RcAck;
using sim::RcRequest;
using sim::ReadAck;
using sim::ReadRequest;
using sim::ResComplete;
using sim::TransferAck;
using sim::TransferMsg;
using sim::WcAck;
using sim::WcRequest;
using sim::WriteAck;
using sim::WriteRequest;

// Downstream effects of handling one message or invocation.  The state
// machines never see a clock or the scheduler; everything they can do is
// listed here.
class ServerEffects {
 public:
  virtual void send(const ProcessId& to, Payload payload) = 0;
  virtual void rb_broadcast(const TransferMsg& msg) = 0;
  // A change entered this server's local set (trace bookkeeping).
  virtual void change_applied(const Change& c) = 0;
  virtual void transfer_complete(std::uint64_t op, const ResComplete& r) = 0;
  // Credit-side refresh read lifecycle; returns the internal operation id.
  virtual std::uint64_t refresh_started() = 0;
  virtual void refresh_complete(std::uint64_t op, const Tag& tag,
                                const std::optional<std::string>& value) = 0;
  virtual ~ServerEffects() = default;
};

// Client-side session of the read_changes operation: collect the stored
// changes for one server from f+1 distinct responders, write the union back,
// and return it once n-f servers acknowledged the write-back.
//
// The collection guard is "f+1 distinct responders", not the pseudocode's
// |C| > f: the n initial changes alone satisfy the latter, and the
// containment argument needs the f+1 responder set to intersect every
// (n-f)-sized write-back set.
class ReadChangesSession {
 public:
  ReadChangesSession(const SystemConfig& cfg, ProcessId target,
                     std::uint64_t session)
      : cfg_(cfg), target_(target), session_(session) {}

  void start(const dwas::Sender& send);
  bool on_rc_ack(const ProcessId& from, const RcAck& ack,
                 const dwas::Sender& send);
  bool on_wc_ack(const ProcessId& from, const WcAck& ack);

  const ChangeSet& collected() const { return collected_; }
  const ProcessId& target() const { return target_; }

 private:
  const SystemConfig& cfg_;
  ProcessId target_;
  std::uint64_t session_;
  bool writing_back_ = false;
  std::set<ProcessId> responders_;
  std::set<ProcessId> wc_acks_;
  ChangeSet collected_;
};

// Server state machine for the restricted pairwise weight reassignment,
// plus the storage-side message handlers that share its register.
//
// Incoming change batches (reliable-broadcast transfers and read_changes
// write-backs) are applied in FIFO order through a single work queue.  When
// the next change to apply credits this server, the queue pauses, the server
// refreshes its register with a full storage read (excluding the pending
// credit from the read's quorum arithmetic), and only then inserts the
// credit and acknowledges it.
class ServerCore {
 public:
  ServerCore(const SystemConfig& cfg, ProcessId self);

  // transfer(self, dest, delta); only the server itself can debit its own
  // weight, which is what makes the precondition locally checkable.
  void invoke_transfer(std::uint64_t op, const ProcessId& dest,
                       const Weight& delta, ServerEffects& fx);

  void on_rc(const RcRequest& req, const ProcessId& from, ServerEffects& fx);
  void on_wc(const WcRequest& req, const ProcessId& from, ServerEffects& fx);
  void on_transfer_rb(const TransferMsg& msg, ServerEffects& fx);
  void on_t_ack(const TransferAck& ack, const ProcessId& from,
                ServerEffects& fx);
  void on_r(const ReadRequest& req, const ProcessId& from, ServerEffects& fx);
  void on_w(const WriteRequest& req, const ProcessId& from, ServerEffects& fx);
  // Storage acks may belong to the refresh session.
  void on_read_ack(const ProcessId& from, const ReadAck& ack,
                   ServerEffects& fx);
  void on_write_ack(const ProcessId& from, const WriteAck& ack,
                    ServerEffects& fx);

  ChangeSet get_changes(const ProcessId& s) const {
    return changes_.for_target(s);
  }
  Weight weight() const { return weight_of(changes_, self_); }
  // The transfer guard's basis: the initial weight minus everything this
  // server transferred away, i.e. the self-issued self-targeted changes.
  // Incoming credits are excluded: a credit enters the local set when the
  // pair is first seen, which can be before its transfer completes, and a
  // debit funded by such a credit may itself complete first -- the ledger
  // weight would transiently dip below the floor.  Guarding on guaranteed
  // weight keeps the completed-change weight above the floor under every
  // completion order, and each null it forces is the decision the plain
  // local guard would take under a schedule that delivers the credit later.
  Weight guaranteed_weight() const;
  // The server's storage-client state, shared between refresh reads and any
  // scenario-driven read/write it performs itself.
  dwas::ClientView& client_view() { return view_; }
  const ChangeSet& changes() const { return changes_; }
  const RegisterCell& register_cell() const { return register_; }
  std::uint64_t lc() const { return lc_; }
  bool has_pending_transfer() const { return pending_.has_value(); }
  bool refresh_in_progress() const { return refresh_.has_value(); }

 private:
  struct PendingTransfer {
    std::uint64_t op = 0;
    std::uint64_t counter = 0;
    ProcessId dest;
    Weight delta;
    std::set<ProcessId> acks;
  };

  struct ApplyBatch {
    std::vector<Change> changes;
    std::size_t next = 0;
    bool from_wc = false;
    ProcessId requester;
    std::uint64_t session = 0;
  };

  void pump(ServerEffects& fx);
  void apply(const Change& c, ServerEffects& fx);
  void start_refresh(const Change& credit, ServerEffects& fx);
  void finish_refresh(ServerEffects& fx);
  dwas::Sender sender(ServerEffects& fx);

  const SystemConfig cfg_;
  ProcessId self_;
  Weight threshold_;

  std::uint64_t lc_;  // counter 1 was consumed by the initial change
  ChangeSet changes_;
  RegisterCell register_;
  std::optional<PendingTransfer> pending_;
  std::set<std::pair<ProcessId, std::uint64_t>> acked_;

  std::deque<ApplyBatch> apply_queue_;
  dwas::ClientView view_;
  std::optional<dwas::Session> refresh_;
  std::uint64_t refresh_op_ = 0;
};

}  // namespace wqs::rpwr
