#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "wqs/envelope.hpp"
#include "wqs/quorum.hpp"

namespace wqs::dwas {

using sim::Payload;
using sim::ReadAck;
using sim::WriteAck;

using Sender = std::function<void(const ProcessId&, Payload)>;

// Per-process storage-client state.  The view is the most up-to-date set of
// changes the process knows; it only grows.  Algorithm-level restarts use a
// fresh op_cnt, so responses to an abandoned attempt are recognizably stale.
struct ClientView {
  std::uint64_t op_cnt = 0;
  ChangeSet view;
};

// One read or write against the weighted-quorum register: phase 1 collects
// (tag, value) cells until the responders form a quorum under the current
// view, phase 2 writes the chosen cell back and waits for a quorum of acks.
//
// Whenever a response carries changes the view does not contain yet, the
// view absorbs them and the whole operation restarts.  The view is merged,
// not overwritten: servers only ever grow their sets, but two servers can
// hold incomparable sets mid-transfer, and replacing the view would let it
// oscillate.  A growth-only view also bounds the number of restarts by the
// number of transfers in the execution.
//
// `excluded` supports the transfer protocol's credit-side refresh read: the
// not-yet-applied credit (and anything equal to it arriving in responses) is
// ignored both for staleness and for quorum arithmetic, so the refresh
// completes under a quorum landscape definable before its own transfer
// completes.
class Session {
 public:
  Session(const SystemConfig& cfg, ProcessId self, ClientView& view,
          std::optional<std::string> write_value,
          std::optional<Change> excluded = std::nullopt);

  void start(const Sender& send);

  // Each returns true when the operation finished with this message.
  bool on_read_ack(const ProcessId& from, const ReadAck& ack,
                   const Sender& send);
  bool on_write_ack(const ProcessId& from, const WriteAck& ack,
                    const Sender& send);

  bool done() const { return done_; }
  const Tag& tag() const { return chosen_tag_; }
  const std::optional<std::string>& value() const { return chosen_val_; }
  std::uint64_t restarts() const { return restarts_; }

 private:
  bool stale(const ChangeSet& incoming) const;
  void absorb(const ChangeSet& incoming);
  bool quorum(const std::set<ProcessId>& responders) const;
  void restart(const Sender& send);

  const SystemConfig& cfg_;
  ProcessId self_;
  ClientView& view_;
  bool is_write_;
  std::optional<std::string> write_value_;
  std::optional<Change> excluded_;

  std::uint64_t attempt_ = 0;  // op_cnt of the current attempt
  int phase_ = 0;
  std::map<ProcessId, RegisterCell> cells_;
  std::set<ProcessId> phase2_acks_;
  Tag chosen_tag_;
  std::optional<std::string> chosen_val_;
  std::uint64_t restarts_ = 0;
  bool done_ = false;
};

}  // namespace wqs::dwas
