#include "wqs/dwas.hpp"

#include <cassert>

namespace wqs::dwas {

using sim::ReadRequest;
using sim::WriteRequest;

Session::Session(const SystemConfig& cfg, ProcessId self, ClientView& view,
                 std::optional<std::string> write_value,
                 std::optional<Change> excluded)
    : cfg_(cfg),
      self_(self),
      view_(view),
      is_write_(write_value.has_value()),
      write_value_(std::move(write_value)),
      excluded_(std::move(excluded)) {}

void Session::start(const Sender& send) {
  attempt_ = ++view_.op_cnt;
  phase_ = 1;
  cells_.clear();
  phase2_acks_.clear();
  for (const auto& s : cfg_.servers()) {
    send(s, ReadRequest{attempt_});
  }
}

bool Session::stale(const ChangeSet& incoming) const {
  for (const auto& c : incoming) {
    if (excluded_ && c == *excluded_) {
      continue;
    }
    if (!view_.view.contains(c)) {
      return true;
    }
  }
  return false;
}

void Session::absorb(const ChangeSet& incoming) {
  for (const auto& c : incoming) {
    if (excluded_ && c == *excluded_) {
      continue;
    }
    view_.view.insert(c);
  }
}

bool Session::quorum(const std::set<ProcessId>& responders) const {
  const ChangeSet eff =
      excluded_ ? view_.view.without(*excluded_) : view_.view;
  return is_quorum(eff, responders, cfg_);
}

void Session::restart(const Sender& send) {
  ++restarts_;
  start(send);
}

bool Session::on_read_ack(const ProcessId& from, const ReadAck& ack,
                          const Sender& send) {
  if (done_ || phase_ != 1 || ack.op_cnt != attempt_) {
    return false;
  }
  if (stale(ack.changes)) {
    absorb(ack.changes);
    restart(send);
    return false;
  }
  cells_[from] = ack.cell;
  std::set<ProcessId> responders;
  for (const auto& [pid, cell] : cells_) {
    responders.insert(pid);
  }
  if (!quorum(responders)) {
    return false;
  }
  // Highest-tag cell wins; a write bumps its timestamp and claims it.
  RegisterCell best;
  for (const auto& [pid, cell] : cells_) {
    if (best.tag < cell.tag) {
      best = cell;
    }
  }
  if (is_write_) {
    chosen_tag_ = Tag{best.tag.ts + 1, self_};
    chosen_val_ = write_value_;
  } else {
    chosen_tag_ = best.tag;
    chosen_val_ = best.val;
  }
  phase_ = 2;
  for (const auto& s : cfg_.servers()) {
    send(s, WriteRequest{attempt_, chosen_tag_, chosen_val_});
  }
  return false;
}

bool Session::on_write_ack(const ProcessId& from, const WriteAck& ack,
                           const Sender& send) {
  if (done_ || phase_ != 2 || ack.op_cnt != attempt_) {
    return false;
  }
  if (stale(ack.changes)) {
    absorb(ack.changes);
    restart(send);
    return false;
  }
  phase2_acks_.insert(from);
  if (!quorum(phase2_acks_)) {
    return false;
  }
  done_ = true;
  return true;
}

}  // namespace wqs::dwas
