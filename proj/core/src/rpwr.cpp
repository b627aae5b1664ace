#include "wqs/rpwr.hpp"

#include <cassert>

namespace wqs::rpwr {

void ReadChangesSession::start(const dwas::Sender& send) {
  for (const auto& s : cfg_.servers()) {
    send(s, RcRequest{target_, session_});
  }
}

bool ReadChangesSession::on_rc_ack(const ProcessId& from, const RcAck& ack,
                                   const dwas::Sender& send) {
  if (writing_back_ || ack.session != session_) {
    return false;
  }
  responders_.insert(from);
  collected_ = merge(collected_, ack.changes);
  if (responders_.size() < std::size_t(cfg_.f()) + 1) {
    return false;
  }
  writing_back_ = true;
  for (const auto& s : cfg_.servers()) {
    send(s, WcRequest{session_, collected_});
  }
  return false;
}

bool ReadChangesSession::on_wc_ack(const ProcessId& from, const WcAck& ack) {
  if (!writing_back_ || ack.session != session_) {
    return false;
  }
  wc_acks_.insert(from);
  return wc_acks_.size() >= std::size_t(cfg_.n() - cfg_.f());
}

ServerCore::ServerCore(const SystemConfig& cfg, ProcessId self)
    : cfg_(cfg),
      self_(self),
      threshold_(min_weight_threshold(cfg)),
      lc_(2),
      changes_(cfg.initial_changes()) {
  view_.view = cfg_.initial_changes();
}

dwas::Sender ServerCore::sender(ServerEffects& fx) {
  return [&fx](const ProcessId& to, Payload p) {
    fx.send(to, std::move(p));
  };
}

Weight ServerCore::guaranteed_weight() const {
  Weight sum;
  for (const auto& c : changes_) {
    if (c.issuer == self_ && c.target == self_) {
      sum += c.delta;
    }
  }
  return sum;
}

void ServerCore::invoke_transfer(std::uint64_t op, const ProcessId& dest,
                                 const Weight& delta, ServerEffects& fx) {
  if (pending_) {
    throw sim::ScenarioError(self_.name() +
                             ": transfer while one is still pending");
  }
  if (!cfg_.is_valid_server(dest) || dest == self_) {
    throw sim::ScenarioError(self_.name() + ": bad transfer destination");
  }
  if (!delta.is_positive()) {
    throw sim::ScenarioError(self_.name() +
                             ": transfer delta must be positive");
  }
  if (guaranteed_weight() > delta + threshold_) {
    const Change debit{self_, lc_, self_, -delta};
    const Change credit{self_, lc_, dest, delta};
    changes_.insert(debit);
    fx.change_applied(debit);
    changes_.insert(credit);
    fx.change_applied(credit);
    pending_ = PendingTransfer{op, lc_, dest, delta, {}};
    fx.rb_broadcast(TransferMsg{debit, credit});
  } else {
    // Null transfer: the zero-weight pair is reported but never stored.
    const ResComplete res{Change{self_, lc_, self_, Weight(0)},
                          Change{self_, lc_, dest, Weight(0)}};
    ++lc_;
    fx.transfer_complete(op, res);
  }
}

void ServerCore::on_t_ack(const TransferAck& ack, const ProcessId& from,
                          ServerEffects& fx) {
  if (!pending_ || ack.counter != pending_->counter || from == self_) {
    return;
  }
  pending_->acks.insert(from);
  if (pending_->acks.size() < std::size_t(cfg_.n() - cfg_.f() - 1)) {
    return;
  }
  // n-f-1 other servers plus our own copy: the pair is now durable at n-f
  // servers and the transfer is complete.
  const ResComplete res{
      Change{self_, pending_->counter, self_, -pending_->delta},
      Change{self_, pending_->counter, pending_->dest, pending_->delta}};
  const std::uint64_t op = pending_->op;
  pending_.reset();
  ++lc_;
  fx.transfer_complete(op, res);
}

void ServerCore::on_rc(const RcRequest& req, const ProcessId& from,
                       ServerEffects& fx) {
  fx.send(from, RcAck{req.session, changes_.for_target(req.target)});
}

void ServerCore::on_wc(const WcRequest& req, const ProcessId& from,
                       ServerEffects& fx) {
  ApplyBatch batch;
  batch.changes.assign(req.changes.begin(), req.changes.end());
  batch.from_wc = true;
  batch.requester = from;
  batch.session = req.session;
  apply_queue_.push_back(std::move(batch));
  pump(fx);
}

void ServerCore::on_transfer_rb(const TransferMsg& msg, ServerEffects& fx) {
  ApplyBatch batch;
  batch.changes = {msg.debit, msg.credit};
  apply_queue_.push_back(std::move(batch));
  pump(fx);
}

void ServerCore::pump(ServerEffects& fx) {
  while (!refresh_) {
    if (apply_queue_.empty()) {
      return;
    }
    ApplyBatch& batch = apply_queue_.front();
    if (batch.next == batch.changes.size()) {
      if (batch.from_wc) {
        fx.send(batch.requester, WcAck{batch.session});
      }
      apply_queue_.pop_front();
      continue;
    }
    const Change& c = batch.changes[batch.next];
    if (changes_.contains(c)) {
      ++batch.next;
      continue;
    }
    if (c.target == self_ && !c.delta.is_zero()) {
      start_refresh(c, fx);
      return;  // the queue resumes when the refresh read completes
    }
    apply(c, fx);
    ++batch.next;
  }
}

void ServerCore::apply(const Change& c, ServerEffects& fx) {
  changes_.insert(c);
  fx.change_applied(c);
  // One ack per (issuer, counter) per server, however many routes the pair
  // arrives by.  Our own changes were counted at invocation.
  if (c.issuer != self_ && !acked_.count({c.issuer, c.counter})) {
    acked_.insert({c.issuer, c.counter});
    fx.send(c.issuer, TransferAck{c.counter});
  }
}

void ServerCore::start_refresh(const Change& credit, ServerEffects& fx) {
  refresh_op_ = fx.refresh_started();
  refresh_.emplace(cfg_, self_, view_, std::nullopt, credit);
  refresh_->start(sender(fx));
}

void ServerCore::finish_refresh(ServerEffects& fx) {
  const Tag tag = refresh_->tag();
  const std::optional<std::string> value = refresh_->value();
  if (register_.tag < tag) {
    register_ = RegisterCell{tag, value};
  }
  refresh_.reset();
  fx.refresh_complete(refresh_op_, tag, value);

  assert(!apply_queue_.empty());
  ApplyBatch& batch = apply_queue_.front();
  apply(batch.changes[batch.next], fx);
  ++batch.next;
  pump(fx);
}

void ServerCore::on_r(const ReadRequest& req, const ProcessId& from,
                      ServerEffects& fx) {
  fx.send(from, ReadAck{req.op_cnt, register_, changes_});
}

void ServerCore::on_w(const WriteRequest& req, const ProcessId& from,
                      ServerEffects& fx) {
  if (register_.tag < req.tag) {
    register_ = RegisterCell{req.tag, req.val};
  }
  fx.send(from, WriteAck{req.op_cnt, changes_});
}

void ServerCore::on_read_ack(const ProcessId& from, const ReadAck& ack,
                             ServerEffects& fx) {
  if (refresh_ && refresh_->on_read_ack(from, ack, sender(fx))) {
    finish_refresh(fx);
  }
}

void ServerCore::on_write_ack(const ProcessId& from, const WriteAck& ack,
                              ServerEffects& fx) {
  if (refresh_ && refresh_->on_write_ack(from, ack, sender(fx))) {
    finish_refresh(fx);
  }
}

}  // namespace wqs::rpwr
