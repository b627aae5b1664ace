#include "wqs/sim.hpp"

#include <algorithm>
#include <cassert>

#include "wqs/rpwr.hpp"

namespace wqs::sim {

namespace {

// Server in protocol mode: the reassignment state machine plus the storage
// handlers, with optional scenario-driven client sessions of its own.
class ServerNode : public Node, private rpwr::ServerEffects {
 public:
  ServerNode(Simulator& sim, ProcessId self)
      : sim_(sim), self_(self), core_(sim.config(), self) {}

  void invoke(std::uint64_t op, const Action& action) override {
    if (const auto* t = std::get_if<ActTransfer>(&action)) {
      op_ = op;
      core_.invoke_transfer(op, t->dest, t->delta, *this);
    } else if (const auto* rc = std::get_if<ActReadChanges>(&action)) {
      op_ = op;
      rc_.emplace(sim_.config(), rc->target, ++rc_counter_);
      rc_->start(sender());
    } else if (std::holds_alternative<ActRead>(action)) {
      op_ = op;
      rw_write_ = false;
      rw_.emplace(sim_.config(), self_, core_.client_view(), std::nullopt);
      rw_->start(sender());
    } else if (const auto* w = std::get_if<ActWrite>(&action)) {
      op_ = op;
      rw_write_ = true;
      rw_.emplace(sim_.config(), self_, core_.client_view(), w->value);
      rw_->start(sender());
    } else {
      throw ScenarioError("action not supported by a protocol server");
    }
  }

  void deliver(const Envelope& env) override {
    const ProcessId& from = env.from;
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, RcRequest>) {
            core_.on_rc(p, from, *this);
          } else if constexpr (std::is_same_v<P, WcRequest>) {
            core_.on_wc(p, from, *this);
          } else if constexpr (std::is_same_v<P, TransferAck>) {
            core_.on_t_ack(p, from, *this);
          } else if constexpr (std::is_same_v<P, ReadRequest>) {
            core_.on_r(p, from, *this);
          } else if constexpr (std::is_same_v<P, WriteRequest>) {
            core_.on_w(p, from, *this);
          } else if constexpr (std::is_same_v<P, RcAck>) {
            if (rc_) {
              rc_->on_rc_ack(from, p, sender());
            }
          } else if constexpr (std::is_same_v<P, WcAck>) {
            if (rc_ && rc_->on_wc_ack(from, p)) {
              const ResChanges res{rc_->collected()};
              rc_.reset();
              sim_.respond(op_, self_, res);
            }
          } else if constexpr (std::is_same_v<P, ReadAck>) {
            core_.on_read_ack(from, p, *this);
            if (rw_ && rw_->on_read_ack(from, p, sender())) {
              finish_rw();
            }
          } else if constexpr (std::is_same_v<P, WriteAck>) {
            core_.on_write_ack(from, p, *this);
            if (rw_ && rw_->on_write_ack(from, p, sender())) {
              finish_rw();
            }
          }
        },
        env.payload);
  }

  void rb_deliver(const TransferMsg& msg) override {
    core_.on_transfer_rb(msg, *this);
  }

  rpwr::ServerCore& core() { return core_; }

 private:
  dwas::Sender sender() {
    return [this](const ProcessId& to, Payload p) {
      sim_.send(self_, to, std::move(p));
    };
  }

  void finish_rw() {
    const bool was_write = rw_write_;
    const Tag tag = rw_->tag();
    const auto value = rw_->value();
    rw_.reset();
    if (was_write) {
      sim_.respond(op_, self_, ResWritten{tag});
    } else {
      sim_.respond(op_, self_, ResReadValue{value, tag});
    }
  }

  // rpwr::ServerEffects
  void send(const ProcessId& to, Payload payload) override {
    sim_.send(self_, to, std::move(payload));
  }
  void rb_broadcast(const TransferMsg& msg) override {
    sim_.rb_broadcast(self_, msg);
  }
  void change_applied(const Change& c) override { sim_.applied(c); }
  void transfer_complete(std::uint64_t op, const ResComplete& r) override {
    sim_.respond(op, self_, r);
  }
  std::uint64_t refresh_started() override {
    return sim_.internal_invoke(self_, ActRead{});
  }
  void refresh_complete(std::uint64_t op, const Tag& tag,
                        const std::optional<std::string>& value) override {
    sim_.respond(op, self_, ResReadValue{value, tag}, /*internal=*/true);
  }

  Simulator& sim_;
  ProcessId self_;
  rpwr::ServerCore core_;
  std::uint64_t op_ = 0;
  std::uint64_t rc_counter_ = 0;
  std::optional<rpwr::ReadChangesSession> rc_;
  std::optional<dwas::Session> rw_;
  bool rw_write_ = false;
};

// Client in protocol mode: drives read_changes and storage sessions.
class ClientNode : public Node {
 public:
  ClientNode(Simulator& sim, ProcessId self)
      : sim_(sim), self_(self) {
    view_.view = sim.config().initial_changes();
  }

  void invoke(std::uint64_t op, const Action& action) override {
    op_ = op;
    if (const auto* rc = std::get_if<ActReadChanges>(&action)) {
      rc_.emplace(sim_.config(), rc->target, ++rc_counter_);
      rc_->start(sender());
    } else if (std::holds_alternative<ActRead>(action)) {
      rw_write_ = false;
      rw_.emplace(sim_.config(), self_, view_, std::nullopt);
      rw_->start(sender());
    } else if (const auto* w = std::get_if<ActWrite>(&action)) {
      rw_write_ = true;
      rw_.emplace(sim_.config(), self_, view_, w->value);
      rw_->start(sender());
    } else {
      throw ScenarioError("action not supported by a protocol client");
    }
  }

  void deliver(const Envelope& env) override {
    const ProcessId& from = env.from;
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, RcAck>) {
            if (rc_) {
              rc_->on_rc_ack(from, p, sender());
            }
          } else if constexpr (std::is_same_v<P, WcAck>) {
            if (rc_ && rc_->on_wc_ack(from, p)) {
              const ResChanges res{rc_->collected()};
              rc_.reset();
              sim_.respond(op_, self_, res);
            }
          } else if constexpr (std::is_same_v<P, ReadAck>) {
            if (rw_ && rw_->on_read_ack(from, p, sender())) {
              finish_rw();
            }
          } else if constexpr (std::is_same_v<P, WriteAck>) {
            if (rw_ && rw_->on_write_ack(from, p, sender())) {
              finish_rw();
            }
          }
        },
        env.payload);
  }

 private:
  dwas::Sender sender() {
    return [this](const ProcessId& to, Payload p) {
      sim_.send(self_, to, std::move(p));
    };
  }

  void finish_rw() {
    const bool was_write = rw_write_;
    const Tag tag = rw_->tag();
    const auto value = rw_->value();
    rw_.reset();
    if (was_write) {
      sim_.respond(op_, self_, ResWritten{tag});
    } else {
      sim_.respond(op_, self_, ResReadValue{value, tag});
    }
  }

  Simulator& sim_;
  ProcessId self_;
  dwas::ClientView view_;
  std::uint64_t op_ = 0;
  std::uint64_t rc_counter_ = 0;
  std::optional<rpwr::ReadChangesSession> rc_;
  std::optional<dwas::Session> rw_;
  bool rw_write_ = false;
};

// Server in a reduction demo: drives the sequential oracle and, for propose,
// the consensus construction on top of it.  The decision loop polls the
// oracle once per scheduled wakeup so the scheduler's fairness applies.
class DemoNode : public Node {
 public:
  DemoNode(Simulator& sim, ProcessId self) : sim_(sim), self_(self) {}

  void invoke(std::uint64_t op, const Action& action) override {
    if (const auto* pr = std::get_if<ActPropose>(&action)) {
      propose_op_ = op;
      start_propose(pr->value);
    } else if (const auto* ra = std::get_if<ActReassign>(&action)) {
      sim_.respond(op, self_,
                   sim_.wr_oracle().reassign(self_, ra->target, ra->delta));
    } else if (const auto* tr = std::get_if<ActTransfer>(&action)) {
      sim_.respond(op, self_,
                   sim_.pwr_oracle().transfer(self_, self_, tr->dest,
                                              tr->delta));
    } else if (const auto* rc = std::get_if<ActReadChanges>(&action)) {
      sim_.respond(op, self_, ResChanges{read_changes(rc->target)});
    } else {
      throw ScenarioError("action not supported by a demo server");
    }
  }

  void deliver(const Envelope& env) override {
    if (!std::holds_alternative<DemoPoll>(env.payload) || !propose_op_) {
      return;
    }
    if (const auto decided = probe()) {
      const auto& value = sim_.ideal_read(*decided);
      assert(value.has_value());
      const std::uint64_t op = *propose_op_;
      propose_op_.reset();
      sim_.respond(op, self_, ResDecided{*value});
    } else {
      sim_.send(self_, self_, DemoPoll{});
    }
  }

 private:
  ChangeSet read_changes(const ProcessId& target) {
    return sim_.mode() == Mode::demo_wr
               ? sim_.wr_oracle().read_changes(target)
               : sim_.pwr_oracle().read_changes(target);
  }

  void start_propose(const std::string& value) {
    const std::uint32_t f = sim_.config().f();
    const std::uint32_t i = self_.index;
    sim_.ideal_write(self_, i, value);
    if (sim_.mode() == Mode::demo_wr) {
      const Weight delta = i < f ? Weight(1, 2) : Weight(-1, 2);
      const std::uint64_t iop =
          sim_.internal_invoke(self_, ActReassign{self_, delta});
      sim_.respond(iop, self_, sim_.wr_oracle().reassign(self_, self_, delta),
                   /*internal=*/true);
    } else {
      // Members of F shuffle 0.1 among themselves (wrapping inside F);
      // everyone else pushes 0.4 towards s1.
      const ProcessId dest =
          i < f ? ProcessId::server((i + 1) % f) : ProcessId::server(0);
      const Weight delta = i < f ? Weight(1, 10) : Weight(2, 5);
      const std::uint64_t iop =
          sim_.internal_invoke(self_, ActTransfer{dest, delta});
      sim_.respond(iop, self_,
                   sim_.pwr_oracle().transfer(self_, self_, dest, delta),
                   /*internal=*/true);
    }
    sim_.send(self_, self_, DemoPoll{});
  }

  // One decision probe.  Returns the index of the winning server, if any.
  std::optional<std::uint32_t> probe() {
    const std::uint32_t n = sim_.config().n();
    const std::uint32_t f = sim_.config().f();
    if (sim_.mode() == Mode::demo_wr) {
      const ProcessId sj = ProcessId::server(poll_next_++ % n);
      for (const auto& c : sim_.wr_oracle().read_changes(sj)) {
        if (c.issuer == sj && c.counter == 2 && !c.delta.is_zero()) {
          return sj.index;
        }
      }
      return std::nullopt;
    }
    // Scan the credits landed on s1 for an effective 0.4 transfer issued by
    // a member of S \ F.
    const ProcessId s1 = ProcessId::server(0);
    for (const auto& c : sim_.pwr_oracle().read_changes(s1)) {
      if (c.issuer.is_server() && c.issuer.index >= f && c.counter == 2 &&
          c.delta == Weight(2, 5)) {
        return c.issuer.index;
      }
    }
    return std::nullopt;
  }

  Simulator& sim_;
  ProcessId self_;
  std::optional<std::uint64_t> propose_op_;
  std::uint64_t poll_next_ = 0;
};

// Client in a reduction demo: oracle read_changes only.
class DemoClientNode : public Node {
 public:
  DemoClientNode(Simulator& sim, ProcessId self) : sim_(sim), self_(self) {}

  void invoke(std::uint64_t op, const Action& action) override {
    const auto* rc = std::get_if<ActReadChanges>(&action);
    if (!rc) {
      throw ScenarioError("action not supported by a demo client");
    }
    const ChangeSet cs = sim_.mode() == Mode::demo_wr
                             ? sim_.wr_oracle().read_changes(rc->target)
                             : sim_.pwr_oracle().read_changes(rc->target);
    sim_.respond(op, self_, ResChanges{cs});
  }

  void deliver(const Envelope&) override {}

 private:
  Simulator& sim_;
  ProcessId self_;
};

}  // namespace

Simulator::Simulator(const SystemConfig& cfg, const Schedule& schedule,
                     const ScenarioScript& script)
    : cfg_(cfg), schedule_(schedule), script_(script), rng_(schedule.seed) {
  validate(script_, cfg_, schedule_);

  trace_.meta.name = script_.name;
  trace_.meta.mode = script_.mode;
  trace_.meta.n = cfg_.n();
  trace_.meta.f = cfg_.f();
  trace_.meta.initial_weights = cfg_.initial_weights();
  trace_.meta.seed = schedule_.seed;
  trace_.meta.fairness = schedule_.fairness;
  trace_.meta.step_limit = script_.step_limit;

  const bool demo = script_.mode != Mode::protocol;
  if (script_.mode == Mode::demo_wr) {
    wr_.emplace(cfg_);
  } else if (script_.mode == Mode::demo_pwr) {
    pwr_.emplace(cfg_);
  }
  ideal_.resize(cfg_.n());

  for (const auto& s : cfg_.servers()) {
    nodes_[s] = demo ? std::unique_ptr<Node>(new DemoNode(*this, s))
                     : std::unique_ptr<Node>(new ServerNode(*this, s));
  }
  std::size_t order = 0;
  for (const auto& step : script_.steps) {
    if (step.actor.is_client() && !nodes_.count(step.actor)) {
      nodes_[step.actor] =
          demo ? std::unique_ptr<Node>(new DemoClientNode(*this, step.actor))
               : std::unique_ptr<Node>(new ClientNode(*this, step.actor));
    }
    steps_[step.actor].push_back(QueuedStep{step, order++});
    ++steps_remaining_;
  }
  crash_queue_ = schedule_.crash_plan;
  std::stable_sort(
      crash_queue_.begin(), crash_queue_.end(),
      [](const CrashPoint& a, const CrashPoint& b) { return a.at < b.at; });
}

Node& Simulator::node_at(const ProcessId& pid) {
  auto it = nodes_.find(pid);
  assert(it != nodes_.end());
  return *it->second;
}

std::uint64_t Simulator::push_event(EventDetail detail) {
  trace_.events.push_back(SimEvent{now(), std::move(detail)});
  return trace_.events.size() - 1;
}

void Simulator::begin_step(std::size_t root_index) {
  root_index_ = root_index;
  step_applied_.clear();
}

void Simulator::end_step() {
  if (root_index_ && !step_applied_.empty()) {
    EventDetail& d = trace_.events[*root_index_].detail;
    if (auto* del = std::get_if<EvDeliver>(&d)) {
      del->applied = step_applied_;
    } else if (auto* inv = std::get_if<EvInvoke>(&d)) {
      inv->applied = step_applied_;
    }
  }
  root_index_.reset();
  step_applied_.clear();
}

void Simulator::send(const ProcessId& from, const ProcessId& to,
                     Payload payload) {
  assert(!crashed_.count(from));
  Envelope env{next_seq_++, from, to, std::move(payload)};
  push_event(EvSend{env});
  if (crashed_.count(to)) {
    return;  // dropped at the door; Send is still a fact of the trace
  }
  network_.push_back(PendingMsg{std::move(env), 0});
}

void Simulator::rb_broadcast(const ProcessId& from, const TransferMsg& msg) {
  // Bootstrap of the eager relay: hand the message to ourselves.  If the
  // broadcaster crashes before processing its own copy, nothing was relayed
  // and no server delivers -- exactly the permitted ∅ outcome.
  const std::uint64_t bcast = rb_next_[from]++;
  send(from, from, RbRelay{from, bcast, msg});
}

void Simulator::applied(const Change& c) { step_applied_.push_back(c); }

std::uint64_t Simulator::internal_invoke(const ProcessId& actor,
                                         Action action) {
  const std::uint64_t op = next_op_++;
  push_event(EvInvoke{op, actor, std::move(action), /*internal=*/true,
                      /*skipped=*/false,
                      {}});
  return op;
}

void Simulator::respond(std::uint64_t op, const ProcessId& actor,
                        OpResult result, bool internal) {
  push_event(EvRespond{op, actor, std::move(result), internal});
  if (!internal) {
    busy_.erase(actor);
  }
}

reduction::WrOracle& Simulator::wr_oracle() {
  assert(wr_);
  return *wr_;
}

reduction::PwrOracle& Simulator::pwr_oracle() {
  assert(pwr_);
  return *pwr_;
}

void Simulator::ideal_write(const ProcessId& writer, std::uint32_t index,
                            const std::string& value) {
  if (!writer.is_server() || writer.index != index) {
    throw ScenarioError("ideal register " + std::to_string(index) +
                        " is not writable by " + writer.name());
  }
  ideal_.at(index) = value;
}

const std::optional<std::string>& Simulator::ideal_read(
    std::uint32_t index) const {
  return ideal_.at(index);
}

void Simulator::do_crash(const CrashPoint& cp) {
  if (!crashed_.insert(cp.server).second) {
    return;  // idempotent
  }
  // Undelivered messages addressed to the crashed server vanish; its own
  // in-flight messages stay deliverable.
  std::erase_if(network_, [&](const PendingMsg& m) {
    return m.env.to == cp.server;
  });
  push_event(EvCrash{cp.server});
}

std::optional<Simulator::StepChoice> Simulator::choose_step(
    bool include_future) const {
  std::optional<StepChoice> best;
  for (const auto& [actor, queue] : steps_) {
    if (queue.empty()) {
      continue;
    }
    const QueuedStep& front = queue.front();
    if (!include_future && front.step.at > now()) {
      continue;
    }
    if (!crashed_.count(actor) && busy_.count(actor)) {
      continue;  // sequential processes: previous operation still open
    }
    const StepChoice candidate{actor, front.step.at, front.order};
    const bool better =
        !best ||
        (include_future
             ? std::tie(candidate.at, candidate.order) <
                   std::tie(best->at, best->order)
             : candidate.order < best->order);
    if (better) {
      best = candidate;
    }
  }
  return best;
}

void Simulator::execute_step(const ProcessId& actor) {
  const QueuedStep queued = steps_[actor].front();
  steps_[actor].pop_front();
  --steps_remaining_;

  const std::uint64_t op = next_op_++;
  if (crashed_.count(actor)) {
    // The process takes no steps any more; note the skipped invocation.
    push_event(
        EvInvoke{op, actor, queued.step.action, false, /*skipped=*/true, {}});
    return;
  }
  const std::size_t root =
      push_event(EvInvoke{op, actor, queued.step.action, false, false, {}});
  begin_step(root);
  busy_.insert(actor);
  node_at(actor).invoke(op, queued.step.action);
  end_step();
}

std::size_t Simulator::pick_delivery() {
  assert(!network_.empty());
  if (schedule_.fairness.adversarial) {
    // Any message that has waited out its patience must go now.
    std::size_t forced = network_.size();
    for (std::size_t i = 0; i < network_.size(); ++i) {
      if (network_[i].age >= schedule_.fairness.bound) {
        if (forced == network_.size() ||
            network_[i].age > network_[forced].age ||
            (network_[i].age == network_[forced].age &&
             network_[i].env.seq < network_[forced].env.seq)) {
          forced = i;
        }
      }
    }
    if (forced != network_.size()) {
      return forced;
    }
    // Otherwise prefer the freshest message half of the time, which inverts
    // send order aggressively while the age bound keeps things live.
    if (rng_.chance(1, 2)) {
      std::size_t newest = 0;
      for (std::size_t i = 1; i < network_.size(); ++i) {
        if (network_[i].env.seq > network_[newest].env.seq) {
          newest = i;
        }
      }
      return newest;
    }
    return static_cast<std::size_t>(rng_.below(network_.size()));
  }
  return static_cast<std::size_t>(rng_.below(network_.size()));
}

void Simulator::deliver_one(std::size_t index) {
  for (std::size_t i = 0; i < network_.size(); ++i) {
    if (i != index) {
      ++network_[i].age;
    }
  }
  Envelope env = std::move(network_[index].env);
  network_.erase(network_.begin() + index);
  assert(!crashed_.count(env.to));

  const std::size_t root = push_event(EvDeliver{env, {}});
  begin_step(root);
  if (std::holds_alternative<RbRelay>(env.payload)) {
    handle_rb(env);
  } else {
    node_at(env.to).deliver(env);
  }
  end_step();
}

void Simulator::handle_rb(const Envelope& env) {
  const auto& relay = std::get<RbRelay>(env.payload);
  if (!rb_seen_[env.to].insert({relay.origin, relay.bcast}).second) {
    return;  // duplicate relay copy
  }
  // Forward first, then deliver locally: once any correct server processes
  // a copy, every correct server has one in flight.
  for (const auto& s : cfg_.servers()) {
    if (s != env.to) {
      send(env.to, s, relay);
    }
  }
  push_event(EvRbDeliver{env.to, relay.origin, relay.bcast, relay.inner});
  node_at(env.to).rb_deliver(relay.inner);
}

Trace Simulator::run() {
  assert(!ran_);
  ran_ = true;
  RunOutcome outcome = RunOutcome::quiescent;
  while (true) {
    if (now() >= script_.step_limit) {
      outcome = RunOutcome::step_limit_exceeded;
      break;
    }
    if (next_crash_ < crash_queue_.size() &&
        crash_queue_[next_crash_].at <= now()) {
      do_crash(crash_queue_[next_crash_++]);
      continue;
    }
    if (const auto due = choose_step(/*include_future=*/false)) {
      execute_step(due->actor);
      continue;
    }
    if (!network_.empty()) {
      deliver_one(pick_delivery());
      continue;
    }
    // Idle: pull the earliest future-dated item forward, if any.
    const bool have_crash = next_crash_ < crash_queue_.size();
    const auto future = choose_step(/*include_future=*/true);
    if (have_crash &&
        (!future || crash_queue_[next_crash_].at <= future->at)) {
      do_crash(crash_queue_[next_crash_++]);
      continue;
    }
    if (future) {
      execute_step(future->actor);
      continue;
    }
    break;  // quiescent (possibly with steps blocked behind a stalled op)
  }
  trace_.meta.outcome = outcome;
  return std::move(trace_);
}

Trace Simulator::execute(const SystemConfig& cfg, const Schedule& schedule,
                         const ScenarioScript& script) {
  Simulator sim(cfg, schedule, script);
  return sim.run();
}

Trace Simulator::execute(const ScenarioScript& script) {
  return execute(script.config(), script.schedule(), script);
}

Trace Simulator::execute(const ScenarioScript& script, std::uint64_t seed) {
  return execute(script.config(), script.schedule_with_seed(seed), script);
}

}  // namespace wqs::sim
