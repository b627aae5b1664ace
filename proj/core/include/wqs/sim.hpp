#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "wqs/oracle.hpp"
#include "wqs/rng.hpp"
#include "wqs/trace.hpp"

namespace wqs::sim {

class Simulator;

// A simulated process.  Nodes are state machines: they run only when the
// simulator hands them an event, share no state, and interact exclusively by
// sending envelopes.  They have no access to the scheduler or to any clock.
class Node {
 public:
  virtual ~Node() = default;
  virtual void invoke(std::uint64_t op, const Action& action) = 0;
  virtual void deliver(const Envelope& env) = 0;
  virtual void rb_deliver(const TransferMsg& msg) { (void)msg; }
};

// Deterministic discrete-event simulator.  run() is a pure function of
// (config, schedule, script): identical inputs produce identical traces,
// byte for byte once serialized.
//
// Links are reliable: every message sent to a process that never crashes is
// delivered exactly once, in an order chosen by the schedule.  Messages to a
// crashed process are silently dropped; messages already handed to the
// network by a process that later crashes remain deliverable.
class Simulator {
 public:
  Simulator(const SystemConfig& cfg, const Schedule& schedule,
            const ScenarioScript& script);

  // Executes to quiescence or to the step limit.  Call once.
  Trace run();

  static Trace execute(const SystemConfig& cfg, const Schedule& schedule,
                       const ScenarioScript& script);
  static Trace execute(const ScenarioScript& script);
  static Trace execute(const ScenarioScript& script, std::uint64_t seed);

  // --- services available to nodes while they handle an event ---
  const SystemConfig& config() const { return cfg_; }
  Mode mode() const { return script_.mode; }
  void send(const ProcessId& from, const ProcessId& to, Payload payload);
  void rb_broadcast(const ProcessId& from, const TransferMsg& msg);
  // Record a change inserted into the acting process's local set.
  void applied(const Change& c);
  std::uint64_t internal_invoke(const ProcessId& actor, Action action);
  void respond(std::uint64_t op, const ProcessId& actor, OpResult result,
               bool internal = false);
  reduction::WrOracle& wr_oracle();
  reduction::PwrOracle& pwr_oracle();
  // Crash-immune SWMR register array used by the reduction demos.
  void ideal_write(const ProcessId& writer, std::uint32_t index,
                   const std::string& value);
  const std::optional<std::string>& ideal_read(std::uint32_t index) const;

 private:
  struct PendingMsg {
    Envelope env;
    std::uint64_t age = 0;
  };
  struct QueuedStep {
    ScenarioStep step;
    std::size_t order = 0;
  };

  struct StepChoice {
    ProcessId actor;
    std::uint64_t at = 0;
    std::size_t order = 0;
  };

  std::uint64_t now() const { return trace_.events.size(); }
  std::uint64_t push_event(EventDetail detail);
  void begin_step(std::size_t root_index);
  void end_step();

  void do_crash(const CrashPoint& cp);
  std::optional<StepChoice> choose_step(bool include_future) const;
  void execute_step(const ProcessId& actor);
  void deliver_one(std::size_t index);
  std::size_t pick_delivery();
  void handle_rb(const Envelope& env);
  Node& node_at(const ProcessId& pid);

  SystemConfig cfg_;
  Schedule schedule_;
  ScenarioScript script_;
  Rng rng_;
  Trace trace_;
  bool ran_ = false;

  std::vector<PendingMsg> network_;
  std::uint64_t next_seq_ = 1;
  std::set<ProcessId> crashed_;
  std::map<ProcessId, std::unique_ptr<Node>> nodes_;

  // Scenario dispatch: FIFO per actor, original script order breaking ties.
  std::map<ProcessId, std::deque<QueuedStep>> steps_;
  std::size_t steps_remaining_ = 0;
  std::vector<CrashPoint> crash_queue_;
  std::size_t next_crash_ = 0;
  std::uint64_t next_op_ = 1;
  std::set<ProcessId> busy_;

  // Reliable broadcast bookkeeping (per receiving server).
  std::map<ProcessId, std::set<std::pair<ProcessId, std::uint64_t>>> rb_seen_;
  std::map<ProcessId, std::uint64_t> rb_next_;

  // Demo-mode shared objects.
  std::optional<reduction::WrOracle> wr_;
  std::optional<reduction::PwrOracle> pwr_;
  std::vector<std::optional<std::string>> ideal_;

  // Changes applied while processing the current root event.
  std::optional<std::size_t> root_index_;
  std::vector<Change> step_applied_;
};

}  // namespace wqs::sim
