#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wqs/envelope.hpp"
#include "wqs/scenario.hpp"

namespace wqs::sim {

// Operation results carried by Respond events.

struct ResComplete {  // transfer / reassign outcome
  Change change;                 // the returned change (delta 0 when null)
  std::optional<Change> credit;  // pairwise: the matching credit-side change
  bool operator==(const ResComplete&) const = default;
};
struct ResChanges {  // read_changes
  ChangeSet changes;
  bool operator==(const ResChanges&) const = default;
};
struct ResReadValue {  // storage read
  std::optional<std::string> value;
  Tag tag;
  bool operator==(const ResReadValue&) const = default;
};
struct ResWritten {  // storage write
  Tag tag;
  bool operator==(const ResWritten&) const = default;
};
struct ResDecided {  // consensus demo propose
  std::string value;
  bool operator==(const ResDecided&) const = default;
};

using OpResult =
    std::variant<ResComplete, ResChanges, ResReadValue, ResWritten, ResDecided>;

const char* result_kind(const OpResult& r);

// Trace event details.  `applied` lists the changes inserted into the acting
// process's local change set while handling the event; replaying those lists
// reconstructs every server's local state without re-running protocol logic.

struct EvSend {
  Envelope env;
  bool operator==(const EvSend&) const = default;
};
struct EvDeliver {
  Envelope env;
  std::vector<Change> applied;
  bool operator==(const EvDeliver&) const = default;
};
struct EvCrash {
  ProcessId server;
  bool operator==(const EvCrash&) const = default;
};
struct EvInvoke {
  std::uint64_t op = 0;
  ProcessId actor;
  Action action;
  bool internal = false;  // protocol-internal sub-operation (refresh read,
                          // demo oracle step), excluded from op histories
  bool skipped = false;   // actor was already crashed at dispatch time
  std::vector<Change> applied;
  bool operator==(const EvInvoke&) const = default;
};
struct EvRespond {
  std::uint64_t op = 0;
  ProcessId actor;
  OpResult result;
  bool internal = false;
  bool operator==(const EvRespond&) const = default;
};
struct EvRbDeliver {
  ProcessId server;
  ProcessId origin;
  std::uint64_t bcast = 0;
  TransferMsg inner;
  bool operator==(const EvRbDeliver&) const = default;
};

using EventDetail =
    std::variant<EvSend, EvDeliver, EvCrash, EvInvoke, EvRespond, EvRbDeliver>;

struct SimEvent {
  std::uint64_t time = 0;  // == index in the trace
  EventDetail detail;
  bool operator==(const SimEvent&) const = default;
};

const char* event_kind(const EventDetail& d);

enum class RunOutcome { quiescent, step_limit_exceeded };

struct TraceMeta {
  std::string name;
  Mode mode = Mode::protocol;
  std::uint32_t n = 0;
  std::uint32_t f = 0;
  std::vector<Weight> initial_weights;
  std::uint64_t seed = 0;
  Fairness fairness;
  std::uint64_t step_limit = kDefaultStepLimit;
  RunOutcome outcome = RunOutcome::quiescent;
  bool operator==(const TraceMeta&) const = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<SimEvent> events;
  bool operator==(const Trace&) const = default;

  SystemConfig config() const {
    return SystemConfig(meta.n, meta.f, meta.initial_weights);
  }
};

}  // namespace wqs::sim
