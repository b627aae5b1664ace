#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wqs/trace.hpp"

namespace wqs::check {

struct Verdict {
  bool pass = true;
  std::string message;
  std::optional<std::uint64_t> at;  // event time of the first counterexample

  static Verdict ok() { return {}; }
  static Verdict fail(std::string msg,
                      std::optional<std::uint64_t> at = std::nullopt) {
    return Verdict{false, std::move(msg), at};
  }
  explicit operator bool() const { return pass; }
};

// One completed change, stamped with the event time at which its operation
// completed: the issuer's (n-f-1)-th T_Ack for the protocol, the oracle step
// for the demos.  The two halves of a pairwise transfer complete together.
struct LedgerEntry {
  std::uint64_t time = 0;
  Change change;
};

std::vector<LedgerEntry> completion_ledger(const sim::Trace& trace);

// Safety monitors over the completed-change ledger: conservation of the
// total weight (exact) plus, depending on the mode, the per-server weight
// floor (protocol) or the f-heaviest-subset availability bound (demos).
Verdict monitor_integrity(const sim::Trace& trace);

// Every read_changes response contains every change on its target that
// completed before the invocation.
Verdict check_validity_ii(const sim::Trace& trace);

// A transfer completes null exactly when its locally evaluated precondition
// failed at invocation, and effective completions are preceded by a matching
// reliable broadcast.  Recomputes each issuer's local state from the traced
// change applications; never trusts the implementation's own arithmetic.
Verdict check_effectiveness(const sim::Trace& trace);

// No two changes applied anywhere share (issuer, counter, target) while
// disagreeing on the delta.
Verdict check_counter_uniqueness(const sim::Trace& trace);

// Reliable broadcast: per payload, the set of rb-delivering servers is
// empty or contains every never-crashed server; nobody delivers twice; a
// correct broadcaster's payload is delivered by all correct servers.
Verdict check_rb_agreement(const sim::Trace& trace);

// Reliable links: no envelope is delivered twice.
Verdict check_unique_delivery(const sim::Trace& trace);

// The run reached quiescence and every operation invoked by a never-crashed
// process got its response.
Verdict check_liveness(const sim::Trace& trace);

// Consensus-demo postconditions: exactly one decision-relevant effective
// oracle outcome, agreement, and validity of the decided value.  Applies
// only to traces containing propose operations.
Verdict check_reduction(const sim::Trace& trace);

// Operation history records for the storage checkers.
struct OpRecord {
  ProcessId proc;
  std::uint64_t op = 0;
  std::uint64_t invoke_time = 0;
  std::uint64_t respond_time = 0;
  sim::Action action;
  sim::OpResult result;
};

// Top-level completed operations, in invocation order.
std::vector<OpRecord> op_history(const sim::Trace& trace);
// Only the storage reads and writes.
std::vector<OpRecord> rw_history(const sim::Trace& trace);

// Single-register atomicity over non-overlapping operations: tags of
// non-overlapping reads never regress, equal tags carry equal values, reads
// see every write that finished before they started, and no read invents a
// value.
Verdict check_atomicity(const std::vector<OpRecord>& history);

// Independent oracle: exhaustive search for a linearization of the history
// against sequential register semantics.  History must hold at most
// `kBruteForceMaxOps` reads/writes.
inline constexpr std::size_t kBruteForceMaxOps = 12;
Verdict check_linearizable_bruteforce(const std::vector<OpRecord>& history);

// Named checker bundles as exposed by the command line: "integrity",
// "atomicity", "validity2" or "all".
struct SuiteResult {
  std::string checker;
  Verdict verdict;
};
std::vector<SuiteResult> run_suite(const sim::Trace& trace,
                                   const std::string& suite);

}  // namespace wqs::check
