#pragma once

#include <map>

#include "wqs/quorum.hpp"
#include "wqs/trace.hpp"

namespace wqs::reduction {

using sim::ResComplete;

// Sequential (linearizable, crash-aware) oracle for the general weight
// reassignment problem.  Each operation is one indivisible step: the
// availability check and the log append cannot be split by any interleaving.
// The consensus reductions run against this object because the problem it
// implements is exactly what they assume as given.
//
// Zero-weight outcomes are reported in the Complete message but never stored:
// they do not affect any server's weight.
class WrOracle {
 public:
  explicit WrOracle(const SystemConfig& cfg)
      : cfg_(cfg), completed_(cfg.initial_changes()) {}

  ResComplete reassign(const ProcessId& issuer, const ProcessId& target,
                       const Weight& delta);

  // Atomic snapshot of the completed changes created for s.  The strongest
  // possible Validity-II behaviour, which an ideal shared object may have.
  ChangeSet read_changes(const ProcessId& s) const {
    return completed_.for_target(s);
  }

  const ChangeSet& completed() const { return completed_; }
  Weight weight(const ProcessId& s) const { return weight_of(completed_, s); }

 protected:
  std::uint64_t take_counter(const ProcessId& issuer);

  SystemConfig cfg_;
  ChangeSet completed_;
  // The initial change consumed counter 1 of every server.
  std::map<ProcessId, std::uint64_t> counters_;
};

// Pairwise variant: mutations are debit/credit pairs, so the total weight is
// invariant.  Any server may issue a transfer between any pair (the C1
// restriction belongs to the restricted problem, not to this one).
class PwrOracle : public WrOracle {
 public:
  explicit PwrOracle(const SystemConfig& cfg) : WrOracle(cfg) {}

  ResComplete transfer(const ProcessId& issuer, const ProcessId& src,
                       const ProcessId& dst, const Weight& delta);
};

}  // namespace wqs::reduction
