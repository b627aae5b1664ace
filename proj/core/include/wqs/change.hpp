#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <vector>

#include "wqs/process.hpp"
#include "wqs/rational.hpp"

namespace wqs {

using Weight = Rational;

// Record of one weight-reassignment outcome: the weight of `target` moved by
// `delta` as the result of `issuer`'s invocation numbered `counter`.
// (issuer, counter, target) identifies a change within one execution; delta
// participates in equality so that a forged duplicate with a different delta
// is a distinct (and detectable) element.
struct Change {
  ProcessId issuer;
  std::uint64_t counter = 0;
  ProcessId target;
  Weight delta;

  auto operator<=>(const Change&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Change& c);

// Grow-only set of changes.  Union is the join of the lattice the protocol
// state lives in; iteration order is the canonical Change order, which keeps
// every downstream serialization deterministic.
class ChangeSet {
 public:
  ChangeSet() = default;
  explicit ChangeSet(std::vector<Change> changes);

  bool insert(const Change& c) { return entries_.insert(c).second; }
  bool contains(const Change& c) const { return entries_.count(c) > 0; }
  bool contains_all(const ChangeSet& other) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Changes created for server s (Algorithm 3's get_changes).
  ChangeSet for_target(const ProcessId& s) const;

  // Copy with one element removed (no-op if absent).
  ChangeSet without(const Change& c) const;

  bool operator==(const ChangeSet&) const = default;

 private:
  std::set<Change> entries_;
};

// Set union; commutative, associative, idempotent.
ChangeSet merge(const ChangeSet& a, const ChangeSet& b);

}  // namespace wqs
