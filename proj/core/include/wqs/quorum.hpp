#pragma once

#include <set>

#include "wqs/change.hpp"
#include "wqs/config.hpp"

namespace wqs {

// W_{s,t}: sum of the deltas of all changes in cs created for server s.
Weight weight_of(const ChangeSet& cs, const ProcessId& s);

// W_{A,t}: sum of weight_of over the given servers.
Weight total_weight(const ChangeSet& cs, const std::vector<ProcessId>& servers);
Weight total_weight(const ChangeSet& cs, const SystemConfig& cfg);

// Availability of the weighted majority quorum system: the sum of the f
// greatest weights must be strictly less than half of the total.  Trivially
// true for f = 0.
bool check_availability(const ChangeSet& cs, const SystemConfig& cfg);
bool check_availability(const ChangeSet& cs,
                        const std::vector<ProcessId>& servers,
                        std::uint32_t f);

// W_{S,0} / (2(n-f)): the weight every server must stay strictly above for
// the restricted pairwise reassignment to preserve availability.
Weight min_weight_threshold(const SystemConfig& cfg);

// Whether q's total weight under cs exceeds half of the *initial* total.
// Pairwise transfers conserve the total, so the initial total is the current
// one; using the configured constant keeps the test meaningful even on views
// that are mid-transfer.
bool is_quorum(const ChangeSet& cs, const std::set<ProcessId>& q,
               const SystemConfig& cfg);

}  // namespace wqs
