#include "wqs/oracle.hpp"

namespace wqs::reduction {

std::uint64_t WrOracle::take_counter(const ProcessId& issuer) {
  auto it = counters_.find(issuer);
  if (it == counters_.end()) {
    it = counters_.emplace(issuer, issuer.is_server() ? 2 : 1).first;
  }
  return it->second++;
}

ResComplete WrOracle::reassign(const ProcessId& issuer,
                               const ProcessId& target, const Weight& delta) {
  const std::uint64_t lc = take_counter(issuer);
  const Change candidate{issuer, lc, target, delta};
  ChangeSet trial = completed_;
  trial.insert(candidate);
  if (check_availability(trial, cfg_)) {
    completed_ = std::move(trial);
    return ResComplete{candidate, std::nullopt};
  }
  return ResComplete{Change{issuer, lc, target, Weight(0)}, std::nullopt};
}

ResComplete PwrOracle::transfer(const ProcessId& issuer, const ProcessId& src,
                                const ProcessId& dst, const Weight& delta) {
  const std::uint64_t lc = take_counter(issuer);
  const Change debit{issuer, lc, src, -delta};
  const Change credit{issuer, lc, dst, delta};
  ChangeSet trial = completed_;
  trial.insert(debit);
  trial.insert(credit);
  if (check_availability(trial, cfg_)) {
    completed_ = std::move(trial);
    return ResComplete{debit, credit};
  }
  return ResComplete{Change{issuer, lc, src, Weight(0)},
                     Change{issuer, lc, dst, Weight(0)}};
}

}  // namespace wqs::reduction
