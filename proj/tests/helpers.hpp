#pragma once

#include <string>
#include <vector>

#include "wqs/bundled.hpp"
#include "wqs/checkers.hpp"
#include "wqs/sim.hpp"

namespace wqs::test {

inline sim::Trace run_bundled(const std::string& name, std::uint64_t seed) {
  return sim::Simulator::execute(bundled::make(name, seed), seed);
}

// All completed transfer/reassign outcomes, in trace order.
inline std::vector<sim::ResComplete> completions(const sim::Trace& trace) {
  std::vector<sim::ResComplete> out;
  for (const auto& e : trace.events) {
    if (const auto* r = std::get_if<sim::EvRespond>(&e.detail)) {
      if (const auto* c = std::get_if<sim::ResComplete>(&r->result)) {
        out.push_back(*c);
      }
    }
  }
  return out;
}

inline std::vector<sim::ResChanges> change_responses(const sim::Trace& trace) {
  std::vector<sim::ResChanges> out;
  for (const auto& e : trace.events) {
    if (const auto* r = std::get_if<sim::EvRespond>(&e.detail)) {
      if (const auto* c = std::get_if<sim::ResChanges>(&r->result)) {
        out.push_back(*c);
      }
    }
  }
  return out;
}

inline bool all_checks_pass(const sim::Trace& trace) {
  for (const auto& [name, verdict] : check::run_suite(trace, "all")) {
    if (!verdict.pass) {
      return false;
    }
  }
  return true;
}

inline std::string first_failure(const sim::Trace& trace) {
  for (const auto& [name, verdict] : check::run_suite(trace, "all")) {
    if (!verdict.pass) {
      return name + ": " + verdict.message;
    }
  }
  return "";
}

}  // namespace wqs::test
