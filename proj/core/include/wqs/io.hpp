#pragma once

#include <iosfwd>
#include <string>

#include "wqs/trace.hpp"

namespace wqs::io {

// Newline-delimited trace format: one meta record, then one record per
// event.  Field order is fixed and weights are written as num/den strings,
// so serializing the same trace twice yields identical bytes.
std::string to_jsonl(const sim::Trace& trace);
void write_jsonl(std::ostream& os, const sim::Trace& trace);
sim::Trace trace_from_jsonl(std::istream& is);
sim::Trace trace_from_jsonl(const std::string& text);

// Scenario scripts are single JSON documents.
std::string to_json(const sim::ScenarioScript& script);
sim::ScenarioScript scenario_from_json(const std::string& text);

}  // namespace wqs::io
