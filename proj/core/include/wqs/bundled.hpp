#pragma once

#include <string>
#include <vector>

#include "wqs/scenario.hpp"

namespace wqs::bundled {

// Built-in scenarios: replays of the worked examples, the consensus-demo
// constructions, and the seeded random batteries the acceptance suite runs.
// A (name, seed) pair fully determines the returned script.
std::vector<std::string> names();
bool exists(const std::string& name);
sim::ScenarioScript make(const std::string& name, std::uint64_t seed);

}  // namespace wqs::bundled
