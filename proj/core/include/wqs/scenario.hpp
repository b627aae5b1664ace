#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wqs/config.hpp"
#include "wqs/process.hpp"

namespace wqs::sim {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario-script actions.  Which ones are legal depends on the script mode:
// protocol scripts drive the message-passing stack, demo scripts drive the
// sequential oracles plus the ideal register array.
struct ActTransfer {  // actor moves delta of its own weight to dest
  ProcessId dest;
  Weight delta;
  bool operator==(const ActTransfer&) const = default;
};
struct ActReassign {  // demo-wr only: actor requests target's weight += delta
  ProcessId target;
  Weight delta;
  bool operator==(const ActReassign&) const = default;
};
struct ActReadChanges {
  ProcessId target;
  bool operator==(const ActReadChanges&) const = default;
};
struct ActRead {
  bool operator==(const ActRead&) const = default;
};
struct ActWrite {
  std::string value;
  bool operator==(const ActWrite&) const = default;
};
struct ActPropose {  // demo modes only
  std::string value;
  bool operator==(const ActPropose&) const = default;
};

using Action = std::variant<ActTransfer, ActReassign, ActReadChanges, ActRead,
                            ActWrite, ActPropose>;

const char* action_kind(const Action& a);

enum class Mode {
  protocol,  // restricted pairwise reassignment + weighted storage
  demo_wr,   // sequential weight-reassignment oracle (+ consensus demo)
  demo_pwr,  // sequential pairwise oracle (+ consensus demo)
};

const char* mode_name(Mode m);
Mode parse_mode(const std::string& name);

struct ScenarioStep {
  std::uint64_t at = 0;  // earliest event index at which to dispatch
  ProcessId actor;
  Action action;
  bool operator==(const ScenarioStep&) const = default;
};

struct CrashPoint {
  ProcessId server;
  std::uint64_t at = 0;
  bool operator==(const CrashPoint&) const = default;
};

struct Fairness {
  // Fair: uniform choice among deliverable messages.  Bounded-adversarial:
  // biased reordering, but no message may be passed over more than `bound`
  // times.
  bool adversarial = false;
  std::uint32_t bound = 0;
  bool operator==(const Fairness&) const = default;

  static Fairness fair() { return {false, 0}; }
  static Fairness adversarial_bounded(std::uint32_t k) { return {true, k}; }
};

struct Schedule {
  std::uint64_t seed = 0;
  Fairness fairness;
  std::vector<CrashPoint> crash_plan;
  bool operator==(const Schedule&) const = default;
};

inline constexpr std::uint64_t kDefaultStepLimit = 1'000'000;

struct ScenarioScript {
  std::string name;
  Mode mode = Mode::protocol;
  std::uint32_t n = 0;
  std::uint32_t f = 0;
  std::vector<Weight> initial_weights;  // empty means uniform 1
  std::uint64_t seed = 1;
  Fairness fairness;
  std::vector<CrashPoint> crashes;
  std::vector<ScenarioStep> steps;
  std::uint64_t step_limit = kDefaultStepLimit;

  bool operator==(const ScenarioScript&) const = default;

  SystemConfig config() const;
  Schedule schedule() const { return Schedule{seed, fairness, crashes}; }
  Schedule schedule_with_seed(std::uint64_t s) const {
    return Schedule{s, fairness, crashes};
  }
};

// Throws ScenarioError on any violated constraint: unknown processes, more
// than f distinct crash targets, actions that do not fit the mode, transfers
// with a non-positive delta in protocol mode, and so on.
void validate(const ScenarioScript& script, const SystemConfig& cfg,
              const Schedule& schedule);

}  // namespace wqs::sim
