#include "wqs/scenario.hpp"

#include <set>

namespace wqs::sim {

const char* action_kind(const Action& a) {
  struct Visitor {
    const char* operator()(const ActTransfer&) const { return "transfer"; }
    const char* operator()(const ActReassign&) const { return "reassign"; }
    const char* operator()(const ActReadChanges&) const {
      return "read_changes";
    }
    const char* operator()(const ActRead&) const { return "read"; }
    const char* operator()(const ActWrite&) const { return "write"; }
    const char* operator()(const ActPropose&) const { return "propose"; }
  };
  return std::visit(Visitor{}, a);
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::protocol:
      return "rpwr";
    case Mode::demo_wr:
      return "demo-wr";
    case Mode::demo_pwr:
      return "demo-pwr";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  if (name == "rpwr" || name == "dwas" || name == "protocol") {
    return Mode::protocol;
  }
  if (name == "demo-wr") {
    return Mode::demo_wr;
  }
  if (name == "demo-pwr") {
    return Mode::demo_pwr;
  }
  throw ScenarioError("unknown mode: " + name);
}

SystemConfig ScenarioScript::config() const {
  if (initial_weights.empty()) {
    return SystemConfig::uniform(n, f);
  }
  return SystemConfig(n, f, initial_weights);
}

namespace {

void validate_action(const ScenarioScript& script, const SystemConfig& cfg,
                     const ScenarioStep& step) {
  const ProcessId& actor = step.actor;
  const bool demo = script.mode != Mode::protocol;

  if (actor.is_server()) {
    if (!cfg.is_valid_server(actor)) {
      throw ScenarioError("step names unknown server " + actor.name());
    }
  } else if (!actor.is_client()) {
    throw ScenarioError("step actor must be a server or a client");
  }

  struct Visitor {
    const ScenarioScript& script;
    const SystemConfig& cfg;
    const ProcessId& actor;
    const bool demo;

    void operator()(const ActTransfer& a) const {
      if (script.mode == Mode::demo_wr) {
        throw ScenarioError("transfer is not a demo-wr action");
      }
      if (!actor.is_server()) {
        throw ScenarioError("only servers transfer weight");
      }
      if (!cfg.is_valid_server(a.dest)) {
        throw ScenarioError("transfer destination is not a server");
      }
      if (a.dest == actor) {
        throw ScenarioError("transfer destination equals the source");
      }
      if (script.mode == Mode::protocol) {
        if (!a.delta.is_positive()) {
          throw ScenarioError(
              "protocol transfers require a positive delta: only the source "
              "guards its own weight");
        }
      } else if (a.delta.is_zero()) {
        throw ScenarioError("transfer delta must be non-zero");
      }
    }
    void operator()(const ActReassign& a) const {
      if (script.mode != Mode::demo_wr) {
        throw ScenarioError("reassign runs only against the demo-wr oracle");
      }
      if (!actor.is_server()) {
        throw ScenarioError("only servers invoke reassign");
      }
      if (!cfg.is_valid_server(a.target)) {
        throw ScenarioError("reassign target is not a server");
      }
      if (a.delta.is_zero()) {
        throw ScenarioError("reassign delta must be non-zero");
      }
    }
    void operator()(const ActReadChanges& a) const {
      if (!cfg.is_valid_server(a.target)) {
        throw ScenarioError("read_changes target is not a server");
      }
    }
    void operator()(const ActRead&) const {
      if (demo) {
        throw ScenarioError("storage reads require protocol mode");
      }
    }
    void operator()(const ActWrite&) const {
      if (demo) {
        throw ScenarioError("storage writes require protocol mode");
      }
    }
    void operator()(const ActPropose&) const {
      if (!demo) {
        throw ScenarioError("propose requires a demo mode");
      }
      if (!actor.is_server()) {
        throw ScenarioError("only servers propose");
      }
      if (script.mode == Mode::demo_pwr && cfg.f() < 2) {
        throw ScenarioError(
            "the pairwise reduction's intra-F transfers need f >= 2");
      }
    }
  };
  std::visit(Visitor{script, cfg, actor, demo}, step.action);
}

}  // namespace

void validate(const ScenarioScript& script, const SystemConfig& cfg,
              const Schedule& schedule) {
  if (script.n != cfg.n() || script.f != cfg.f()) {
    throw ScenarioError("scenario and config disagree on n or f");
  }
  if (script.step_limit == 0) {
    throw ScenarioError("step limit must be positive");
  }

  std::set<ProcessId> crash_targets;
  for (const auto& cp : schedule.crash_plan) {
    if (!cfg.is_valid_server(cp.server)) {
      throw ScenarioError("crash plan names a non-server process");
    }
    crash_targets.insert(cp.server);
  }
  if (crash_targets.size() > cfg.f()) {
    throw ScenarioError("crash plan names more than f distinct servers");
  }

  std::set<ProcessId> proposers;
  bool any_propose = false;
  bool any_oracle_mutation = false;
  for (const auto& step : script.steps) {
    validate_action(script, cfg, step);
    if (std::holds_alternative<ActPropose>(step.action)) {
      any_propose = true;
      if (!proposers.insert(step.actor).second) {
        throw ScenarioError(step.actor.name() + " proposes twice");
      }
    }
    if (script.mode != Mode::protocol &&
        (std::holds_alternative<ActReassign>(step.action) ||
         std::holds_alternative<ActTransfer>(step.action))) {
      any_oracle_mutation = true;
    }
  }
  // The consensus demos identify outcomes by (issuer, counter 2); raw oracle
  // mutations in the same run would collide with that convention.
  if (any_propose && any_oracle_mutation) {
    throw ScenarioError(
        "a demo scenario cannot mix propose with raw reassign/transfer steps");
  }
}

}  // namespace wqs::sim
