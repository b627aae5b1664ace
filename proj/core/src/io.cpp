#include "wqs/io.hpp"

#include <json.hpp>
#include <sstream>

namespace wqs::io {

using json = nlohmann::ordered_json;
using namespace wqs::sim;

namespace {

// ---- building blocks ----

json weight_j(const Weight& w) { return w.to_string(); }
Weight weight_p(const json& j) { return Weight::parse(j.get<std::string>()); }

json pid_j(const ProcessId& p) { return p.name(); }
ProcessId pid_p(const json& j) {
  return ProcessId::parse(j.get<std::string>());
}

json change_j(const Change& c) {
  return json{{"by", pid_j(c.issuer)},
              {"cnt", c.counter},
              {"on", pid_j(c.target)},
              {"d", weight_j(c.delta)}};
}
Change change_p(const json& j) {
  return Change{pid_p(j.at("by")), j.at("cnt").get<std::uint64_t>(),
                pid_p(j.at("on")), weight_p(j.at("d"))};
}

json changes_j(const ChangeSet& cs) {
  json out = json::array();
  for (const auto& c : cs) {
    out.push_back(change_j(c));
  }
  return out;
}
ChangeSet changes_p(const json& j) {
  ChangeSet out;
  for (const auto& e : j) {
    out.insert(change_p(e));
  }
  return out;
}

json changevec_j(const std::vector<Change>& cs) {
  json out = json::array();
  for (const auto& c : cs) {
    out.push_back(change_j(c));
  }
  return out;
}
std::vector<Change> changevec_p(const json& j) {
  std::vector<Change> out;
  for (const auto& e : j) {
    out.push_back(change_p(e));
  }
  return out;
}

json tag_j(const Tag& t) {
  return json{{"ts", t.ts}, {"pid", pid_j(t.pid)}};
}
Tag tag_p(const json& j) {
  return Tag{j.at("ts").get<std::uint64_t>(), pid_p(j.at("pid"))};
}

json val_j(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}
std::optional<std::string> val_p(const json& j) {
  if (j.is_null()) {
    return std::nullopt;
  }
  return j.get<std::string>();
}

json cell_j(const RegisterCell& c) {
  return json{{"tag", tag_j(c.tag)}, {"val", val_j(c.val)}};
}
RegisterCell cell_p(const json& j) {
  return RegisterCell{tag_p(j.at("tag")), val_p(j.at("val"))};
}

// ---- payloads ----

json payload_j(const Payload& p) {
  json out;
  out["kind"] = payload_kind(p);
  std::visit(
      [&](const auto& m) {
        using P = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<P, RcRequest>) {
          out["target"] = pid_j(m.target);
          out["session"] = m.session;
        } else if constexpr (std::is_same_v<P, RcAck>) {
          out["session"] = m.session;
          out["changes"] = changes_j(m.changes);
        } else if constexpr (std::is_same_v<P, WcRequest>) {
          out["session"] = m.session;
          out["changes"] = changes_j(m.changes);
        } else if constexpr (std::is_same_v<P, WcAck>) {
          out["session"] = m.session;
        } else if constexpr (std::is_same_v<P, RbRelay>) {
          out["origin"] = pid_j(m.origin);
          out["bcast"] = m.bcast;
          out["debit"] = change_j(m.inner.debit);
          out["credit"] = change_j(m.inner.credit);
        } else if constexpr (std::is_same_v<P, TransferAck>) {
          out["counter"] = m.counter;
        } else if constexpr (std::is_same_v<P, ReadRequest>) {
          out["opcnt"] = m.op_cnt;
        } else if constexpr (std::is_same_v<P, ReadAck>) {
          out["opcnt"] = m.op_cnt;
          out["cell"] = cell_j(m.cell);
          out["changes"] = changes_j(m.changes);
        } else if constexpr (std::is_same_v<P, WriteRequest>) {
          out["opcnt"] = m.op_cnt;
          out["tag"] = tag_j(m.tag);
          out["val"] = val_j(m.val);
        } else if constexpr (std::is_same_v<P, WriteAck>) {
          out["opcnt"] = m.op_cnt;
          out["changes"] = changes_j(m.changes);
        } else if constexpr (std::is_same_v<P, DemoPoll>) {
          // no fields
        }
      },
      p);
  return out;
}

Payload payload_p(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "RC") {
    return RcRequest{pid_p(j.at("target")),
                     j.at("session").get<std::uint64_t>()};
  }
  if (kind == "RC_Ack") {
    return RcAck{j.at("session").get<std::uint64_t>(),
                 changes_p(j.at("changes"))};
  }
  if (kind == "WC") {
    return WcRequest{j.at("session").get<std::uint64_t>(),
                     changes_p(j.at("changes"))};
  }
  if (kind == "WC_Ack") {
    return WcAck{j.at("session").get<std::uint64_t>()};
  }
  if (kind == "RB") {
    return RbRelay{pid_p(j.at("origin")), j.at("bcast").get<std::uint64_t>(),
                   TransferMsg{change_p(j.at("debit")),
                               change_p(j.at("credit"))}};
  }
  if (kind == "T_Ack") {
    return TransferAck{j.at("counter").get<std::uint64_t>()};
  }
  if (kind == "R") {
    return ReadRequest{j.at("opcnt").get<std::uint64_t>()};
  }
  if (kind == "R_A") {
    return ReadAck{j.at("opcnt").get<std::uint64_t>(), cell_p(j.at("cell")),
                   changes_p(j.at("changes"))};
  }
  if (kind == "W") {
    return WriteRequest{j.at("opcnt").get<std::uint64_t>(),
                        tag_p(j.at("tag")), val_p(j.at("val"))};
  }
  if (kind == "W_A") {
    return WriteAck{j.at("opcnt").get<std::uint64_t>(),
                    changes_p(j.at("changes"))};
  }
  if (kind == "POLL") {
    return DemoPoll{};
  }
  throw std::invalid_argument("unknown payload kind: " + kind);
}

json envelope_j(const Envelope& e) {
  return json{{"seq", e.seq},
              {"from", pid_j(e.from)},
              {"to", pid_j(e.to)},
              {"payload", payload_j(e.payload)}};
}
Envelope envelope_p(const json& j) {
  return Envelope{j.at("seq").get<std::uint64_t>(), pid_p(j.at("from")),
                  pid_p(j.at("to")), payload_p(j.at("payload"))};
}

// ---- actions and results ----

json action_j(const Action& a) {
  json out;
  out["kind"] = action_kind(a);
  std::visit(
      [&](const auto& m) {
        using A = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<A, ActTransfer>) {
          out["to"] = pid_j(m.dest);
          out["delta"] = weight_j(m.delta);
        } else if constexpr (std::is_same_v<A, ActReassign>) {
          out["on"] = pid_j(m.target);
          out["delta"] = weight_j(m.delta);
        } else if constexpr (std::is_same_v<A, ActReadChanges>) {
          out["target"] = pid_j(m.target);
        } else if constexpr (std::is_same_v<A, ActWrite>) {
          out["value"] = m.value;
        } else if constexpr (std::is_same_v<A, ActPropose>) {
          out["value"] = m.value;
        }
      },
      a);
  return out;
}

Action action_p(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "transfer") {
    return ActTransfer{pid_p(j.at("to")), weight_p(j.at("delta"))};
  }
  if (kind == "reassign") {
    return ActReassign{pid_p(j.at("on")), weight_p(j.at("delta"))};
  }
  if (kind == "read_changes") {
    return ActReadChanges{pid_p(j.at("target"))};
  }
  if (kind == "read") {
    return ActRead{};
  }
  if (kind == "write") {
    return ActWrite{j.at("value").get<std::string>()};
  }
  if (kind == "propose") {
    return ActPropose{j.at("value").get<std::string>()};
  }
  throw std::invalid_argument("unknown action kind: " + kind);
}

json result_j(const OpResult& r) {
  json out;
  out["kind"] = result_kind(r);
  std::visit(
      [&](const auto& m) {
        using R = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<R, ResComplete>) {
          out["change"] = change_j(m.change);
          if (m.credit) {
            out["credit"] = change_j(*m.credit);
          }
        } else if constexpr (std::is_same_v<R, ResChanges>) {
          out["changes"] = changes_j(m.changes);
        } else if constexpr (std::is_same_v<R, ResReadValue>) {
          out["value"] = val_j(m.value);
          out["tag"] = tag_j(m.tag);
        } else if constexpr (std::is_same_v<R, ResWritten>) {
          out["tag"] = tag_j(m.tag);
        } else if constexpr (std::is_same_v<R, ResDecided>) {
          out["value"] = m.value;
        }
      },
      r);
  return out;
}

OpResult result_p(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "complete") {
    ResComplete r{change_p(j.at("change")), std::nullopt};
    if (j.contains("credit")) {
      r.credit = change_p(j.at("credit"));
    }
    return r;
  }
  if (kind == "changes") {
    return ResChanges{changes_p(j.at("changes"))};
  }
  if (kind == "value") {
    return ResReadValue{val_p(j.at("value")), tag_p(j.at("tag"))};
  }
  if (kind == "written") {
    return ResWritten{tag_p(j.at("tag"))};
  }
  if (kind == "decided") {
    return ResDecided{j.at("value").get<std::string>()};
  }
  throw std::invalid_argument("unknown result kind: " + kind);
}

// ---- events ----

json event_j(const SimEvent& e) {
  json out;
  out["t"] = e.time;
  out["kind"] = event_kind(e.detail);
  std::visit(
      [&](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, EvSend>) {
          out["env"] = envelope_j(d.env);
        } else if constexpr (std::is_same_v<D, EvDeliver>) {
          out["env"] = envelope_j(d.env);
          if (!d.applied.empty()) {
            out["applied"] = changevec_j(d.applied);
          }
        } else if constexpr (std::is_same_v<D, EvCrash>) {
          out["server"] = pid_j(d.server);
        } else if constexpr (std::is_same_v<D, EvInvoke>) {
          out["op"] = d.op;
          out["actor"] = pid_j(d.actor);
          out["action"] = action_j(d.action);
          if (d.internal) {
            out["internal"] = true;
          }
          if (d.skipped) {
            out["skipped"] = true;
          }
          if (!d.applied.empty()) {
            out["applied"] = changevec_j(d.applied);
          }
        } else if constexpr (std::is_same_v<D, EvRespond>) {
          out["op"] = d.op;
          out["actor"] = pid_j(d.actor);
          out["result"] = result_j(d.result);
          if (d.internal) {
            out["internal"] = true;
          }
        } else if constexpr (std::is_same_v<D, EvRbDeliver>) {
          out["server"] = pid_j(d.server);
          out["origin"] = pid_j(d.origin);
          out["bcast"] = d.bcast;
          out["debit"] = change_j(d.inner.debit);
          out["credit"] = change_j(d.inner.credit);
        }
      },
      e.detail);
  return out;
}

SimEvent event_p(const json& j) {
  SimEvent e;
  e.time = j.at("t").get<std::uint64_t>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "send") {
    e.detail = EvSend{envelope_p(j.at("env"))};
  } else if (kind == "deliver") {
    EvDeliver d{envelope_p(j.at("env")), {}};
    if (j.contains("applied")) {
      d.applied = changevec_p(j.at("applied"));
    }
    e.detail = std::move(d);
  } else if (kind == "crash") {
    e.detail = EvCrash{pid_p(j.at("server"))};
  } else if (kind == "invoke") {
    EvInvoke d;
    d.op = j.at("op").get<std::uint64_t>();
    d.actor = pid_p(j.at("actor"));
    d.action = action_p(j.at("action"));
    d.internal = j.value("internal", false);
    d.skipped = j.value("skipped", false);
    if (j.contains("applied")) {
      d.applied = changevec_p(j.at("applied"));
    }
    e.detail = std::move(d);
  } else if (kind == "respond") {
    EvRespond d;
    d.op = j.at("op").get<std::uint64_t>();
    d.actor = pid_p(j.at("actor"));
    d.result = result_p(j.at("result"));
    d.internal = j.value("internal", false);
    e.detail = std::move(d);
  } else if (kind == "rbdeliver") {
    e.detail = EvRbDeliver{pid_p(j.at("server")), pid_p(j.at("origin")),
                           j.at("bcast").get<std::uint64_t>(),
                           TransferMsg{change_p(j.at("debit")),
                                       change_p(j.at("credit"))}};
  } else {
    throw std::invalid_argument("unknown event kind: " + kind);
  }
  return e;
}

json fairness_j(const Fairness& f) {
  if (f.adversarial) {
    return json{{"adversarial", f.bound}};
  }
  return "fair";
}
Fairness fairness_p(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "fair") {
      throw std::invalid_argument("unknown fairness: " +
                                  j.get<std::string>());
    }
    return Fairness::fair();
  }
  return Fairness::adversarial_bounded(
      j.at("adversarial").get<std::uint32_t>());
}

json weights_j(const std::vector<Weight>& ws) {
  json out = json::array();
  for (const auto& w : ws) {
    out.push_back(weight_j(w));
  }
  return out;
}
std::vector<Weight> weights_p(const json& j) {
  std::vector<Weight> out;
  for (const auto& e : j) {
    out.push_back(weight_p(e));
  }
  return out;
}

json meta_j(const TraceMeta& m) {
  return json{
      {"meta",
       json{{"name", m.name},
            {"mode", mode_name(m.mode)},
            {"n", m.n},
            {"f", m.f},
            {"weights", weights_j(m.initial_weights)},
            {"seed", m.seed},
            {"fairness", fairness_j(m.fairness)},
            {"step_limit", m.step_limit},
            {"outcome", m.outcome == RunOutcome::quiescent ? "quiescent"
                                                           : "step-limit"}}}};
}

TraceMeta meta_p(const json& j) {
  const json& m = j.at("meta");
  TraceMeta out;
  out.name = m.at("name").get<std::string>();
  out.mode = parse_mode(m.at("mode").get<std::string>());
  out.n = m.at("n").get<std::uint32_t>();
  out.f = m.at("f").get<std::uint32_t>();
  out.initial_weights = weights_p(m.at("weights"));
  out.seed = m.at("seed").get<std::uint64_t>();
  out.fairness = fairness_p(m.at("fairness"));
  out.step_limit = m.at("step_limit").get<std::uint64_t>();
  out.outcome = m.at("outcome").get<std::string>() == "quiescent"
                    ? RunOutcome::quiescent
                    : RunOutcome::step_limit_exceeded;
  return out;
}

}  // namespace

void write_jsonl(std::ostream& os, const sim::Trace& trace) {
  os << meta_j(trace.meta).dump() << "\n";
  for (const auto& e : trace.events) {
    os << event_j(e).dump() << "\n";
  }
}

std::string to_jsonl(const sim::Trace& trace) {
  std::ostringstream os;
  write_jsonl(os, trace);
  return os.str();
}

sim::Trace trace_from_jsonl(std::istream& is) {
  sim::Trace out;
  std::string line;
  bool have_meta = false;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    const json j = json::parse(line);
    if (!have_meta) {
      out.meta = meta_p(j);
      have_meta = true;
    } else {
      out.events.push_back(event_p(j));
    }
  }
  if (!have_meta) {
    throw std::invalid_argument("trace stream has no meta record");
  }
  return out;
}

sim::Trace trace_from_jsonl(const std::string& text) {
  std::istringstream is(text);
  return trace_from_jsonl(is);
}

std::string to_json(const sim::ScenarioScript& s) {
  json steps = json::array();
  for (const auto& st : s.steps) {
    steps.push_back(json{{"at", st.at},
                         {"actor", pid_j(st.actor)},
                         {"action", action_j(st.action)}});
  }
  json crashes = json::array();
  for (const auto& c : s.crashes) {
    crashes.push_back(json{{"server", pid_j(c.server)}, {"at", c.at}});
  }
  const json out{{"name", s.name},
                 {"mode", mode_name(s.mode)},
                 {"n", s.n},
                 {"f", s.f},
                 {"initial_weights", weights_j(s.initial_weights)},
                 {"seed", s.seed},
                 {"fairness", fairness_j(s.fairness)},
                 {"step_limit", s.step_limit},
                 {"crashes", crashes},
                 {"steps", steps}};
  return out.dump(2);
}

sim::ScenarioScript scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  sim::ScenarioScript s;
  s.name = j.at("name").get<std::string>();
  s.mode = parse_mode(j.at("mode").get<std::string>());
  s.n = j.at("n").get<std::uint32_t>();
  s.f = j.at("f").get<std::uint32_t>();
  if (j.contains("initial_weights")) {
    s.initial_weights = weights_p(j.at("initial_weights"));
  }
  s.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("fairness")) {
    s.fairness = fairness_p(j.at("fairness"));
  }
  s.step_limit = j.value("step_limit", kDefaultStepLimit);
  if (j.contains("crashes")) {
    for (const auto& c : j.at("crashes")) {
      s.crashes.push_back(
          CrashPoint{pid_p(c.at("server")), c.at("at").get<std::uint64_t>()});
    }
  }
  if (j.contains("steps")) {
    for (const auto& st : j.at("steps")) {
      s.steps.push_back(ScenarioStep{st.at("at").get<std::uint64_t>(),
                                     pid_p(st.at("actor")),
                                     action_p(st.at("action"))});
    }
  }
  return s;
}

}  // namespace wqs::io
