#include "wqs/checkers.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "wqs/quorum.hpp"

namespace wqs::check {

namespace {

std::string weight_str(const Weight& w) { return w.to_string(); }

const sim::EvInvoke* as_invoke(const sim::SimEvent& e) {
  return std::get_if<sim::EvInvoke>(&e.detail);
}
const sim::EvRespond* as_respond(const sim::SimEvent& e) {
  return std::get_if<sim::EvRespond>(&e.detail);
}

// The process whose local change set an event's `applied` list belongs to.
const std::vector<Change>* applied_of(const sim::SimEvent& e,
                                      ProcessId* proc) {
  if (const auto* d = std::get_if<sim::EvDeliver>(&e.detail)) {
    *proc = d->env.to;
    return &d->applied;
  }
  if (const auto* i = as_invoke(e)) {
    *proc = i->actor;
    return &i->applied;
  }
  return nullptr;
}

std::set<ProcessId> crashed_servers(const sim::Trace& trace) {
  std::set<ProcessId> out;
  for (const auto& e : trace.events) {
    if (const auto* c = std::get_if<sim::EvCrash>(&e.detail)) {
      out.insert(c->server);
    }
  }
  return out;
}

}  // namespace

std::vector<LedgerEntry> completion_ledger(const sim::Trace& trace) {
  std::vector<LedgerEntry> out;
  for (const auto& e : trace.events) {
    const auto* r = as_respond(e);
    if (r == nullptr) {
      continue;
    }
    const auto* c = std::get_if<sim::ResComplete>(&r->result);
    if (c == nullptr || c->change.delta.is_zero()) {
      continue;  // null outcomes store nothing
    }
    out.push_back(LedgerEntry{e.time, c->change});
    if (c->credit) {
      out.push_back(LedgerEntry{e.time, *c->credit});
    }
  }
  return out;
}

Verdict monitor_integrity(const sim::Trace& trace) {
  const SystemConfig cfg = trace.config();
  const Weight initial_total = cfg.initial_total();
  const Weight threshold =
      cfg.n() > cfg.f() ? min_weight_threshold(cfg) : Weight(0);
  const auto ledger = completion_ledger(trace);

  ChangeSet completed = cfg.initial_changes();
  std::size_t i = 0;
  while (true) {
    // Check one prefix: after initialization, then after each completion
    // event (both halves of a pair land atomically).
    if (trace.meta.mode == sim::Mode::protocol) {
      for (const auto& s : cfg.servers()) {
        const Weight w = weight_of(completed, s);
        if (!(threshold < w)) {
          return Verdict::fail(
              "RP-Integrity violated: weight of " + s.name() + " is " +
                  weight_str(w) + ", not above " + weight_str(threshold),
              i == 0 ? 0 : ledger[i - 1].time);
        }
      }
      const Weight total = total_weight(completed, cfg);
      if (total != initial_total) {
        return Verdict::fail(
            "weight not conserved: total " + weight_str(total) +
                " != " + weight_str(initial_total),
            i == 0 ? 0 : ledger[i - 1].time);
      }
    } else if (trace.meta.mode == sim::Mode::demo_pwr) {
      const Weight total = total_weight(completed, cfg);
      if (total != initial_total) {
        return Verdict::fail("pairwise oracle lost weight: total " +
                                 weight_str(total),
                             i == 0 ? 0 : ledger[i - 1].time);
      }
      if (!check_availability(completed, cfg)) {
        return Verdict::fail("P-Integrity violated",
                             i == 0 ? 0 : ledger[i - 1].time);
      }
    } else {
      if (!check_availability(completed, cfg)) {
        return Verdict::fail("Integrity violated: f heaviest servers hold "
                             "at least half of the total",
                             i == 0 ? 0 : ledger[i - 1].time);
      }
    }

    if (i == ledger.size()) {
      break;
    }
    // Apply every entry that completed at the same event time together.
    const std::uint64_t t = ledger[i].time;
    while (i < ledger.size() && ledger[i].time == t) {
      completed.insert(ledger[i].change);
      ++i;
    }
  }
  return Verdict::ok();
}

Verdict check_validity_ii(const sim::Trace& trace) {
  const SystemConfig cfg = trace.config();
  const auto ledger = completion_ledger(trace);
  std::map<std::uint64_t, std::pair<std::uint64_t, ProcessId>> open;  // op -> (invoke time, target)

  for (const auto& e : trace.events) {
    if (const auto* inv = as_invoke(e)) {
      if (inv->internal || inv->skipped) {
        continue;
      }
      if (const auto* rc = std::get_if<sim::ActReadChanges>(&inv->action)) {
        open[inv->op] = {e.time, rc->target};
      }
      continue;
    }
    const auto* r = as_respond(e);
    if (r == nullptr || r->internal) {
      continue;
    }
    const auto it = open.find(r->op);
    if (it == open.end()) {
      continue;
    }
    const auto [invoke_time, target] = it->second;
    open.erase(it);
    const auto* res = std::get_if<sim::ResChanges>(&r->result);
    if (res == nullptr) {
      return Verdict::fail("read_changes answered with a non-changeset",
                           e.time);
    }
    // Everything completed on the target before the invocation must appear.
    ChangeSet required = cfg.initial_changes().for_target(target);
    for (const auto& entry : ledger) {
      if (entry.time <= invoke_time && entry.change.target == target) {
        required.insert(entry.change);
      }
    }
    for (const auto& c : required) {
      if (!res->changes.contains(c)) {
        std::ostringstream msg;
        msg << "RP-Validity-II violated: response of op " << r->op
            << " misses completed change " << c;
        return Verdict::fail(msg.str(), e.time);
      }
    }
  }
  return Verdict::ok();
}

Verdict check_effectiveness(const sim::Trace& trace) {
  if (trace.meta.mode != sim::Mode::protocol) {
    return Verdict::ok();
  }
  const SystemConfig cfg = trace.config();
  const Weight threshold = min_weight_threshold(cfg);

  std::map<ProcessId, ChangeSet> local;
  for (const auto& s : cfg.servers()) {
    local[s] = cfg.initial_changes();
  }
  struct OpenTransfer {
    ProcessId issuer;
    Weight weight_at_invoke;
    Weight delta;
  };
  std::map<std::uint64_t, OpenTransfer> open;
  std::set<std::pair<ProcessId, std::uint64_t>> broadcast;  // (issuer, counter)

  // The guard's basis, recomputed from the replayed local set: the weight a
  // server can vouch for regardless of which transfers completed, i.e. its
  // self-issued self-targeted changes (initial minus transferred away).
  const auto guard_weight = [](const ChangeSet& cs, const ProcessId& self) {
    Weight sum;
    for (const auto& c : cs) {
      if (c.issuer == self && c.target == self) {
        sum += c.delta;
      }
    }
    return sum;
  };

  for (const auto& e : trace.events) {
    if (const auto* inv = as_invoke(e)) {
      if (!inv->internal && !inv->skipped) {
        if (const auto* t = std::get_if<sim::ActTransfer>(&inv->action)) {
          // Weight before this event's own insertions.
          open[inv->op] = OpenTransfer{
              inv->actor, guard_weight(local[inv->actor], inv->actor),
              t->delta};
        }
      }
    }
    if (const auto* s = std::get_if<sim::EvSend>(&e.detail)) {
      if (const auto* rb = std::get_if<sim::RbRelay>(&s->env.payload)) {
        broadcast.insert({rb->inner.debit.issuer, rb->inner.debit.counter});
      }
    }
    ProcessId proc;
    if (const auto* applied = applied_of(e, &proc)) {
      for (const auto& c : *applied) {
        local[proc].insert(c);
      }
    }
    const auto* r = as_respond(e);
    if (r == nullptr || r->internal) {
      continue;
    }
    const auto it = open.find(r->op);
    if (it == open.end()) {
      continue;
    }
    const OpenTransfer ot = it->second;
    open.erase(it);
    const auto* res = std::get_if<sim::ResComplete>(&r->result);
    if (res == nullptr) {
      return Verdict::fail("transfer answered with a non-complete", e.time);
    }
    const bool effective = !res->change.delta.is_zero();
    const bool precondition = ot.weight_at_invoke > ot.delta + threshold;
    if (effective != precondition) {
      std::ostringstream msg;
      msg << "transfer by " << ot.issuer.name() << " completed "
          << (effective ? "effective" : "null") << " but its precondition ("
          << weight_str(ot.weight_at_invoke) << " > "
          << weight_str(ot.delta + threshold) << ") "
          << (precondition ? "held" : "failed") << " at invocation";
      return Verdict::fail(msg.str(), e.time);
    }
    const bool was_broadcast =
        broadcast.count({res->change.issuer, res->change.counter}) > 0;
    if (effective != was_broadcast) {
      return Verdict::fail(
          effective
              ? "effective transfer without a matching reliable broadcast"
              : "null transfer must not broadcast changes",
          e.time);
    }
  }
  return Verdict::ok();
}

Verdict check_counter_uniqueness(const sim::Trace& trace) {
  // (issuer, counter, target) -> delta, across every application anywhere
  // plus every completion.
  std::map<std::tuple<ProcessId, std::uint64_t, ProcessId>, Weight> seen;
  auto admit = [&](const Change& c, std::uint64_t t) -> std::optional<Verdict> {
    const auto key = std::make_tuple(c.issuer, c.counter, c.target);
    const auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, c.delta);
      return std::nullopt;
    }
    if (it->second != c.delta) {
      std::ostringstream msg;
      msg << "two changes share (issuer, counter, target) with different "
             "weights: "
          << c;
      return Verdict::fail(msg.str(), t);
    }
    return std::nullopt;
  };
  for (const auto& e : trace.events) {
    ProcessId proc;
    if (const auto* applied = applied_of(e, &proc)) {
      for (const auto& c : *applied) {
        if (auto v = admit(c, e.time)) {
          return *v;
        }
      }
    }
    if (const auto* r = as_respond(e)) {
      if (const auto* res = std::get_if<sim::ResComplete>(&r->result)) {
        if (!res->change.delta.is_zero()) {
          if (auto v = admit(res->change, e.time)) {
            return *v;
          }
          if (res->credit) {
            if (auto v = admit(*res->credit, e.time)) {
              return *v;
            }
          }
        }
      }
    }
  }
  return Verdict::ok();
}

Verdict check_rb_agreement(const sim::Trace& trace) {
  if (trace.meta.outcome != sim::RunOutcome::quiescent) {
    // Agreement is an eventual property; a truncated run proves nothing.
    return Verdict::ok();
  }
  const SystemConfig cfg = trace.config();
  const auto crashed = crashed_servers(trace);

  std::map<std::pair<ProcessId, std::uint64_t>, std::set<ProcessId>> delivered;
  std::set<std::pair<ProcessId, std::uint64_t>> originated;  // by the origin itself
  for (const auto& e : trace.events) {
    if (const auto* rb = std::get_if<sim::EvRbDeliver>(&e.detail)) {
      const auto key = std::make_pair(rb->origin, rb->bcast);
      if (!delivered[key].insert(rb->server).second) {
        return Verdict::fail("server rb-delivered the same payload twice",
                             e.time);
      }
    }
    if (const auto* s = std::get_if<sim::EvSend>(&e.detail)) {
      if (const auto* rb = std::get_if<sim::RbRelay>(&s->env.payload)) {
        if (s->env.from == rb->origin && s->env.to == rb->origin) {
          originated.insert({rb->origin, rb->bcast});
        }
      }
    }
  }

  std::set<ProcessId> correct;
  for (const auto& s : cfg.servers()) {
    if (!crashed.count(s)) {
      correct.insert(s);
    }
  }
  for (const auto& [key, servers] : delivered) {
    for (const auto& s : correct) {
      if (!servers.count(s)) {
        return Verdict::fail("rb agreement violated: " + s.name() +
                             " never delivered a payload others delivered");
      }
    }
  }
  // Validity: a correct broadcaster's payload reaches everyone.
  for (const auto& key : originated) {
    if (!crashed.count(key.first) && !delivered.count(key)) {
      return Verdict::fail("rb validity violated: correct broadcaster " +
                           key.first.name() + " never delivered");
    }
  }
  return Verdict::ok();
}

Verdict check_unique_delivery(const sim::Trace& trace) {
  std::set<std::uint64_t> seen;
  for (const auto& e : trace.events) {
    if (const auto* d = std::get_if<sim::EvDeliver>(&e.detail)) {
      if (!seen.insert(d->env.seq).second) {
        return Verdict::fail("envelope delivered twice", e.time);
      }
    }
  }
  return Verdict::ok();
}

Verdict check_liveness(const sim::Trace& trace) {
  if (trace.meta.outcome != sim::RunOutcome::quiescent) {
    return Verdict::fail("run exhausted its step limit");
  }
  const auto crashed = crashed_servers(trace);
  std::map<std::uint64_t, ProcessId> pending;
  for (const auto& e : trace.events) {
    if (const auto* inv = as_invoke(e)) {
      if (!inv->internal && !inv->skipped) {
        pending.emplace(inv->op, inv->actor);
      }
    } else if (const auto* r = as_respond(e)) {
      if (!r->internal) {
        pending.erase(r->op);
      }
    }
  }
  for (const auto& [op, actor] : pending) {
    if (!crashed.count(actor)) {
      return Verdict::fail("operation " + std::to_string(op) + " by correct " +
                           actor.name() + " never completed");
    }
  }
  return Verdict::ok();
}

Verdict check_reduction(const sim::Trace& trace) {
  const SystemConfig cfg = trace.config();
  std::map<ProcessId, std::string> proposals;
  std::vector<std::string> decisions;
  std::size_t effective_total = 0;
  std::size_t effective_into_s1 = 0;
  std::size_t null_intra_f = 0;

  for (const auto& e : trace.events) {
    if (const auto* inv = as_invoke(e)) {
      if (!inv->skipped) {
        if (const auto* p = std::get_if<sim::ActPropose>(&inv->action)) {
          proposals[inv->actor] = p->value;
        }
      }
    }
    const auto* r = as_respond(e);
    if (r == nullptr) {
      continue;
    }
    if (const auto* d = std::get_if<sim::ResDecided>(&r->result)) {
      decisions.push_back(d->value);
    } else if (const auto* c = std::get_if<sim::ResComplete>(&r->result)) {
      const bool effective = !c->change.delta.is_zero();
      if (effective) {
        ++effective_total;
        if (c->credit && c->credit->target == ProcessId::server(0) &&
            c->change.issuer.index >= cfg.f()) {
          ++effective_into_s1;
        }
      } else if (trace.meta.mode == sim::Mode::demo_pwr &&
                 c->change.issuer.index < cfg.f()) {
        ++null_intra_f;
      }
    }
  }

  if (proposals.empty()) {
    return Verdict::ok();  // not a consensus-demo trace
  }
  if (trace.meta.mode == sim::Mode::demo_wr) {
    if (effective_total != 1) {
      return Verdict::fail("expected exactly one effective reassignment, saw " +
                           std::to_string(effective_total));
    }
  } else {
    if (effective_into_s1 != 1) {
      return Verdict::fail(
          "expected exactly one effective 0.4 transfer into s1, saw " +
          std::to_string(effective_into_s1));
    }
    if (null_intra_f != 0) {
      return Verdict::fail("an intra-F transfer completed null");
    }
  }
  for (const auto& d : decisions) {
    if (d != decisions.front()) {
      return Verdict::fail("agreement violated: decisions differ");
    }
  }
  if (!decisions.empty()) {
    bool among = false;
    bool all_equal = true;
    for (const auto& [pid, v] : proposals) {
      among = among || v == decisions.front();
      all_equal = all_equal && v == proposals.begin()->second;
    }
    if (!among) {
      return Verdict::fail("decided value was never proposed");
    }
    if (all_equal && decisions.front() != proposals.begin()->second) {
      return Verdict::fail("validity violated: unanimous proposal not decided");
    }
  }
  return Verdict::ok();
}

std::vector<OpRecord> op_history(const sim::Trace& trace) {
  std::map<std::uint64_t, OpRecord> open;
  std::vector<OpRecord> out;
  for (const auto& e : trace.events) {
    if (const auto* inv = as_invoke(e)) {
      if (inv->internal || inv->skipped) {
        continue;
      }
      OpRecord rec;
      rec.proc = inv->actor;
      rec.op = inv->op;
      rec.invoke_time = e.time;
      rec.action = inv->action;
      open.emplace(inv->op, std::move(rec));
    } else if (const auto* r = as_respond(e)) {
      if (r->internal) {
        continue;
      }
      const auto it = open.find(r->op);
      if (it == open.end()) {
        continue;
      }
      OpRecord rec = it->second;
      open.erase(it);
      rec.respond_time = e.time;
      rec.result = r->result;
      out.push_back(std::move(rec));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const OpRecord& a, const OpRecord& b) {
              return a.invoke_time < b.invoke_time;
            });
  return out;
}

std::vector<OpRecord> rw_history(const sim::Trace& trace) {
  std::vector<OpRecord> out;
  for (auto& rec : op_history(trace)) {
    if (std::holds_alternative<sim::ActRead>(rec.action) ||
        std::holds_alternative<sim::ActWrite>(rec.action)) {
      out.push_back(std::move(rec));
    }
  }
  return out;
}

namespace {

struct RwView {
  const OpRecord* rec;
  bool is_read = false;
  std::optional<std::string> value;  // read result or written value
  Tag tag;
};

std::optional<std::string> rw_views(const std::vector<OpRecord>& history,
                                    std::vector<RwView>* out) {
  for (const auto& rec : history) {
    RwView v;
    v.rec = &rec;
    if (std::holds_alternative<sim::ActRead>(rec.action)) {
      const auto* res = std::get_if<sim::ResReadValue>(&rec.result);
      if (res == nullptr) {
        return "read operation lacks a tagged value result";
      }
      v.is_read = true;
      v.value = res->value;
      v.tag = res->tag;
    } else if (const auto* w = std::get_if<sim::ActWrite>(&rec.action)) {
      const auto* res = std::get_if<sim::ResWritten>(&rec.result);
      if (res == nullptr) {
        return "write operation lacks a tag result";
      }
      v.value = w->value;
      v.tag = res->tag;
    } else {
      return "history contains a non-storage operation";
    }
    out->push_back(v);
  }
  return std::nullopt;
}

}  // namespace

Verdict check_atomicity(const std::vector<OpRecord>& history) {
  std::vector<RwView> ops;
  if (auto err = rw_views(history, &ops)) {
    return Verdict::fail(*err);
  }

  // Tags name values uniquely, and written values are the only readable ones.
  std::map<Tag, std::optional<std::string>> value_of_tag;
  value_of_tag[Tag{}] = std::nullopt;
  std::set<std::optional<std::string>> writable{{std::nullopt}};
  for (const auto& o : ops) {
    if (!o.is_read) {
      writable.insert(o.value);
    }
  }
  for (const auto& o : ops) {
    const auto it = value_of_tag.find(o.tag);
    if (it != value_of_tag.end() && it->second != o.value) {
      return Verdict::fail("two operations attach different values to one tag",
                           o.rec->respond_time);
    }
    value_of_tag.emplace(o.tag, o.value);
    if (o.is_read && !writable.count(o.value)) {
      return Verdict::fail("read returned a value nobody wrote",
                           o.rec->respond_time);
    }
  }

  for (const auto& a : ops) {
    for (const auto& b : ops) {
      if (a.rec->respond_time >= b.rec->invoke_time) {
        continue;  // not strictly before
      }
      if (a.is_read && b.is_read) {
        if (b.tag < a.tag) {
          return Verdict::fail("non-overlapping reads went backwards in tag",
                               b.rec->respond_time);
        }
        if (b.tag == a.tag && b.value != a.value) {
          return Verdict::fail("equal-tag reads returned different values",
                               b.rec->respond_time);
        }
      } else if (!a.is_read && b.is_read) {
        if (b.tag < a.tag) {
          return Verdict::fail(
              "read missed a write that completed before it started",
              b.rec->respond_time);
        }
      }
    }
  }
  return Verdict::ok();
}

Verdict check_linearizable_bruteforce(const std::vector<OpRecord>& history) {
  if (history.size() > kBruteForceMaxOps) {
    return Verdict::fail("history exceeds the brute-force size limit");
  }
  std::vector<RwView> ops;
  if (auto err = rw_views(history, &ops)) {
    return Verdict::fail(*err);
  }
  const std::size_t k = ops.size();
  if (k == 0) {
    return Verdict::ok();
  }

  // Wing & Gong style search: extend a linear prefix one operation at a
  // time.  An op is eligible if every unscheduled op's response is not
  // strictly before its invocation.  State = (scheduled mask, index of the
  // last scheduled write; k means "none yet").
  std::set<std::pair<std::uint32_t, std::size_t>> dead;
  const std::uint32_t full = (1u << k) - 1;

  struct Frame {
    std::uint32_t mask;
    std::size_t last_write;
  };
  std::vector<Frame> stack{{0, k}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    if (fr.mask == full) {
      return Verdict::ok();
    }
    if (!dead.insert({fr.mask, fr.last_write}).second) {
      continue;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (fr.mask & (1u << i)) {
        continue;
      }
      bool minimal = true;
      for (std::size_t j = 0; j < k && minimal; ++j) {
        if (i != j && !(fr.mask & (1u << j)) &&
            ops[j].rec->respond_time < ops[i].rec->invoke_time) {
          minimal = false;
        }
      }
      if (!minimal) {
        continue;
      }
      if (ops[i].is_read) {
        const std::optional<std::string>& current =
            fr.last_write == k ? std::optional<std::string>{}
                               : ops[fr.last_write].value;
        if (ops[i].value != current) {
          continue;
        }
        stack.push_back(Frame{fr.mask | (1u << i), fr.last_write});
      } else {
        stack.push_back(Frame{fr.mask | (1u << i), i});
      }
    }
  }
  return Verdict::fail("no linearization of the history exists");
}

std::vector<SuiteResult> run_suite(const sim::Trace& trace,
                                   const std::string& suite) {
  std::vector<SuiteResult> out;
  const bool all = suite == "all";
  if (all || suite == "integrity") {
    out.push_back({"integrity", monitor_integrity(trace)});
    out.push_back({"effectiveness", check_effectiveness(trace)});
    out.push_back({"counter-uniqueness", check_counter_uniqueness(trace)});
  }
  if (all || suite == "validity2") {
    out.push_back({"validity2", check_validity_ii(trace)});
  }
  if (all || suite == "atomicity") {
    out.push_back({"atomicity", check_atomicity(rw_history(trace))});
  }
  if (all) {
    out.push_back({"rb-agreement", check_rb_agreement(trace)});
    out.push_back({"unique-delivery", check_unique_delivery(trace)});
    out.push_back({"liveness", check_liveness(trace)});
    out.push_back({"reduction", check_reduction(trace)});
  }
  if (out.empty()) {
    throw std::invalid_argument("unknown checker suite: " + suite);
  }
  return out;
}

}  // namespace wqs::check
