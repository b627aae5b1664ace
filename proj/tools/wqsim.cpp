// wqsim: scenario runner and trace tooling for the weighted-quorum storage
// simulator.  Exit codes: 0 success, 1 checker/liveness failure, 2 invalid
// configuration or scenario.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wqs/bundled.hpp"
#include "wqs/checkers.hpp"
#include "wqs/io.hpp"
#include "wqs/quorum.hpp"
#include "wqs/sim.hpp"

namespace {

using namespace wqs;

struct SeedRange {
  std::uint64_t first = 1;
  std::uint64_t last = 1;
};

SeedRange parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto v = std::stoull(text);
    return {v, v};
  }
  SeedRange r;
  r.first = std::stoull(text.substr(0, dots));
  r.last = std::stoull(text.substr(dots + 2));
  if (r.last < r.first) {
    throw sim::ScenarioError("empty seed range: " + text);
  }
  return r;
}

// A scenario argument is either a bundled name or a path to a JSON file.
sim::ScenarioScript load_scenario(const std::string& ref, std::uint64_t seed) {
  if (bundled::exists(ref)) {
    return bundled::make(ref, seed);
  }
  std::ifstream in(ref);
  if (!in) {
    throw sim::ScenarioError("no bundled scenario or file named '" + ref +
                             "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto script = io::scenario_from_json(buf.str());
  script.seed = seed;
  return script;
}

void apply_step_limit_env(sim::ScenarioScript& script) {
  if (const char* cap = std::getenv("WQSIM_STEP_LIMIT")) {
    const auto v = std::strtoull(cap, nullptr, 10);
    if (v > 0 && v < script.step_limit) {
      script.step_limit = v;
    }
  }
}

sim::Trace run_one(const std::string& ref, std::uint64_t seed) {
  auto script = load_scenario(ref, seed);
  apply_step_limit_env(script);
  return sim::Simulator::execute(script, seed);
}

bool report_suite(const sim::Trace& trace, const std::string& suite,
                  const std::string& label) {
  bool ok = true;
  for (const auto& [checker, verdict] : check::run_suite(trace, suite)) {
    if (verdict.pass) {
      std::cout << label << " " << checker << ": pass\n";
    } else {
      ok = false;
      std::cout << label << " " << checker << ": FAIL";
      if (verdict.at) {
        std::cout << " at t=" << *verdict.at;
      }
      std::cout << " -- " << verdict.message << "\n";
    }
  }
  return ok;
}

int cmd_run(const std::string& ref, const std::string& seeds_arg,
            const std::string& trace_out) {
  const SeedRange seeds = parse_seeds(seeds_arg);
  bool ok = true;
  for (std::uint64_t seed = seeds.first; seed <= seeds.last; ++seed) {
    const sim::Trace trace = run_one(ref, seed);
    const bool quiescent =
        trace.meta.outcome == sim::RunOutcome::quiescent;
    std::cout << trace.meta.name << " seed=" << seed << ": "
              << trace.events.size() << " events, "
              << (quiescent ? "quiescent" : "step limit exceeded") << "\n";
    ok = ok && quiescent;
    if (!trace_out.empty()) {
      std::string path = trace_out;
      if (seeds.first != seeds.last) {
        path += "." + std::to_string(seed);
      }
      std::ofstream os(path, std::ios::binary);
      if (!os) {
        throw std::runtime_error("cannot write " + path);
      }
      io::write_jsonl(os, trace);
    }
  }
  return ok ? 0 : 1;
}

int cmd_check(const std::string& path, const std::string& suite) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read " + path);
  }
  const sim::Trace trace = io::trace_from_jsonl(in);
  return report_suite(trace, suite, path) ? 0 : 1;
}

int cmd_sweep(const std::string& ref, const std::string& seeds_arg,
              const std::string& suite) {
  const SeedRange seeds = parse_seeds(seeds_arg);
  bool ok = true;
  std::uint64_t runs = 0;
  std::uint64_t effective_total = 0;
  bool uniform_effective = true;
  std::optional<std::uint64_t> first_effective;

  for (std::uint64_t seed = seeds.first; seed <= seeds.last; ++seed) {
    const sim::Trace trace = run_one(ref, seed);
    ++runs;
    for (const auto& [checker, verdict] : check::run_suite(trace, suite)) {
      if (!verdict.pass) {
        ok = false;
        std::cout << "seed " << seed << " " << checker << ": FAIL -- "
                  << verdict.message << "\n";
      }
    }
    std::uint64_t effective = 0;
    for (const auto& e : trace.events) {
      if (const auto* r = std::get_if<sim::EvRespond>(&e.detail)) {
        if (const auto* c = std::get_if<sim::ResComplete>(&r->result)) {
          if (!c->change.delta.is_zero()) {
            ++effective;  // one per effective transfer/reassign
          }
        }
      }
    }
    effective_total += effective;
    if (!first_effective) {
      first_effective = effective;
    } else if (*first_effective != effective) {
      uniform_effective = false;
    }
  }
  std::cout << ref << ": " << runs << " runs, all checks "
            << (ok ? "passed" : "FAILED") << "\n";
  if (uniform_effective && first_effective) {
    std::cout << "effective reassigns per run: " << *first_effective << "\n";
  } else if (runs > 0) {
    std::cout << "effective reassigns: " << effective_total << " over " << runs
              << " runs\n";
  }
  return ok ? 0 : 1;
}

int cmd_examples() {
  bool ok = true;

  // Example 1: the sequential-oracle replay.
  {
    const sim::Trace t = run_one("example1", 1);
    bool good = check::check_liveness(t).pass &&
                check::monitor_integrity(t).pass;
    Weight w_s1;
    std::optional<Change> null_change;
    for (const auto& e : t.events) {
      if (const auto* r = std::get_if<sim::EvRespond>(&e.detail)) {
        if (const auto* rc = std::get_if<sim::ResChanges>(&r->result)) {
          if (weight_of(rc->changes, ProcessId::server(0)).is_positive()) {
            w_s1 = weight_of(rc->changes, ProcessId::server(0));
          }
        }
        if (const auto* c = std::get_if<sim::ResComplete>(&r->result)) {
          if (c->change.delta.is_zero()) {
            null_change = c->change;
          }
        }
      }
    }
    good = good && w_s1 == Weight(5, 2) && null_change.has_value() &&
           *null_change ==
               Change{ProcessId::server(2), 2, ProcessId::server(1), Weight(0)};
    std::cout << "example1: weight(s1)=" << w_s1.to_string()
              << ", aborted reassign recorded as zero change: "
              << (null_change ? "yes" : "no") << " -> "
              << (good ? "ok" : "FAIL") << "\n";
    ok = ok && good;
  }

  // Example 2 and the section-V-C weights, on the full protocol.
  for (const char* name : {"example2", "vc-example"}) {
    const sim::Trace t = run_one(name, 1);
    const bool good = report_suite(t, "all", name);
    ok = ok && good;
  }

  // Consensus reduction demos.
  for (const char* name : {"alg1-demo", "alg2-demo"}) {
    bool good = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const sim::Trace t = run_one(name, seed);
      for (const auto& [checker, verdict] : check::run_suite(t, "all")) {
        if (!verdict.pass) {
          good = false;
          std::cout << name << " seed " << seed << " " << checker
                    << ": FAIL -- " << verdict.message << "\n";
        }
      }
    }
    std::cout << name << " (20 seeds): " << (good ? "ok" : "FAIL") << "\n";
    ok = ok && good;
  }

  std::cout << (ok ? "all examples passed" : "EXAMPLES FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wqsim -- deterministic simulator for pairwise weight reassignment "
      "and dynamic-weighted atomic storage"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string seed_arg = "1";
  std::string seeds_arg;
  std::string trace_out;
  std::string trace_path;
  std::string suite = "all";

  auto* run = app.add_subcommand("run", "execute a scenario");
  run->add_option("scenario", scenario_ref,
                  "bundled scenario name or JSON file")
      ->required();
  auto* seed_opt = run->add_option("--seed", seed_arg, "single seed");
  run->add_option("--seeds", seeds_arg, "seed range A..B")
      ->excludes(seed_opt);
  run->add_option("--trace", trace_out, "write the trace (JSONL)");

  auto* check_cmd = app.add_subcommand("check", "run checkers over a trace");
  check_cmd->add_option("trace", trace_path, "trace file (JSONL)")->required();
  check_cmd
      ->add_option("--suite", suite,
                   "integrity | atomicity | validity2 | all")
      ->required();

  auto* sweep = app.add_subcommand("sweep", "run and check many seeds");
  sweep->add_option("scenario", scenario_ref,
                    "bundled scenario name or JSON file")
      ->required();
  sweep->add_option("--seeds", seeds_arg, "seed range A..B")->required();
  sweep->add_option("--suite", suite, "checker suite (default: all)");

  app.add_subcommand("examples", "replay the bundled worked examples");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(scenario_ref, seeds_arg.empty() ? seed_arg : seeds_arg,
                     trace_out);
    }
    if (check_cmd->parsed()) {
      return cmd_check(trace_path, suite);
    }
    if (sweep->parsed()) {
      return cmd_sweep(scenario_ref, seeds_arg, suite);
    }
    return cmd_examples();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const sim::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
