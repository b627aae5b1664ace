#include "wqs/bundled.hpp"

#include <algorithm>

#include "wqs/rng.hpp"

namespace wqs::bundled {

using namespace wqs::sim;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h = (h ^ c) * 1099511628211ULL;
  }
  return h;
}

Rng rng_for(const std::string& name, std::uint64_t seed) {
  return Rng(fnv1a(name) ^ (seed * 0x9e3779b97f4a7c15ULL));
}

ProcessId srv(std::uint32_t i) { return ProcessId::server(i); }
ProcessId cli(std::uint32_t i) { return ProcessId::client(i); }

Fairness fairness_for(Rng& rng) {
  return rng.chance(1, 2) ? Fairness::fair() : Fairness::adversarial_bounded(8);
}

std::vector<std::uint32_t> pick_distinct(Rng& rng, std::uint32_t n,
                                         std::uint32_t k) {
  std::vector<std::uint32_t> all(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    all[i] = i;
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

const Weight kDeltas[] = {Weight(1, 20), Weight(1, 10), Weight(3, 20),
                          Weight(1, 5), Weight(1, 4)};

ScenarioScript example1() {
  ScenarioScript s;
  s.name = "example1";
  s.mode = Mode::demo_wr;
  s.n = 4;
  s.f = 1;
  s.steps = {
      {0, srv(0), ActReassign{srv(0), Weight(3, 2)}},
      {10, cli(0), ActReadChanges{srv(0)}},
      {20, srv(2), ActReassign{srv(1), Weight(-1, 2)}},
      {30, cli(1), ActReadChanges{srv(1)}},
  };
  return s;
}

ScenarioScript example2(std::uint64_t seed) {
  Rng rng = rng_for("example2", seed);
  ScenarioScript s;
  s.name = "example2";
  s.mode = Mode::protocol;
  s.n = 7;
  s.f = 2;
  s.fairness = fairness_for(rng);
  // Three effective transfers make {s1,s2,s3} a weighted quorum; the two
  // late ones fail the weight floor and complete null.
  s.steps = {
      {0, srv(3), ActTransfer{srv(0), Weight(1, 4)}},
      {0, srv(4), ActTransfer{srv(1), Weight(1, 4)}},
      {0, srv(5), ActTransfer{srv(2), Weight(1, 4)}},
      {600, cli(0), ActReadChanges{srv(0)}},
      {700, srv(5), ActTransfer{srv(0), Weight(1, 10)}},
      {700, srv(6), ActTransfer{srv(0), Weight(3, 10)}},
      {900, cli(0), ActReadChanges{srv(2)}},
  };
  return s;
}

ScenarioScript vc_example(std::uint64_t seed) {
  Rng rng = rng_for("vc-example", seed);
  ScenarioScript s;
  s.name = "vc-example";
  s.mode = Mode::protocol;
  s.n = 7;
  s.f = 2;
  s.initial_weights = {Weight(8, 5), Weight(7, 5), Weight(4, 5), Weight(4, 5),
                       Weight(4, 5), Weight(4, 5), Weight(4, 5)};
  s.fairness = fairness_for(rng);
  s.steps = {
      {0, srv(2), ActTransfer{srv(0), Weight(1, 10)}},  // 0.8 < 0.1 + 0.7: null
      {5, srv(2), ActTransfer{srv(0), Weight(1, 20)}},  // 0.8 > 0.75: effective
      {50, cli(0), ActWrite{"vc-value"}},
      {250, cli(1), ActRead{}},
      {400, cli(0), ActReadChanges{srv(0)}},
  };
  return s;
}

ScenarioScript bad_config() {
  ScenarioScript s;
  s.name = "bad-config";
  s.mode = Mode::protocol;
  s.n = 4;
  s.f = 1;
  // The single heaviest server owns half of the total weight.
  s.initial_weights = {Weight(3), Weight(1), Weight(1), Weight(1)};
  s.steps = {{0, cli(0), ActReadChanges{srv(0)}}};
  return s;
}

ScenarioScript alg_demo(Mode mode, std::uint32_t n, std::uint32_t f,
                        const std::string& name, std::uint64_t seed) {
  Rng rng = rng_for(name, seed);
  ScenarioScript s;
  s.name = name;
  s.mode = mode;
  s.n = n;
  s.f = f;
  s.initial_weights = SystemConfig::reduction_header(n, f).initial_weights();
  s.fairness = fairness_for(rng);

  const bool unanimous = rng.chance(1, 4);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string v = unanimous ? "v" : "v" + std::to_string(i + 1);
    s.steps.push_back(
        {static_cast<std::uint64_t>(rng.below(60)), srv(i), ActPropose{v}});
  }
  if (rng.chance(1, 3)) {
    // The pairwise construction needs every member of S \ F to stay alive
    // long enough for one 0.4 transfer to land, so demos crash only inside F.
    const std::uint32_t pool = mode == Mode::demo_pwr ? f : n;
    const auto k = 1 + static_cast<std::uint32_t>(rng.below(f));
    for (const auto idx : pick_distinct(rng, pool, k)) {
      s.crashes.push_back(
          {srv(idx), rng.chance(1, 2)
                         ? 0
                         : static_cast<std::uint64_t>(rng.below(200))});
    }
  }
  return s;
}

ScenarioScript battery_rpwr(std::uint32_t n, std::uint32_t f,
                            const std::string& name, std::uint64_t seed) {
  Rng rng = rng_for(name, seed);
  ScenarioScript s;
  s.name = name;
  s.mode = Mode::protocol;
  s.n = n;
  s.f = f;
  s.fairness = fairness_for(rng);

  const auto transfers = 5 + rng.below(16);  // 5..20
  for (std::uint64_t i = 0; i < transfers; ++i) {
    const auto src = static_cast<std::uint32_t>(rng.below(n));
    auto dst = static_cast<std::uint32_t>(rng.below(n - 1));
    if (dst >= src) {
      ++dst;
    }
    s.steps.push_back({rng.below(800), srv(src),
                       ActTransfer{srv(dst), kDeltas[rng.below(5)]}});
  }
  const auto reads = 2 + rng.below(4);  // 2..5 read_changes
  for (std::uint64_t i = 0; i < reads; ++i) {
    s.steps.push_back(
        {rng.below(900), cli(static_cast<std::uint32_t>(rng.below(3))),
         ActReadChanges{srv(static_cast<std::uint32_t>(rng.below(n)))}});
  }
  if (f > 0 && rng.chance(1, 2)) {
    const auto k = 1 + static_cast<std::uint32_t>(rng.below(f));
    for (const auto idx : pick_distinct(rng, n, k)) {
      s.crashes.push_back({srv(idx), rng.below(400)});
    }
  }
  return s;
}

ScenarioScript battery_dwas(std::uint32_t n, std::uint32_t f,
                            const std::string& name, std::uint64_t seed) {
  Rng rng = rng_for(name, seed);
  ScenarioScript s;
  s.name = name;
  s.mode = Mode::protocol;
  s.n = n;
  s.f = f;
  s.fairness = fairness_for(rng);

  const auto clients = 2 + rng.below(3);  // 2..4
  for (std::uint64_t c = 0; c < clients; ++c) {
    const auto ops = 1 + rng.below(3);  // 1..3 ops per client
    for (std::uint64_t k = 0; k < ops; ++k) {
      const auto at = rng.below(600);
      if (rng.chance(1, 2)) {
        s.steps.push_back({at, cli(static_cast<std::uint32_t>(c)), ActRead{}});
      } else {
        s.steps.push_back({at, cli(static_cast<std::uint32_t>(c)),
                           ActWrite{"v" + std::to_string(c + 1) + "-" +
                                    std::to_string(k + 1)}});
      }
    }
  }
  const auto transfers = 1 + rng.below(5);  // 1..5
  for (std::uint64_t i = 0; i < transfers; ++i) {
    const auto src = static_cast<std::uint32_t>(rng.below(n));
    auto dst = static_cast<std::uint32_t>(rng.below(n - 1));
    if (dst >= src) {
      ++dst;
    }
    s.steps.push_back({rng.below(600), srv(src),
                       ActTransfer{srv(dst), kDeltas[rng.below(5)]}});
  }
  if (f > 0 && rng.chance(1, 2)) {
    const auto k = 1 + static_cast<std::uint32_t>(rng.below(f));
    for (const auto idx : pick_distinct(rng, n, k)) {
      s.crashes.push_back({srv(idx), rng.below(400)});
    }
  }
  return s;
}

ScenarioScript battery_mini(std::uint64_t seed) {
  Rng rng = rng_for("battery-mini", seed);
  ScenarioScript s;
  s.name = "battery-mini";
  s.mode = Mode::protocol;
  s.n = 4;
  s.f = 1;
  s.fairness = fairness_for(rng);

  // Small, heavily overlapping histories for the brute-force cross-check.
  const auto clients = 2 + rng.below(2);  // 2..3
  std::uint64_t total = 0;
  for (std::uint64_t c = 0; c < clients; ++c) {
    const auto ops = 2 + rng.below(2);  // 2..3
    for (std::uint64_t k = 0; k < ops && total < 9; ++k, ++total) {
      const auto at = rng.below(60);
      if (rng.chance(1, 2)) {
        s.steps.push_back({at, cli(static_cast<std::uint32_t>(c)), ActRead{}});
      } else {
        s.steps.push_back({at, cli(static_cast<std::uint32_t>(c)),
                           ActWrite{"m" + std::to_string(c + 1) + "-" +
                                    std::to_string(k + 1)}});
      }
    }
  }
  const auto transfers = 1 + rng.below(2);
  for (std::uint64_t i = 0; i < transfers; ++i) {
    const auto src = static_cast<std::uint32_t>(rng.below(4u));
    auto dst = static_cast<std::uint32_t>(rng.below(3u));
    if (dst >= src) {
      ++dst;
    }
    s.steps.push_back(
        {rng.below(80), srv(src), ActTransfer{srv(dst), kDeltas[rng.below(5)]}});
  }
  if (rng.chance(1, 3)) {
    s.crashes.push_back(
        {srv(static_cast<std::uint32_t>(rng.below(4u))), rng.below(100)});
  }
  return s;
}

ScenarioScript rc_interleave(std::uint64_t seed) {
  Rng rng = rng_for("rc-interleave", seed);
  ScenarioScript s;
  s.name = "rc-interleave";
  s.mode = Mode::protocol;
  s.n = 5;
  s.f = 1;
  s.fairness = fairness_for(rng);
  // read_changes racing the transfer that feeds its target.
  s.steps = {
      {50, srv(1), ActTransfer{srv(2), Weight(1, 10)}},
      {52 + rng.below(30), cli(0), ActReadChanges{srv(2)}},
      {60, srv(3), ActTransfer{srv(2), Weight(1, 20)}},
      {70 + rng.below(60), cli(1), ActReadChanges{srv(2)}},
      {600, cli(0), ActReadChanges{srv(2)}},
  };
  return s;
}

}  // namespace

std::vector<std::string> names() {
  return {"example1",          "example2",         "vc-example",
          "bad-config",        "alg1-demo",        "alg1-n3",
          "alg1-n5",           "alg1-n7",          "alg2-demo",
          "battery-rpwr-n4f1", "battery-rpwr-n5f2", "battery-rpwr-n7f2",
          "battery-dwas-n4f1", "battery-dwas-n7f2", "battery-mini",
          "rc-interleave"};
}

bool exists(const std::string& name) {
  const auto all = names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

ScenarioScript make(const std::string& name, std::uint64_t seed) {
  ScenarioScript s;
  if (name == "example1") {
    s = example1();
  } else if (name == "example2") {
    s = example2(seed);
  } else if (name == "vc-example") {
    s = vc_example(seed);
  } else if (name == "bad-config") {
    s = bad_config();
  } else if (name == "alg1-n3") {
    s = alg_demo(Mode::demo_wr, 3, 1, name, seed);
  } else if (name == "alg1-n5" || name == "alg1-demo") {
    s = alg_demo(Mode::demo_wr, 5, 2, name, seed);
  } else if (name == "alg1-n7") {
    s = alg_demo(Mode::demo_wr, 7, 3, name, seed);
  } else if (name == "alg2-demo") {
    s = alg_demo(Mode::demo_pwr, 7, 2, name, seed);
  } else if (name == "battery-rpwr-n4f1") {
    s = battery_rpwr(4, 1, name, seed);
  } else if (name == "battery-rpwr-n5f2") {
    s = battery_rpwr(5, 2, name, seed);
  } else if (name == "battery-rpwr-n7f2") {
    s = battery_rpwr(7, 2, name, seed);
  } else if (name == "battery-dwas-n4f1") {
    s = battery_dwas(4, 1, name, seed);
  } else if (name == "battery-dwas-n7f2") {
    s = battery_dwas(7, 2, name, seed);
  } else if (name == "battery-mini") {
    s = battery_mini(seed);
  } else if (name == "rc-interleave") {
    s = rc_interleave(seed);
  } else {
    throw ScenarioError("unknown bundled scenario: " + name);
  }
  s.seed = seed;
  return s;
}

}  // namespace wqs::bundled
