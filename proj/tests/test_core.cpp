#include <doctest.h>

#include <set>

#include "wqs/quorum.hpp"
#include "wqs/rng.hpp"

using namespace wqs;

namespace {

ProcessId s(std::uint32_t i) { return ProcessId::server(i); }

ChangeSet set_of(std::initializer_list<Change> cs) {
  return ChangeSet(std::vector<Change>(cs));
}

std::vector<ProcessId> servers_of(std::uint32_t n) {
  std::vector<ProcessId> out;
  for (std::uint32_t i = 0; i < n; ++i) {
    out.push_back(ProcessId::server(i));
  }
  return out;
}

// Availability recomputed the slow way: enumerate every f-sized subset.
bool availability_bruteforce(const ChangeSet& cs, std::uint32_t n,
                             std::uint32_t f) {
  const auto servers = servers_of(n);
  if (f == 0) {
    return true;
  }
  const Weight total = total_weight(cs, servers);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != f) {
      continue;
    }
    Weight sum;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sum += weight_of(cs, servers[i]);
      }
    }
    if (!(sum * Weight(2) < total)) {
      return false;
    }
  }
  return true;
}

ChangeSet weights_as_changes(const std::vector<Weight>& ws) {
  ChangeSet cs;
  for (std::uint32_t i = 0; i < ws.size(); ++i) {
    cs.insert(Change{s(i), 1, s(i), ws[i]});
  }
  return cs;
}

const std::vector<Weight> kSectionVC{Weight(8, 5), Weight(7, 5), Weight(4, 5),
                                     Weight(4, 5), Weight(4, 5), Weight(4, 5),
                                     Weight(4, 5)};

}  // namespace

TEST_CASE("weight_of sums the deltas created for one server") {
  // the first worked example: initial 1 plus a 1.5 reassignment
  const auto ex1 = set_of({{s(0), 1, s(0), Weight(1)},
                           {s(0), 2, s(0), Weight(3, 2)}});
  CHECK(weight_of(ex1, s(0)) == Weight(5, 2));
  CHECK(weight_of(ChangeSet{}, s(0)) == Weight(0));

  const auto mixed = set_of({{s(3), 1, s(3), Weight(1)},
                             {s(3), 2, s(3), Weight(-1, 4)},
                             {s(3), 2, s(2), Weight(1, 4)}});
  CHECK(weight_of(mixed, s(3)) == Weight(3, 4));
  CHECK(weight_of(mixed, s(2)) == Weight(1, 4));
}

TEST_CASE("total_weight") {
  const auto cfg = SystemConfig::uniform(4, 1);
  CHECK(total_weight(cfg.initial_changes(), cfg) == Weight(4));

  // after the example's effective reassign the total grows by 3/2
  auto cs = cfg.initial_changes();
  cs.insert(Change{s(0), 2, s(0), Weight(3, 2)});
  CHECK(total_weight(cs, cfg) == Weight(9, 2));

  const SystemConfig vc(7, 2, kSectionVC);
  CHECK(total_weight(vc.initial_changes(), vc) == Weight(7));
}

TEST_CASE("check_availability follows the f-greatest-weights rule") {
  const auto cfg = SystemConfig::uniform(4, 1);
  CHECK(check_availability(cfg.initial_changes(), cfg));  // 1 < 2

  auto cs = cfg.initial_changes();
  cs.insert(Change{s(0), 2, s(0), Weight(3, 2)});
  CHECK(check_availability(cs, cfg));  // 2.5 < 2.75

  cs.insert(Change{s(2), 2, s(1), Weight(-1, 2)});
  CHECK_FALSE(check_availability(cs, cfg));  // 2.5 not < 2.5 (strict)

  const auto f0 = SystemConfig::uniform(3, 0);
  CHECK(check_availability(f0.initial_changes(), f0));
}

TEST_CASE("min_weight_threshold") {
  CHECK(min_weight_threshold(SystemConfig::uniform(7, 2)) == Weight(7, 10));
  CHECK(min_weight_threshold(SystemConfig::uniform(4, 1)) == Weight(2, 3));
  CHECK(min_weight_threshold(SystemConfig::uniform(3, 0)) == Weight(1, 2));
}

TEST_CASE("is_quorum under the section-V-C weights") {
  const SystemConfig vc(7, 2, kSectionVC);
  const auto cs = vc.initial_changes();

  CHECK(is_quorum(cs, {s(0), s(1), s(2)}, vc));  // 3.8 > 3.5

  // without s1 and s2, four of the light servers are not enough...
  CHECK_FALSE(is_quorum(cs, {s(2), s(3), s(4), s(5)}, vc));  // 3.2
  CHECK_FALSE(is_quorum(cs, {s(3), s(4), s(5), s(6)}, vc));
  // ...and five are: the smallest quorum avoiding both heavy servers.
  CHECK(is_quorum(cs, {s(2), s(3), s(4), s(5), s(6)}, vc));  // 4 > 3.5

  const auto uni = SystemConfig::uniform(4, 1);
  CHECK_FALSE(is_quorum(uni.initial_changes(), {s(0), s(1)}, uni));  // 2 = 2
  CHECK(is_quorum(uni.initial_changes(), {s(0), s(1), s(2)}, uni));
}

TEST_CASE("smallest quorum excluding the heavy servers has size five") {
  const SystemConfig vc(7, 2, kSectionVC);
  const auto cs = vc.initial_changes();
  std::size_t smallest = 99;
  for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
    if ((mask & 1u) || (mask & 2u)) {
      continue;  // s1 or s2 present
    }
    std::set<ProcessId> q;
    for (std::uint32_t i = 0; i < 7; ++i) {
      if (mask & (1u << i)) {
        q.insert(s(i));
      }
    }
    if (is_quorum(cs, q, vc)) {
      smallest = std::min(smallest, q.size());
    }
  }
  CHECK(smallest == 5);
}

TEST_CASE("merge is a join: identity, idempotent, commutative, associative") {
  const auto a = set_of({{s(0), 1, s(0), Weight(1)}});
  const auto b = set_of({{s(1), 1, s(1), Weight(1)},
                         {s(0), 1, s(0), Weight(1)}});
  CHECK(merge(a, ChangeSet{}) == a);
  CHECK(merge(a, a) == a);
  CHECK(merge(a, b) == merge(b, a));
  CHECK(merge(a, b).size() == 2);

  sim::Rng rng(7);
  for (int iter = 0; iter < 100; ++iter) {
    auto random_set = [&] {
      ChangeSet cs;
      const auto k = rng.below(6);
      for (std::uint64_t i = 0; i < k; ++i) {
        cs.insert(Change{s(rng.below(3)), rng.below(4) + 1, s(rng.below(3)),
                         Weight(static_cast<std::int64_t>(rng.below(5)), 4)});
      }
      return cs;
    };
    const auto x = random_set(), y = random_set(), z = random_set();
    CHECK(merge(merge(x, y), z) == merge(x, merge(y, z)));
    CHECK(merge(x, y) == merge(y, x));
    CHECK(merge(x, x) == x);
    CHECK(merge(x, y).contains_all(x));
    CHECK(merge(x, y).contains_all(y));
  }
}

TEST_CASE("tag order: timestamp first, then writer id") {
  CHECK(tag_less(Tag{1, s(0)}, Tag{2, ProcessId::server(0)}));
  CHECK(tag_less(Tag{2, s(0)}, Tag{2, s(2)}));
  CHECK_FALSE(tag_less(Tag{2, s(0)}, Tag{2, s(0)}));
  // the bottom sentinel is below every real process
  CHECK(tag_less(Tag{}, Tag{0, s(0)}));
  CHECK(tag_less(Tag{0, s(0)}, Tag{0, ProcessId::client(0)}));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(SystemConfig(0, 0, {}), ConfigError);
  CHECK_THROWS_AS(SystemConfig::uniform(2, 1), ConfigError);  // 1 not < 1
  CHECK_THROWS_AS(SystemConfig(4, 1, {Weight(3), Weight(1), Weight(1),
                                      Weight(1)}),
                  ConfigError);
  CHECK_THROWS_AS(SystemConfig(2, 0, {Weight(1), Weight(0)}), ConfigError);
  CHECK_NOTHROW(SystemConfig(7, 2, kSectionVC));

  const auto red = SystemConfig::reduction_header(4, 1);
  CHECK(red.initial_weight(0) == Weight(3, 2));
  CHECK(red.initial_weight(1) == Weight(5, 6));
  CHECK(red.initial_total() == Weight(4));
}

TEST_CASE("availability failures are monotone in f") {
  sim::Rng rng(21);
  for (int iter = 0; iter < 200; ++iter) {
    const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng.below(5));
    std::vector<Weight> ws;
    for (std::uint32_t i = 0; i < n; ++i) {
      ws.push_back(Weight(1 + static_cast<std::int64_t>(rng.below(8)), 4));
    }
    const auto cs = weights_as_changes(ws);
    const auto servers = servers_of(n);
    bool failed = false;
    for (std::uint32_t f = 0; f < n; ++f) {
      const bool ok = check_availability(cs, servers, f);
      if (failed) {
        CHECK_FALSE(ok);
      }
      failed = failed || !ok;
    }
  }
}

TEST_CASE("the whole server set is a quorum whenever availability holds") {
  sim::Rng rng(22);
  for (int iter = 0; iter < 100; ++iter) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.below(6));
    std::vector<Weight> ws;
    for (std::uint32_t i = 0; i < n; ++i) {
      ws.push_back(Weight(1 + static_cast<std::int64_t>(rng.below(8)), 4));
    }
    SystemConfig cfg(n, 0, ws);
    std::set<ProcessId> all;
    for (const auto& p : cfg.servers()) {
      all.insert(p);
    }
    CHECK(is_quorum(cfg.initial_changes(), all, cfg));
  }
}

TEST_CASE("quorum intersection, exhaustively for n <= 7") {
  sim::Rng rng(23);
  std::vector<std::vector<Weight>> vectors = {kSectionVC};
  for (int iter = 0; iter < 30; ++iter) {
    const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng.below(5));
    std::vector<Weight> ws;
    for (std::uint32_t i = 0; i < n; ++i) {
      ws.push_back(Weight(1 + static_cast<std::int64_t>(rng.below(8)), 5));
    }
    vectors.push_back(ws);
  }
  for (const auto& ws : vectors) {
    const auto n = static_cast<std::uint32_t>(ws.size());
    SystemConfig cfg(n, 0, ws);
    const auto cs = cfg.initial_changes();
    std::vector<std::uint32_t> quorums;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::set<ProcessId> q;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          q.insert(ProcessId::server(i));
        }
      }
      if (is_quorum(cs, q, cfg)) {
        quorums.push_back(mask);
      }
    }
    for (const auto a : quorums) {
      for (const auto b : quorums) {
        CHECK((a & b) != 0u);
      }
    }
  }
}

TEST_CASE("weights above the floor imply availability") {
  // randomized version of the all-above-threshold lemma
  sim::Rng rng(24);
  for (int iter = 0; iter < 200; ++iter) {
    const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng.below(5));
    const std::uint32_t f = static_cast<std::uint32_t>(rng.below((n - 1) / 2 + 1));
    if (n <= f) {
      continue;
    }
    const auto cfg = SystemConfig::uniform(n, f);
    const Weight floor = min_weight_threshold(cfg);
    // redistribute while keeping every server strictly above the floor
    std::vector<Weight> ws(n, Weight(1));
    for (int moves = 0; moves < 6; ++moves) {
      const auto a = rng.below(n), b = rng.below(n);
      if (a == b) {
        continue;
      }
      const Weight room = ws[a] - floor;
      if (!room.is_positive()) {
        continue;
      }
      const Weight delta = room * Weight(1, 2 + static_cast<std::int64_t>(
                                                    rng.below(3)));
      ws[a] -= delta;
      ws[b] += delta;
    }
    bool all_above = true;
    for (const auto& w : ws) {
      all_above = all_above && floor < w;
    }
    REQUIRE(all_above);
    const auto cs = weights_as_changes(ws);
    CHECK(availability_bruteforce(cs, n, f));
    CHECK(check_availability(cs, cfg));
  }
}

TEST_CASE("fast availability matches the brute-force subset enumeration") {
  sim::Rng rng(25);
  for (int iter = 0; iter < 500; ++iter) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.below(6));
    const std::uint32_t f = static_cast<std::uint32_t>(rng.below(n));
    std::vector<Weight> ws;
    for (std::uint32_t i = 0; i < n; ++i) {
      ws.push_back(Weight(1 + static_cast<std::int64_t>(rng.below(10)), 4));
    }
    const auto cs = weights_as_changes(ws);
    CHECK(check_availability(cs, servers_of(n), f) ==
          availability_bruteforce(cs, n, f));
  }
}
