#include "wqs/quorum.hpp"

#include <algorithm>

namespace wqs {

Weight weight_of(const ChangeSet& cs, const ProcessId& s) {
  Weight sum;
  for (const auto& c : cs) {
    if (c.target == s) {
      sum += c.delta;
    }
  }
  return sum;
}

Weight total_weight(const ChangeSet& cs,
                    const std::vector<ProcessId>& servers) {
  Weight sum;
  for (const auto& s : servers) {
    sum += weight_of(cs, s);
  }
  return sum;
}

Weight total_weight(const ChangeSet& cs, const SystemConfig& cfg) {
  return total_weight(cs, cfg.servers());
}

bool check_availability(const ChangeSet& cs,
                        const std::vector<ProcessId>& servers,
                        std::uint32_t f) {
  if (f == 0) {
    return true;
  }
  std::vector<Weight> weights;
  weights.reserve(servers.size());
  Weight total;
  for (const auto& s : servers) {
    weights.push_back(weight_of(cs, s));
    total += weights.back();
  }
  std::sort(weights.begin(), weights.end(),
            [](const Weight& a, const Weight& b) { return b < a; });
  Weight heaviest;
  for (std::uint32_t i = 0; i < f && i < weights.size(); ++i) {
    heaviest += weights[i];
  }
  return heaviest * Weight(2) < total;
}

bool check_availability(const ChangeSet& cs, const SystemConfig& cfg) {
  return check_availability(cs, cfg.servers(), cfg.f());
}

Weight min_weight_threshold(const SystemConfig& cfg) {
  if (cfg.n() <= cfg.f()) {
    throw ConfigError("min_weight_threshold requires n > f");
  }
  return cfg.initial_total() /
         Weight(2 * static_cast<std::int64_t>(cfg.n() - cfg.f()));
}

bool is_quorum(const ChangeSet& cs, const std::set<ProcessId>& q,
               const SystemConfig& cfg) {
  Weight sum;
  for (const auto& s : q) {
    sum += weight_of(cs, s);
  }
  return cfg.initial_total() < sum * Weight(2);
}

}  // namespace wqs
