#include "wqs/config.hpp"

#include "wqs/quorum.hpp"

namespace wqs {

SystemConfig::SystemConfig(std::uint32_t n, std::uint32_t f,
                           std::vector<Weight> initial_weights)
    : n_(n), f_(f), initial_weights_(std::move(initial_weights)) {
  if (n_ == 0) {
    throw ConfigError("need at least one server");
  }
  if (f_ >= n_) {
    throw ConfigError("fault threshold f must be less than n");
  }
  if (initial_weights_.size() != n_) {
    throw ConfigError("expected one initial weight per server");
  }
  for (const auto& w : initial_weights_) {
    if (!w.is_positive()) {
      throw ConfigError("initial weights must be positive");
    }
  }
  if (!check_availability(initial_changes(), *this)) {
    throw ConfigError(
        "initial weights violate availability: the f greatest weights reach "
        "half of the total");
  }
}

SystemConfig SystemConfig::uniform(std::uint32_t n, std::uint32_t f,
                                   Weight w) {
  return SystemConfig(n, f, std::vector<Weight>(n, w));
}

SystemConfig SystemConfig::reduction_header(std::uint32_t n, std::uint32_t f) {
  if (f < 1) {
    throw ConfigError("reduction header weights need f >= 1");
  }
  if (n <= f) {
    throw ConfigError("reduction header weights need n > f");
  }
  const Weight in_f(static_cast<std::int64_t>(n) - 1,
                    2 * static_cast<std::int64_t>(f));
  const Weight outside(static_cast<std::int64_t>(n) + 1,
                       2 * static_cast<std::int64_t>(n - f));
  std::vector<Weight> weights;
  weights.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    weights.push_back(i < f ? in_f : outside);
  }
  return SystemConfig(n, f, std::move(weights));
}

Weight SystemConfig::initial_total() const {
  Weight sum;
  for (const auto& w : initial_weights_) {
    sum += w;
  }
  return sum;
}

std::vector<ProcessId> SystemConfig::servers() const {
  std::vector<ProcessId> out;
  out.reserve(n_);
  for (std::uint32_t i = 0; i < n_; ++i) {
    out.push_back(ProcessId::server(i));
  }
  return out;
}

ChangeSet SystemConfig::initial_changes() const {
  ChangeSet cs;
  for (std::uint32_t i = 0; i < n_; ++i) {
    const auto s = ProcessId::server(i);
    cs.insert(Change{s, 1, s, initial_weights_[i]});
  }
  return cs;
}

}  // namespace wqs
