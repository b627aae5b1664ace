#pragma once

#include <stdexcept>
#include <vector>

#include "wqs/change.hpp"

namespace wqs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Static system parameters: n servers, at most f of which may crash, and the
// per-server initial weights.  Construction rejects any assignment whose f
// heaviest servers already hold at least half of the total weight, since no
// quorum system over such weights can stay available.
class SystemConfig {
 public:
  SystemConfig(std::uint32_t n, std::uint32_t f,
               std::vector<Weight> initial_weights);

  static SystemConfig uniform(std::uint32_t n, std::uint32_t f,
                              Weight w = Weight(1));
  // Initial weights used by the consensus-reduction constructions:
  // (n-1)/(2f) for the first f servers, (n+1)/(2(n-f)) for the rest.
  static SystemConfig reduction_header(std::uint32_t n, std::uint32_t f);

  std::uint32_t n() const { return n_; }
  std::uint32_t f() const { return f_; }

  const Weight& initial_weight(std::uint32_t server) const {
    return initial_weights_.at(server);
  }
  const std::vector<Weight>& initial_weights() const {
    return initial_weights_;
  }

  Weight initial_total() const;
  std::vector<ProcessId> servers() const;
  bool is_valid_server(const ProcessId& p) const {
    return p.is_server() && p.index < n_;
  }

  // {<s,1,s,w_s> : s in S} -- the initial weights materialized as completed
  // changes with counter 1.
  ChangeSet initial_changes() const;

  bool operator==(const SystemConfig&) const = default;

 private:
  std::uint32_t n_;
  std::uint32_t f_;
  std::vector<Weight> initial_weights_;
};

}  // namespace wqs
