#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace wqs {

// Identity of a simulated process.  Servers are indexed 0..n-1; client
// indices are unbounded.  The bottom sentinel exists only for the initial
// register tag and compares below every real process.
enum class ProcKind : std::uint8_t { bottom = 0, server = 1, client = 2 };

struct ProcessId {
  ProcKind kind = ProcKind::bottom;
  std::uint32_t index = 0;

  static ProcessId server(std::uint32_t i) { return {ProcKind::server, i}; }
  static ProcessId client(std::uint32_t i) { return {ProcKind::client, i}; }
  static ProcessId bottom() { return {ProcKind::bottom, 0}; }

  bool is_server() const { return kind == ProcKind::server; }
  bool is_client() const { return kind == ProcKind::client; }
  bool is_bottom() const { return kind == ProcKind::bottom; }

  auto operator<=>(const ProcessId&) const = default;

  // "s1", "c2", "bot"; server/client names are 1-based like the usual
  // s_1..s_n convention, indices are 0-based internally.
  std::string name() const;
  static ProcessId parse(const std::string& name);
};

std::ostream& operator<<(std::ostream& os, const ProcessId& pid);

// Orders register writes: by timestamp, writer id breaking ties.
struct Tag {
  std::uint64_t ts = 0;
  ProcessId pid = ProcessId::bottom();

  auto operator<=>(const Tag&) const = default;
};

inline bool tag_less(const Tag& a, const Tag& b) { return a < b; }

// One server's copy of the replicated register.  A disengaged value is the
// initial, never-written state.
struct RegisterCell {
  Tag tag;
  std::optional<std::string> val;

  bool operator==(const RegisterCell&) const = default;
};

}  // namespace wqs

template <>
struct std::hash<wqs::ProcessId> {
  std::size_t operator()(const wqs::ProcessId& p) const noexcept {
    return (std::size_t(p.kind) << 32) ^ p.index;
  }
};
