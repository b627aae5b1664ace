#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "wqs/change.hpp"
#include "wqs/process.hpp"

namespace wqs::sim {

// Wire payloads.  One struct per message kind; the shape of each kind is
// fixed and enforced by the type system rather than by runtime checks.

// Client asks every server for the changes it stores for `target`.
struct RcRequest {
  ProcessId target;
  std::uint64_t session = 0;
  bool operator==(const RcRequest&) const = default;
};

struct RcAck {
  std::uint64_t session = 0;
  ChangeSet changes;
  bool operator==(const RcAck&) const = default;
};

// Write-back of the collected change set.
struct WcRequest {
  std::uint64_t session = 0;
  ChangeSet changes;
  bool operator==(const WcRequest&) const = default;
};

struct WcAck {
  std::uint64_t session = 0;
  bool operator==(const WcAck&) const = default;
};

// Reliably broadcast announcement of one transfer: the issuer's debit and
// the destination's credit, sharing (issuer, counter).
struct TransferMsg {
  Change debit;
  Change credit;
  bool operator==(const TransferMsg&) const = default;
};

struct TransferAck {
  std::uint64_t counter = 0;
  bool operator==(const TransferAck&) const = default;
};

// Relay wrapper carrying a TransferMsg through the eager-relay reliable
// broadcast.  (origin, bcast) identifies the broadcast instance.
struct RbRelay {
  ProcessId origin;
  std::uint64_t bcast = 0;
  TransferMsg inner;
  bool operator==(const RbRelay&) const = default;
};

// Storage phase 1: request (tag, value) plus the server's change set.
struct ReadRequest {
  std::uint64_t op_cnt = 0;
  bool operator==(const ReadRequest&) const = default;
};

struct ReadAck {
  std::uint64_t op_cnt = 0;
  RegisterCell cell;
  ChangeSet changes;
  bool operator==(const ReadAck&) const = default;
};

// Storage phase 2: install (tag, value) if newer.
struct WriteRequest {
  std::uint64_t op_cnt = 0;
  Tag tag;
  std::optional<std::string> val;
  bool operator==(const WriteRequest&) const = default;
};

struct WriteAck {
  std::uint64_t op_cnt = 0;
  ChangeSet changes;
  bool operator==(const WriteAck&) const = default;
};

// Self-addressed wakeup used by the reduction demos' polling loops.
struct DemoPoll {
  bool operator==(const DemoPoll&) const = default;
};

using Payload = std::variant<RcRequest, RcAck, WcRequest, WcAck, RbRelay,
                             TransferAck, ReadRequest, ReadAck, WriteRequest,
                             WriteAck, DemoPoll>;

struct Envelope {
  std::uint64_t seq = 0;  // global send order, unique per message
  ProcessId from;
  ProcessId to;
  Payload payload;

  bool operator==(const Envelope&) const = default;
};

const char* payload_kind(const Payload& p);

}  // namespace wqs::sim
