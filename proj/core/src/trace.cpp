#include "wqs/trace.hpp"

namespace wqs::sim {

const char* payload_kind(const Payload& p) {
  struct Visitor {
    const char* operator()(const RcRequest&) const { return "RC"; }
    const char* operator()(const RcAck&) const { return "RC_Ack"; }
    const char* operator()(const WcRequest&) const { return "WC"; }
    const char* operator()(const WcAck&) const { return "WC_Ack"; }
    const char* operator()(const RbRelay&) const { return "RB"; }
    const char* operator()(const TransferAck&) const { return "T_Ack"; }
    const char* operator()(const ReadRequest&) const { return "R"; }
    const char* operator()(const ReadAck&) const { return "R_A"; }
    const char* operator()(const WriteRequest&) const { return "W"; }
    const char* operator()(const WriteAck&) const { return "W_A"; }
    const char* operator()(const DemoPoll&) const { return "POLL"; }
  };
  return std::visit(Visitor{}, p);
}

const char* result_kind(const OpResult& r) {
  struct Visitor {
    const char* operator()(const ResComplete&) const { return "complete"; }
    const char* operator()(const ResChanges&) const { return "changes"; }
    const char* operator()(const ResReadValue&) const { return "value"; }
    const char* operator()(const ResWritten&) const { return "written"; }
    const char* operator()(const ResDecided&) const { return "decided"; }
  };
  return std::visit(Visitor{}, r);
}

const char* event_kind(const EventDetail& d) {
  struct Visitor {
    const char* operator()(const EvSend&) const { return "send"; }
    const char* operator()(const EvDeliver&) const { return "deliver"; }
    const char* operator()(const EvCrash&) const { return "crash"; }
    const char* operator()(const EvInvoke&) const { return "invoke"; }
    const char* operator()(const EvRespond&) const { return "respond"; }
    const char* operator()(const EvRbDeliver&) const { return "rbdeliver"; }
  };
  return std::visit(Visitor{}, d);
}

}  // namespace wqs::sim
