#include "wqs/process.hpp"

#include <ostream>
#include <stdexcept>

namespace wqs {

std::string ProcessId::name() const {
  switch (kind) {
    case ProcKind::bottom:
      return "bot";
    case ProcKind::server:
      return "s" + std::to_string(index + 1);
    case ProcKind::client:
      return "c" + std::to_string(index + 1);
  }
  return "?";
}

ProcessId ProcessId::parse(const std::string& name) {
  if (name == "bot") {
    return bottom();
  }
  if (name.size() >= 2 && (name[0] == 's' || name[0] == 'c')) {
    std::uint64_t v = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') {
        throw std::invalid_argument("bad process name: " + name);
      }
      v = v * 10 + (name[i] - '0');
    }
    if (v == 0) {
      throw std::invalid_argument("process names are 1-based: " + name);
    }
    return name[0] == 's' ? server(static_cast<std::uint32_t>(v - 1))
                          : client(static_cast<std::uint32_t>(v - 1));
  }
  throw std::invalid_argument("bad process name: " + name);
}

std::ostream& operator<<(std::ostream& os, const ProcessId& pid) {
  return os << pid.name();
}

}  // namespace wqs
