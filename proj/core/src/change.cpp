#include "wqs/change.hpp"

#include <ostream>

namespace wqs {

std::ostream& operator<<(std::ostream& os, const Change& c) {
  return os << "<" << c.issuer << "," << c.counter << "," << c.target << ","
            << c.delta << ">";
}

ChangeSet::ChangeSet(std::vector<Change> changes) {
  for (auto& c : changes) {
    entries_.insert(c);
  }
}

bool ChangeSet::contains_all(const ChangeSet& other) const {
  for (const auto& c : other) {
    if (!contains(c)) {
      return false;
    }
  }
  return true;
}

ChangeSet ChangeSet::for_target(const ProcessId& s) const {
  ChangeSet out;
  for (const auto& c : entries_) {
    if (c.target == s) {
      out.insert(c);
    }
  }
  return out;
}

ChangeSet ChangeSet::without(const Change& c) const {
  ChangeSet out = *this;
  out.entries_.erase(c);
  return out;
}

ChangeSet merge(const ChangeSet& a, const ChangeSet& b) {
  ChangeSet out = a;
  for (const auto& c : b) {
    out.insert(c);
  }
  return out;
}

}  // namespace wqs
