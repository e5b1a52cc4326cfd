#pragma once

// Machine-readable pass/fail ledger shared by every verification suite.

#include <cstdint>
#include <deque>
#include <string>

#include "json.hpp"

namespace parahoric {

struct ReportEntry {
  std::string id;
  std::string ref;  // the statement being checked, as a formula
  bool pass = true;
  std::int64_t checked = 0;  // number of instances evaluated
  std::string witness;       // first counterexample, or a summary value
};

struct VerificationReport {
  std::string subject;
  std::deque<ReportEntry> entries;  // stable references across add()

  ReportEntry& add(std::string id, std::string ref);
  ReportEntry* find(const std::string& id);
  const ReportEntry* find(const std::string& id) const;
  bool all_pass() const;
  // Appends every entry of `other`, prefixing ids.
  void merge(const VerificationReport& other, const std::string& prefix);
  nlohmann::ordered_json to_json() const;
};

// Records one instance: marks failure and keeps the first witness.
void record(ReportEntry& e, bool ok, const std::string& witness);

}  // namespace parahoric
