#include "parahoric/report.hpp"

#include <algorithm>

namespace parahoric {

ReportEntry& VerificationReport::add(std::string id, std::string ref) {
  entries.push_back(ReportEntry{std::move(id), std::move(ref), true, 0, ""});
  return entries.back();
}

ReportEntry* VerificationReport::find(const std::string& id) {
  for (auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

const ReportEntry* VerificationReport::find(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

bool VerificationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
  for (auto e : other.entries) {
    e.id = prefix + e.id;
    entries.push_back(std::move(e));
  }
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["ref"] = e.ref;
    j["status"] = e.pass ? "pass" : "fail";
    j["checked"] = e.checked;
    j["witness"] = e.witness;
    arr.push_back(std::move(j));
  }
  return arr;
}

void record(ReportEntry& e, bool ok, const std::string& witness) {
  ++e.checked;
  if (!ok && e.pass) {
    e.pass = false;
    e.witness = witness;
  }
}

}  // namespace parahoric
