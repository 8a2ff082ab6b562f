#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace holodyn::report {

using Json = nlohmann::ordered_json;

// Machine-readable analysis record.  Field order is fixed so identical
// (config, seed) runs produce byte-identical files; wall time is therefore
// reported on stderr, never inside the document.
class Report {
public:
  Report(const std::string& system, const std::string& operation);

  Json& parameters() { return doc_["parameters"]; }
  Json& result() { return doc_["result"]; }
  Json& residuals() { return doc_["residuals"]; }

  void set_seed(std::uint64_t seed) { doc_["seed"] = seed; }
  void set_iterations(long n) { doc_["iterations"] = n; }

  // Reference value the result is compared against, with the tag describing
  // how it was obtained (e.g. "closed_form", "exact_eigenvalue").
  void add_reference(const std::string& name, double value, const std::string& tag);
  void add_reference(const std::string& name, const std::string& value, const std::string& tag);

  std::string dump() const { return doc_.dump(2) + "\n"; }
  void write(const std::string& path) const;
  const Json& json() const { return doc_; }

private:
  Json doc_;
};

}  // namespace holodyn::report
