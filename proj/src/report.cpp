#include "holodyn/report.hpp"

#include <fstream>

#include "holodyn/types.hpp"

namespace holodyn::report {

Report::Report(const std::string& system, const std::string& operation) {
  doc_["schema"] = 1;
  doc_["system"] = system;
  doc_["operation"] = operation;
  doc_["parameters"] = Json::object();
  doc_["result"] = Json::object();
  doc_["residuals"] = Json::object();
  doc_["references"] = Json::array();
  doc_["iterations"] = 0;
  doc_["seed"] = 0;
}

void Report::add_reference(const std::string& name, double value, const std::string& tag) {
  doc_["references"].push_back({{"name", name}, {"value", value}, {"tag", tag}});
}

void Report::add_reference(const std::string& name, const std::string& value,
                           const std::string& tag) {
  doc_["references"].push_back({{"name", name}, {"value", value}, {"tag", tag}});
}

void Report::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ContractViolation("Report: cannot open output path " + path);
  out << dump();
}

}  // namespace holodyn::report
