#ifndef ACEFL_REPORT_H_
#define ACEFL_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acefl/scenario.h"

namespace acefl {

struct DetectionRow {
  std::string method;
  std::optional<double> precision, recall, f1;
  bool operator==(const DetectionRow&) const = default;
};

struct ReportData {
  std::string method;
  std::string attack;
  std::vector<ClientId> attackers;
  std::vector<SummaryRow> contribution;
  std::vector<std::pair<std::string, double>> accuracy;
  std::vector<DetectionRow> detection;

  bool operator==(const ReportData&) const = default;
};

ReportData ReportFromResult(const ScenarioResult& result);
// Reads the files written by WriteScenarioOutputs.
ReportData LoadReport(const std::filesystem::path& dir);

// Sectioned CSV: a contribution table (CS, ranks and rank gain per client with
// a totals row), accuracy, and detection. Numbers use %.17g, so ParseReport
// restores the data exactly; the totals row is recomputed, not parsed.
std::string RenderReport(const ReportData& data);
ReportData ParseReport(const std::string& text);

}  // namespace acefl

#endif  // ACEFL_REPORT_H_
