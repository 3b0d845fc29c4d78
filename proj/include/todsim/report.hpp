#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "todsim/annotation.hpp"
#include "todsim/metrics.hpp"

namespace todsim {

enum class ReportFormat { json, markdown };

struct RunReport {
  CampaignTable campaign;
  DiversityReport diversity;
  std::string provenance;  // manifest reference / config echo
  std::optional<std::map<ErrorCategory, int>> taxonomy;  // prevalence percentages
};

// Deterministic rendering. Markdown columns, in order: Compl Rate, Succ Rate,
// Book Rate, P, R, F1, UttLen, Unig, MTLD. Rates use 2 decimals, percentages
// are integers. The taxonomy block is omitted when no annotations were given.
std::string render_report(const RunReport& report, ReportFormat format);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& value);

}  // namespace todsim
