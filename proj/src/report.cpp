#include "todsim/report.hpp"

#include <cstdio>

#include "todsim/errors.hpp"

namespace todsim {
namespace {

std::string rate(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string pct(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0f%%", value);
  return buf;
}

std::string render_markdown(const RunReport& report) {
  std::string out = "# Campaign report\n\n";
  out += "Provenance: " + (report.provenance.empty() ? std::string("n/a") : report.provenance) +
         "\n";
  out += "Dialogues: " + std::to_string(report.campaign.dialogue_count) + "\n\n";

  out += "| Compl Rate | Succ Rate | Book Rate | P | R | F1 | UttLen | Unig | MTLD |\n";
  out += "|---|---|---|---|---|---|---|---|---|\n";
  out += "| " + rate(report.campaign.completion_rate);
  out += " | " + rate(report.campaign.success_rate);
  out += " | " + (report.campaign.book_rate ? rate(*report.campaign.book_rate)
                                            : std::string("-"));
  out += " | " + rate(report.campaign.precision);
  out += " | " + rate(report.campaign.recall);
  out += " | " + rate(report.campaign.f1);
  out += " | " + rate(report.diversity.avg_utt_len);
  out += " | " + std::to_string(report.diversity.unigram_count);
  out += " | " + (report.diversity.mtld_score ? rate(*report.diversity.mtld_score)
                                              : std::string("-"));
  out += " |\n";

  if (!report.campaign.group_accuracy_pct.empty()) {
    out += "\n## Group accuracy\n\n| Group | Accuracy |\n|---|---|\n";
    for (const auto& [group, value] : report.campaign.group_accuracy_pct) {
      out += "| " + group + " | " + pct(value) + " |\n";
    }
  }

  if (report.taxonomy.has_value()) {
    out += "\n## Error taxonomy\n\n| Label | Prevalence |\n|---|---|\n";
    for (ErrorCategory category : kAllErrorCategories) {
      auto it = report.taxonomy->find(category);
      if (it == report.taxonomy->end()) continue;
      out += "| " + display_label(category) + " | " + std::to_string(it->second) + "% |\n";
    }
  }
  return out;
}

}  // namespace

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json out;
  out["schema_version"] = 1;
  out["provenance"] = report.provenance;
  nlohmann::json campaign;
  campaign["dialogue_count"] = report.campaign.dialogue_count;
  campaign["completion_rate"] = report.campaign.completion_rate;
  campaign["success_rate"] = report.campaign.success_rate;
  if (report.campaign.book_rate) campaign["book_rate"] = *report.campaign.book_rate;
  campaign["precision"] = report.campaign.precision;
  campaign["recall"] = report.campaign.recall;
  campaign["f1"] = report.campaign.f1;
  campaign["group_accuracy_pct"] = report.campaign.group_accuracy_pct;
  out["campaign"] = std::move(campaign);
  nlohmann::json diversity;
  if (report.diversity.mtld_score) diversity["mtld"] = *report.diversity.mtld_score;
  diversity["unigram_count"] = report.diversity.unigram_count;
  diversity["avg_utt_len"] = report.diversity.avg_utt_len;
  out["diversity"] = std::move(diversity);
  if (report.taxonomy.has_value()) {
    nlohmann::json taxonomy;
    for (const auto& [category, value] : *report.taxonomy) {
      taxonomy[to_string(category)] = value;
    }
    out["taxonomy"] = std::move(taxonomy);
  }
  return out;
}

RunReport report_from_json(const nlohmann::json& value) {
  if (value.value("schema_version", 0) != 1) {
    throw Error("ParseError", "unsupported report schema version");
  }
  RunReport report;
  report.provenance = value.value("provenance", "");
  const auto& campaign = value.at("campaign");
  report.campaign.dialogue_count = campaign.at("dialogue_count").get<int>();
  report.campaign.completion_rate = campaign.at("completion_rate").get<double>();
  report.campaign.success_rate = campaign.at("success_rate").get<double>();
  if (campaign.contains("book_rate")) {
    report.campaign.book_rate = campaign.at("book_rate").get<double>();
  }
  report.campaign.precision = campaign.at("precision").get<double>();
  report.campaign.recall = campaign.at("recall").get<double>();
  report.campaign.f1 = campaign.at("f1").get<double>();
  if (campaign.contains("group_accuracy_pct")) {
    report.campaign.group_accuracy_pct =
        campaign.at("group_accuracy_pct").get<std::map<std::string, double>>();
  }
  const auto& diversity = value.at("diversity");
  report.diversity.mtld_score = diversity.at("mtld").get<double>();
  report.diversity.unigram_count = diversity.at("unigram_count").get<int>();
  report.diversity.avg_utt_len = diversity.at("avg_utt_len").get<double>();
  if (value.contains("taxonomy")) {
    std::map<ErrorCategory, int> taxonomy;
    for (const auto& [key, entry] : value.at("taxonomy").items()) {
      taxonomy[error_category_from_string(key)] = entry.get<int>();
    }
    report.taxonomy = std::move(taxonomy);
  }
  return report;
}

std::string render_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::markdown) return render_markdown(report);
  return report_to_json(report).dump(2) + "\n";
}

}  // namespace todsim
