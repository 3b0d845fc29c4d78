#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "todsim/agents.hpp"
#include "todsim/annotation.hpp"
#include "todsim/data_pipeline.hpp"
#include "todsim/dialogue.hpp"
#include "todsim/engine.hpp"
#include "todsim/errors.hpp"
#include "todsim/goal.hpp"
#include "todsim/metrics.hpp"
#include "todsim/report.hpp"

namespace {

using todsim::UserGoal;

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw todsim::IoError("cannot open " + path);
  nlohmann::json value;
  in >> value;
  return value;
}

std::map<std::string, UserGoal> index_goals(const std::vector<UserGoal>& goals) {
  std::map<std::string, UserGoal> by_id;
  for (const UserGoal& goal : goals) by_id[goal.id] = goal;
  return by_id;
}

todsim::StopPolicy stop_policy_from_json(const nlohmann::json& config) {
  todsim::StopPolicy stop;
  if (!config.contains("stop")) return stop;
  const auto& node = config.at("stop");
  stop.terminate_on_system_goodbye =
      node.value("terminate_on_system_goodbye", stop.terminate_on_system_goodbye);
  stop.terminate_on_thanks_intent =
      node.value("terminate_on_thanks_intent", stop.terminate_on_thanks_intent);
  stop.agent_end_marker = node.value("agent_end_marker", stop.agent_end_marker);
  return stop;
}

todsim::FailureInjectionConfig failure_from_json(const nlohmann::json& config) {
  todsim::FailureInjectionConfig failure;
  if (!config.contains("tod") || !config.at("tod").contains("failure")) return failure;
  const auto& node = config.at("tod").at("failure");
  failure.loop_probability = node.value("loop_probability", 0.0);
  failure.nlu_error_rate = node.value("nlu_error_rate", 0.0);
  if (node.contains("force_end_after_turn") && !node.at("force_end_after_turn").is_null()) {
    failure.force_end_after_turn = node.at("force_end_after_turn").get<int>();
  }
  return failure;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  const nlohmann::json config = load_json_file(config_path);

  todsim::CampaignConfig campaign;
  campaign.goals = todsim::load_goal_suite(config.at("goals").get<std::string>());
  campaign.dialogues_per_goal = config.value("dialogues_per_goal", 100);
  campaign.max_turns = config.value("max_turns", 20);
  campaign.base_seed = config.value("base_seed", std::uint64_t{0});
  if (seed_override) campaign.base_seed = *seed_override;
  campaign.concurrency = config.value("concurrency", 1);
  campaign.output_dir = out_dir;
  campaign.stop = stop_policy_from_json(config);

  const nlohmann::json agent_node = config.value("agent", nlohmann::json::object());
  const std::string agent_type = agent_node.value("type", "scripted_perfect");
  campaign.params.model_id = agent_node.value("model_id", agent_type);
  campaign.params.temperature = agent_node.value("temperature", 0.9);
  campaign.params.max_tokens = agent_node.value("max_tokens", 256);

  const todsim::FailureInjectionConfig failure = failure_from_json(config);

  todsim::AgentFactory agent_factory;
  if (agent_type == "scripted_perfect") {
    agent_factory = [](const UserGoal& goal, std::uint64_t) {
      return std::make_unique<todsim::ScriptedAgent>(
          todsim::make_perfect_script(todsim::make_goal_schema(goal)));
    };
  } else if (agent_type == "remote") {
    todsim::EndpointConfig endpoint;
    const auto& node = agent_node.at("endpoint");
    endpoint.base_url = node.at("base_url").get<std::string>();
    endpoint.api_key_env = node.value("api_key_env", endpoint.api_key_env);
    endpoint.timeout_seconds = node.value("timeout_seconds", endpoint.timeout_seconds);
    endpoint.max_retries = node.value("max_retries", endpoint.max_retries);
    endpoint.concurrency = node.value("concurrency", endpoint.concurrency);
    endpoint.request_log_path = node.value("request_log_path", std::string{});
    auto client = std::make_shared<todsim::RemoteClient>(endpoint);
    todsim::PromptTemplate tmpl;
    if (agent_node.contains("template")) {
      tmpl = todsim::load_prompt_template(agent_node.at("template").get<std::string>());
    }
    todsim::ShotSet shots;
    if (agent_node.contains("shots")) {
      const auto shot_goals =
          todsim::load_goal_suite(agent_node.at("shots").at("goals").get<std::string>());
      const auto shot_dialogues = todsim::load_transcripts_jsonl(
          agent_node.at("shots").at("transcripts").get<std::string>());
      const auto by_id = index_goals(shot_goals);
      for (const auto& dialogue : shot_dialogues) {
        auto it = by_id.find(dialogue.goal_id());
        if (it != by_id.end()) shots.dialogues.emplace_back(it->second, dialogue);
      }
    }
    const todsim::GenerationParams params = campaign.params;
    agent_factory = [client, tmpl, params, shots](const UserGoal&, std::uint64_t) {
      return std::make_unique<todsim::SimulatorAgent>(client, tmpl, params, shots);
    };
  } else {
    throw todsim::Error("InvalidConfig", "unknown agent type '" + agent_type + "'");
  }

  todsim::TodFactory tod_factory = [failure](const UserGoal& goal, std::uint64_t seed) {
    todsim::FailureInjectionConfig per_dialogue = failure;
    per_dialogue.rng_seed = seed;
    return std::make_unique<todsim::MockTod>(todsim::make_goal_schema(goal), per_dialogue);
  };

  const todsim::CampaignSummary summary =
      todsim::run_campaign(campaign, agent_factory, tod_factory);

  // echo the effective configuration for reproducibility
  nlohmann::json echo = config;
  echo["base_seed"] = campaign.base_seed;
  std::ofstream echo_out(campaign.output_dir / "config.json");
  echo_out << echo.dump(2) << '\n';

  std::cout << "campaign: " << summary.total_dialogues << " dialogues ("
            << summary.generated << " generated, "
            << summary.total_dialogues - summary.generated << " resumed)\n";
  for (const auto& [reason, count] : summary.terminations) {
    std::cout << "  termination " << reason << ": " << count << '\n';
  }
  std::cout << "transcripts: " << summary.transcripts_path.string() << '\n';
  return 0;
}

int run_evaluate(const std::string& transcripts_path, const std::string& goals_path,
                 const std::string& report_path, const std::string& format_name,
                 const std::string& extractor_name, const std::string& annotations_path,
                 const std::string& provenance) {
  const auto transcripts = todsim::load_transcripts_jsonl(transcripts_path);
  const auto goals = index_goals(todsim::load_goal_suite(goals_path));
  const todsim::ExtractorKind extractor = extractor_name == "lexical"
                                              ? todsim::ExtractorKind::lexical
                                              : todsim::ExtractorKind::acts;

  std::vector<todsim::FulfillmentReport> reports;
  std::vector<std::string> user_utterances;
  for (const auto& transcript : transcripts) {
    auto goal_it = goals.find(transcript.goal_id());
    if (goal_it == goals.end()) {
      throw todsim::Error("UnknownGoal", "no goal with id '" + transcript.goal_id() + "'");
    }
    reports.push_back(todsim::evaluate_fulfillment(transcript, goal_it->second, extractor));
    for (const auto& utterance : transcript.utterances()) {
      if (utterance.speaker == todsim::Speaker::user) user_utterances.push_back(utterance.text);
    }
  }

  todsim::RunReport report;
  report.campaign = todsim::aggregate_campaign(reports);
  report.diversity = todsim::diversity_report(user_utterances);
  report.provenance = provenance.empty() ? transcripts_path : provenance;
  if (!annotations_path.empty()) {
    const auto records = todsim::load_annotations_csv(annotations_path);
    report.taxonomy = todsim::prevalence(todsim::vote_by_dialogue(records));
  }

  const todsim::ReportFormat format = format_name == "markdown"
                                          ? todsim::ReportFormat::markdown
                                          : todsim::ReportFormat::json;
  const std::string rendered = todsim::render_report(report, format);
  if (report_path.empty() || report_path == "-") {
    std::cout << rendered;
  } else {
    std::ofstream out(report_path);
    if (!out) throw todsim::IoError("cannot write " + report_path);
    out << rendered;
    std::cout << "report: " << report_path << '\n';
  }
  return 0;
}

int run_export(const std::string& corpus_path, const std::string& goals_path,
               const std::string& out_path, const std::string& keep_subtasks,
               const std::string& split_sizes, std::uint64_t seed,
               const std::string& manifest_path, const std::string& template_path) {
  auto corpus = todsim::load_transcripts_jsonl(corpus_path);
  const auto goals = index_goals(todsim::load_goal_suite(goals_path));

  if (!keep_subtasks.empty()) {
    std::set<todsim::Subtask> keep;
    std::stringstream stream(keep_subtasks);
    std::string token;
    while (std::getline(stream, token, ',')) {
      keep.insert(todsim::subtask_from_string(token));
    }
    corpus = todsim::filter_by_subtask(corpus, keep, goals);
  }

  if (!split_sizes.empty()) {
    todsim::SplitSpec spec;
    spec.seed = seed;
    std::stringstream stream(split_sizes);
    std::string token;
    std::vector<std::size_t> sizes;
    while (std::getline(stream, token, ',')) sizes.push_back(std::stoul(token));
    if (sizes.size() != 3) {
      throw todsim::Error("InvalidConfig", "--split wants train,test,val sizes");
    }
    spec.train_size = sizes[0];
    spec.test_size = sizes[1];
    spec.val_size = sizes[2];
    corpus = todsim::split_corpus(corpus, spec).train;
  }

  todsim::PromptTemplate tmpl;
  if (!template_path.empty()) tmpl = todsim::load_prompt_template(template_path);

  std::vector<todsim::TrainingRecord> records;
  for (const auto& transcript : corpus) {
    auto goal_it = goals.find(transcript.goal_id());
    if (goal_it == goals.end()) {
      throw todsim::Error("UnknownGoal", "no goal with id '" + transcript.goal_id() + "'");
    }
    if (transcript.exchanges() < 1) continue;  // nothing to learn from
    auto decomposed = todsim::decompose_dialogue(goal_it->second, transcript, tmpl);
    records.insert(records.end(), decomposed.begin(), decomposed.end());
  }
  todsim::export_records(records, out_path);
  std::cout << "exported " << records.size() << " records to " << out_path << '\n';

  if (!manifest_path.empty()) {
    const auto manifest = todsim::write_manifest(todsim::FinetuneParams{}, out_path,
                                                 manifest_path);
    std::cout << "manifest: " << manifest_path << " (digest " << manifest.dataset_digest
              << ")\n";
  }
  return 0;
}

int run_kappa(const std::string& annotations_path) {
  const auto records = todsim::load_annotations_csv(annotations_path);
  const auto voted = todsim::vote_by_dialogue(records);
  const auto prevalences = todsim::prevalence(voted);
  std::cout << "category,kappa,prevalence_pct\n";
  for (todsim::ErrorCategory category : todsim::kAllErrorCategories) {
    std::string kappa_text = "degenerate";
    try {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.3f", todsim::fleiss_kappa(records, category));
      kappa_text = buf;
    } catch (const todsim::DegenerateDistribution&) {
    }
    std::cout << todsim::to_string(category) << ',' << kappa_text << ','
              << prevalences.at(category) << '\n';
  }
  return 0;
}

int run_stats(const std::string& transcripts_path, bool include_trailing_half) {
  const auto corpus = todsim::load_transcripts_jsonl(transcripts_path);
  const todsim::CorpusStats stats =
      todsim::corpus_stats(corpus, todsim::tokenize, include_trailing_half);
  std::cout << "dialogues: " << stats.dialogue_count << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "avg turns: %.2f\n", stats.avg_turns);
  std::cout << buf;
  std::snprintf(buf, sizeof(buf), "avg words per user utterance: %.2f\n", stats.avg_user_words);
  std::cout << buf;
  std::snprintf(buf, sizeof(buf), "avg words per system utterance: %.2f\n",
                stats.avg_system_words);
  std::cout << buf;
  return 0;
}

int run_report(const std::string& input_path, const std::string& format_name,
               const std::string& out_path) {
  const todsim::RunReport report = todsim::report_from_json(load_json_file(input_path));
  const todsim::ReportFormat format = format_name == "json" ? todsim::ReportFormat::json
                                                            : todsim::ReportFormat::markdown;
  const std::string rendered = todsim::render_report(report, format);
  if (out_path.empty() || out_path == "-") {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path);
    if (!out) throw todsim::IoError("cannot write " + out_path);
    out << rendered;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-simulator harness for task-oriented dialogue systems"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a dialogue campaign");
  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "campaign config JSON")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();
  simulate->add_option("--seed", sim_seed, "override the config base seed");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score simulated dialogues");
  std::string eval_transcripts, eval_goals, eval_report, eval_format = "json";
  std::string eval_extractor = "acts", eval_annotations, eval_provenance;
  std::uint64_t eval_seed = 0;
  evaluate->add_option("--transcripts", eval_transcripts, "transcripts JSONL")->required();
  evaluate->add_option("--goals", eval_goals, "goal suite")->required();
  evaluate->add_option("--report", eval_report, "output path ('-' for stdout)");
  evaluate->add_option("--format", eval_format, "json|markdown");
  evaluate->add_option("--extractor", eval_extractor, "acts|lexical");
  evaluate->add_option("--annotations", eval_annotations, "annotation CSV for taxonomy");
  evaluate->add_option("--provenance", eval_provenance, "provenance string for the report");
  evaluate->add_option("--seed", eval_seed, "accepted for interface uniformity");

  // export-finetune
  auto* exporter = app.add_subcommand("export-finetune", "Build a fine-tuning dataset");
  std::string exp_corpus, exp_goals, exp_out, exp_keep, exp_split, exp_manifest, exp_template;
  std::uint64_t exp_seed = 0;
  exporter->add_option("--corpus", exp_corpus, "transcripts JSONL")->required();
  exporter->add_option("--goals", exp_goals, "goal suite")->required();
  exporter->add_option("--out", exp_out, "output records JSONL")->required();
  exporter->add_option("--keep-subtasks", exp_keep, "comma list: book,cancel,reschedule");
  exporter->add_option("--split", exp_split, "train,test,val sizes; exports the train split");
  exporter->add_option("--seed", exp_seed, "split shuffle seed");
  exporter->add_option("--manifest", exp_manifest, "write a fine-tuning manifest here");
  exporter->add_option("--template", exp_template, "prompt template JSON");

  // kappa
  auto* kappa = app.add_subcommand("kappa", "Inter-annotator agreement");
  std::string kappa_annotations;
  std::uint64_t kappa_seed = 0;
  kappa->add_option("--annotations", kappa_annotations, "annotation CSV")->required();
  kappa->add_option("--seed", kappa_seed, "accepted for interface uniformity");

  // stats
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  std::string stats_transcripts;
  bool stats_trailing = false;
  std::uint64_t stats_seed = 0;
  stats->add_option("--transcripts", stats_transcripts, "transcripts JSONL")->required();
  stats->add_flag("--count-trailing-system", stats_trailing,
                  "count a trailing unanswered system utterance as half an exchange");
  stats->add_option("--seed", stats_seed, "accepted for interface uniformity");

  // report
  auto* report = app.add_subcommand("report", "Re-render a report JSON");
  std::string report_input, report_format = "markdown", report_out;
  std::uint64_t report_seed = 0;
  report->add_option("--input", report_input, "report JSON")->required();
  report->add_option("--format", report_format, "markdown|json");
  report->add_option("--out", report_out, "output path ('-' for stdout)");
  report->add_option("--seed", report_seed, "accepted for interface uniformity");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim_config, sim_out, sim_seed);
    if (evaluate->parsed()) {
      return run_evaluate(eval_transcripts, eval_goals, eval_report, eval_format, eval_extractor,
                          eval_annotations, eval_provenance);
    }
    if (exporter->parsed()) {
      return run_export(exp_corpus, exp_goals, exp_out, exp_keep, exp_split, exp_seed,
                        exp_manifest, exp_template);
    }
    if (kappa->parsed()) return run_kappa(kappa_annotations);
    if (stats->parsed()) return run_stats(stats_transcripts, stats_trailing);
    if (report->parsed()) return run_report(report_input, report_format, report_out);
  } catch (const todsim::Error& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
