#include "xlate/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "nlohmann/json.hpp"
#include "xlate/errors.hpp"
#include "xlate/labeling.hpp"
#include "xlate/metrics.hpp"
#include "xlate/util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace xlate {

namespace {

// Runs fn(0..count) on `jobs` threads. The first exception wins; workers stop
// picking new items once one is recorded.
template <typename Fn>
void parallel_for(size_t count, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      while (!abort.load()) {
        size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          abort.store(true);
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void log_line(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

struct WorkUnit {
  TranslationTask task;
  std::string model_id;
  Approach approach = Approach::Direct;
};

// Tasks sorted per corpus load; units ordered task-major so resumes walk the
// same sequence every time.
std::vector<WorkUnit> enumerate_units(const RunConfig& config,
                                      TranslateStats* stats, std::ostream* log) {
  std::vector<WorkUnit> units;
  for (const std::string& dataset : config.datasets) {
    for (const Direction& direction : config.directions) {
      auto [tasks, report] = load_corpus(config.corpus_root, dataset, direction);
      for (const auto& [task_id, reason] : report.rejected) {
        if (stats) stats->rejected_tasks.emplace_back(task_id, reason);
        log_line(log, "rejected " + dataset + "/" + direction_key(direction) + "/" +
                          task_id + ": " + reason);
      }
      for (const std::string& issue : report.manifest_issues) {
        log_line(log, "manifest: " + dataset + ": " + issue);
      }
      for (const TranslationTask& task : tasks) {
        for (const std::string& model : config.models) {
          for (Approach approach : config.approaches) {
            units.push_back({task, model, approach});
          }
        }
      }
    }
  }
  return units;
}

std::unique_ptr<Provider> make_provider(const RunConfig& config) {
  if (config.mock_mode()) {
    return MockProvider::from_file(config.mock_script);
  }
  const char* key = std::getenv(config.api_key_env.c_str());
  if (!key || !*key) {
    throw ConfigError("live mode needs the " + config.api_key_env +
                      " environment variable");
  }
  std::string endpoint = config.endpoint.empty() ? "https://openrouter.ai/api/v1"
                                                 : config.endpoint;
  return std::make_unique<HttpProvider>(endpoint, key);
}

json limits_json(const ResourceLimits& limits) {
  return {{"compile_timeout_ms", limits.compile_timeout_ms},
          {"run_timeout_ms", limits.run_timeout_ms},
          {"memory_limit_mb", limits.memory_limit_bytes >> 20}};
}

}  // namespace

RunConfig load_config_file(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  RunConfig config;
  auto get_path = [&](const char* key, fs::path& out) {
    if (doc.contains(key)) out = doc[key].get<std::string>();
  };
  get_path("corpus_root", config.corpus_root);
  get_path("mock_script", config.mock_script);
  get_path("codebook", config.codebook_path);
  get_path("plan_rules", config.plan_rules_path);
  get_path("out_dir", config.out_dir);
  get_path("counts_csv", config.counts_csv);
  if (doc.contains("datasets")) {
    config.datasets = doc["datasets"].get<std::vector<std::string>>();
  }
  if (doc.contains("directions")) {
    config.directions.clear();
    for (const auto& item : doc["directions"]) {
      auto d = direction_from_key(item.get<std::string>());
      if (!d) throw ConfigError("config: bad direction '" + item.get<std::string>() + "'");
      config.directions.push_back(*d);
    }
  }
  if (doc.contains("approaches")) {
    config.approaches.clear();
    for (const auto& item : doc["approaches"]) {
      auto a = approach_from_key(item.get<std::string>());
      if (!a) throw ConfigError("config: bad approach '" + item.get<std::string>() + "'");
      config.approaches.push_back(*a);
    }
  }
  if (doc.contains("models")) {
    config.models = doc["models"].get<std::vector<std::string>>();
  }
  if (doc.contains("endpoint")) config.endpoint = doc["endpoint"].get<std::string>();
  if (doc.contains("api_key_env")) {
    config.api_key_env = doc["api_key_env"].get<std::string>();
  }
  if (doc.contains("limits")) {
    const json& l = doc["limits"];
    config.limits.compile_timeout_ms =
        l.value("compile_timeout_ms", config.limits.compile_timeout_ms);
    config.limits.run_timeout_ms =
        l.value("run_timeout_ms", config.limits.run_timeout_ms);
    if (l.contains("memory_limit_mb")) {
      config.limits.memory_limit_bytes = l["memory_limit_mb"].get<long>() << 20;
    }
  }
  if (doc.contains("toolchain")) {
    const json& t = doc["toolchain"];
    config.toolchain.python = t.value("python", config.toolchain.python);
    config.toolchain.java_compiler =
        t.value("java_compiler", config.toolchain.java_compiler);
    config.toolchain.java_runtime =
        t.value("java_runtime", config.toolchain.java_runtime);
  }
  if (doc.contains("decoding")) {
    const json& d = doc["decoding"];
    config.decoding.temperature = d.value("temperature", config.decoding.temperature);
    config.decoding.max_output_tokens =
        d.value("max_output_tokens", config.decoding.max_output_tokens);
    if (d.contains("seed")) {
      if (d["seed"].is_null()) {
        config.decoding.seed.reset();
      } else {
        config.decoding.seed = d["seed"].get<long>();
      }
    }
  }
  config.jobs = doc.value("jobs", config.jobs);
  config.plan_retries = doc.value("plan_retries", config.plan_retries);
  if (doc.contains("run_id")) config.run_id = doc["run_id"].get<std::string>();
  config.keep_failed_workspaces =
      doc.value("keep_failed_workspaces", config.keep_failed_workspaces);
  if (doc.contains("deterministic_timings")) {
    config.deterministic_timings = doc["deterministic_timings"].get<bool>();
  }
  return config;
}

void validate_config(const RunConfig& config, bool for_translate) {
  if (config.mock_mode() && !config.endpoint.empty()) {
    throw ConfigError("mock script and live endpoint are mutually exclusive");
  }
  if (for_translate) {
    if (config.corpus_root.empty()) throw ConfigError("no corpus root configured");
    if (config.datasets.empty() || config.directions.empty() ||
        config.approaches.empty() || config.models.empty()) {
      throw ConfigError(
          "need at least one dataset, direction, approach, and model");
    }
    if (!config.mock_mode()) {
      const char* key = std::getenv(config.api_key_env.c_str());
      if (!key || !*key) {
        throw ConfigError("live mode needs the " + config.api_key_env +
                          " environment variable");
      }
    }
  }
  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (config.plan_retries < 0) throw ConfigError("plan retries must be >= 0");
}

std::string config_digest(const RunConfig& config) {
  // Identity of the experimental setup; out paths and parallelism excluded.
  json fingerprint = {
      {"datasets", config.datasets},
      {"models", config.models},
      {"plan_retries", config.plan_retries},
      {"limits", limits_json(config.limits)},
      {"temperature", config.decoding.temperature},
      {"max_output_tokens", config.decoding.max_output_tokens},
  };
  std::vector<std::string> dirs, apps;
  for (const Direction& d : config.directions) dirs.push_back(direction_key(d));
  for (Approach a : config.approaches) apps.emplace_back(approach_key(a));
  fingerprint["directions"] = dirs;
  fingerprint["approaches"] = apps;
  if (config.decoding.seed) fingerprint["seed"] = *config.decoding.seed;
  if (config.mock_mode()) {
    fingerprint["mock_digest"] = fnv1a64_hex(read_file(config.mock_script));
  } else {
    fingerprint["endpoint"] = config.endpoint;
  }
  return fnv1a64_hex(fingerprint.dump());
}

std::string config_run_id(const RunConfig& config) {
  if (!config.run_id.empty()) return config.run_id;
  return "run-" + config_digest(config);
}

fs::path transcript_path(const RunConfig& config) {
  return config.out_dir / "transcripts" / (config_run_id(config) + ".jsonl");
}

fs::path artifact_path(const RunConfig& config, const TranslationTask& task,
                       const std::string& model_id, Approach approach) {
  return config.out_dir / "artifacts" / task.dataset_id /
         direction_key(task.direction()) / task.task_id / model_id /
         (std::string(approach_key(approach)) + ".json");
}

fs::path reports_dir(const RunConfig& config) {
  return config.out_dir / "reports" / config_run_id(config);
}

fs::path cases_path(const RunConfig& config) {
  return reports_dir(config) / "cases.jsonl";
}

std::string artifact_to_json(const TranslationArtifact& artifact) {
  json doc = {
      {"task_id", artifact.task_id},
      {"dataset", artifact.dataset_id},
      {"model", artifact.model_id},
      {"approach", std::string(approach_key(artifact.approach))},
      {"direction", direction_key(artifact.direction)},
      {"generated_code", artifact.generated_code},
      {"call_count", artifact.call_count},
      {"transcript_tags", artifact.transcript_tags},
  };
  if (artifact.plan) {
    json checklist;
    for (const auto& [facet, hit] : artifact.plan->checklist) {
      checklist[std::string(plan_facet_key(facet))] = hit;
    }
    doc["plan"] = {
        {"text", artifact.plan->plan_text},
        {"checklist", checklist},
        {"attempt_index", artifact.plan->attempt_index},
        {"accepted", artifact.plan->accepted},
    };
  }
  if (!artifact.error.empty()) doc["error"] = artifact.error;
  return doc.dump(2);
}

TranslationArtifact artifact_from_json(const std::string& text) {
  json doc = json::parse(text);
  TranslationArtifact artifact;
  artifact.task_id = doc.at("task_id").get<std::string>();
  artifact.dataset_id = doc.at("dataset").get<std::string>();
  artifact.model_id = doc.at("model").get<std::string>();
  auto approach = approach_from_key(doc.at("approach").get<std::string>());
  auto direction = direction_from_key(doc.at("direction").get<std::string>());
  if (!approach || !direction) throw IoError("malformed artifact json");
  artifact.approach = *approach;
  artifact.direction = *direction;
  artifact.generated_code = doc.value("generated_code", "");
  artifact.call_count = doc.value("call_count", 0);
  if (doc.contains("transcript_tags")) {
    artifact.transcript_tags = doc["transcript_tags"].get<std::vector<std::string>>();
  }
  if (doc.contains("plan")) {
    AlgorithmPlan plan;
    const json& p = doc["plan"];
    plan.plan_text = p.value("text", "");
    plan.attempt_index = p.value("attempt_index", 1);
    plan.accepted = p.value("accepted", false);
    for (PlanFacet f : kPlanFacets) {
      plan.checklist[f] = false;
      if (p.contains("checklist")) {
        plan.checklist[f] =
            p["checklist"].value(std::string(plan_facet_key(f)), false);
      }
    }
    artifact.plan = std::move(plan);
  }
  artifact.error = doc.value("error", "");
  return artifact;
}

Codebook load_codebook(const RunConfig& config) {
  if (config.codebook_path.empty()) return Codebook::builtin();
  return Codebook::parse(read_file(config.codebook_path));
}

std::string build_manifest_json(const RunConfig& config, const Codebook& book) {
  json doc = {
      {"run_id", config_run_id(config)},
      {"config_digest", config_digest(config)},
      {"created_at_ms", now_ms()},
      {"limits", limits_json(config.limits)},
      {"codebook_version", book.version()},
      {"deterministic_timings", config.deterministic()},
      {"jobs", config.jobs},
      {"plan_retries", config.plan_retries},
      {"provider", config.mock_mode() ? "mock" : "http"},
      {"corpus_root", config.corpus_root.string()},
  };
  json tools;
  std::string py = toolchain_version(Lang::Python, config.toolchain);
  std::string jv = toolchain_version(Lang::Java, config.toolchain);
  tools["python"] = py.empty() ? "absent" : py;
  tools["java"] = jv.empty() ? "absent" : jv;
  doc["toolchains"] = tools;
  if (!config.counts_csv.empty()) doc["counts_csv"] = config.counts_csv.string();
  return doc.dump(2);
}

TranslateStats cmd_translate(const RunConfig& config, std::ostream* log) {
  validate_config(config, /*for_translate=*/true);
  TranslateStats stats;
  std::vector<WorkUnit> units = enumerate_units(config, &stats, log);
  if (units.empty()) {
    throw ConfigError("no translation units: corpus selection matched nothing");
  }

  GatewayPolicy policy;
  policy.max_in_flight = std::max(1, config.jobs);
  ModelGateway gateway(make_provider(config), transcript_path(config), policy);

  PipelineOptions pipeline_options;
  pipeline_options.plan_retry_budget = config.plan_retries;
  pipeline_options.decoding = config.decoding;
  PlanRules plan_rules = config.plan_rules_path.empty()
                             ? PlanRules::builtin()
                             : PlanRules::parse(read_file(config.plan_rules_path));
  pipeline_options.plan_rules = &plan_rules;

  std::mutex stats_mu;
  parallel_for(units.size(), config.jobs, [&](size_t i) {
    const WorkUnit& unit = units[i];
    fs::path path = artifact_path(config, unit.task, unit.model_id, unit.approach);
    std::error_code ec;
    if (fs::exists(path, ec)) {
      std::lock_guard lock(stats_mu);
      ++stats.skipped_existing;
      return;
    }
    TranslationArtifact artifact;
    try {
      if (unit.approach == Approach::Direct) {
        artifact = translate_direct(gateway, unit.task, unit.model_id,
                                    pipeline_options);
      } else {
        artifact = translate_algorithm(gateway, unit.task, unit.model_id,
                                       pipeline_options);
      }
    } catch (const GatewayError& e) {
      // One exhausted request must not sink the batch; the unit is recorded
      // as failed and the run exits nonzero.
      artifact.task_id = unit.task.task_id;
      artifact.dataset_id = unit.task.dataset_id;
      artifact.model_id = unit.model_id;
      artifact.approach = unit.approach;
      artifact.direction = unit.task.direction();
      artifact.error = e.what();
    }
    write_file(path, artifact_to_json(artifact));
    std::lock_guard lock(stats_mu);
    ++stats.artifacts_written;
    if (!artifact.error.empty()) {
      ++stats.artifact_errors;
      log_line(log, "artifact error " + unit.task.task_id + " (" + unit.model_id +
                        ", " + std::string(approach_key(unit.approach)) +
                        "): " + artifact.error);
    }
  });

  stats.provider_calls = gateway.provider_calls();
  log_line(log, "translate: " + std::to_string(stats.artifacts_written) + " written, " +
                    std::to_string(stats.skipped_existing) + " skipped, " +
                    std::to_string(stats.provider_calls) + " provider calls");
  return stats;
}

namespace {

std::vector<fs::path> find_artifacts(const RunConfig& config) {
  std::vector<fs::path> paths;
  fs::path root = config.out_dir / "artifacts";
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return paths;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

bool selected(const RunConfig& config, const TranslationArtifact& artifact) {
  auto contains = [](const auto& vec, const auto& value) {
    return std::find(vec.begin(), vec.end(), value) != vec.end();
  };
  if (!config.datasets.empty() && !contains(config.datasets, artifact.dataset_id)) {
    return false;
  }
  if (!config.directions.empty() && !contains(config.directions, artifact.direction)) {
    return false;
  }
  if (!config.approaches.empty() && !contains(config.approaches, artifact.approach)) {
    return false;
  }
  if (!config.models.empty() && !contains(config.models, artifact.model_id)) {
    return false;
  }
  return true;
}

}  // namespace

EvaluateStats cmd_evaluate(const RunConfig& config, std::ostream* log) {
  validate_config(config, /*for_translate=*/false);
  EvaluateStats stats;

  std::vector<TranslationArtifact> artifacts;
  for (const fs::path& path : find_artifacts(config)) {
    TranslationArtifact artifact = artifact_from_json(read_file(path));
    if (selected(config, artifact)) artifacts.push_back(std::move(artifact));
  }
  if (artifacts.empty()) {
    throw ConfigError("no artifacts to evaluate under " +
                      (config.out_dir / "artifacts").string());
  }

  // Toolchains checked before any evaluation starts.
  std::set<Lang> targets;
  for (const TranslationArtifact& a : artifacts) targets.insert(a.direction.target);
  for (Lang lang : targets) require_toolchain(lang, config.toolchain);

  // Tests come from the corpus; artifacts only carry code.
  std::map<std::string, TranslationTask> tasks_by_key;
  for (const std::string& dataset : config.datasets) {
    for (const Direction& direction : config.directions) {
      auto [tasks, report] = load_corpus(config.corpus_root, dataset, direction);
      for (TranslationTask& task : tasks) {
        tasks_by_key[dataset + "/" + direction_key(direction) + "/" + task.task_id] =
            std::move(task);
      }
    }
  }

  Codebook book = load_codebook(config);
  std::set<std::string> done;
  for (const CaseRecord& r : load_case_records(cases_path(config))) {
    done.insert(r.case_key());
  }

  struct Slot {
    bool produced = false;
    CaseRecord record;
  };
  std::vector<Slot> slots(artifacts.size());
  const bool deterministic = config.deterministic();
  fs::path workdir_base = config.out_dir / "work";
  CleanupPolicy policy = config.keep_failed_workspaces ? CleanupPolicy::KeepOnFailure
                                                       : CleanupPolicy::AlwaysDelete;

  parallel_for(artifacts.size(), config.jobs, [&](size_t i) {
    const TranslationArtifact& artifact = artifacts[i];
    CaseRecord record;
    record.task_id = artifact.task_id;
    record.dataset_id = artifact.dataset_id;
    record.model_id = artifact.model_id;
    record.approach = artifact.approach;
    record.direction = artifact.direction;
    if (done.count(record.case_key())) return;  // idempotent resume

    std::string key = artifact.dataset_id + "/" + direction_key(artifact.direction) +
                      "/" + artifact.task_id;
    auto task_it = tasks_by_key.find(key);
    if (task_it == tasks_by_key.end()) {
      throw ConfigError("artifact " + key + " has no matching corpus task");
    }

    // Whatever the model produced is judged, including nothing: empty Java
    // has no class to compile, empty Python runs and mismatches.
    ExecutionOutcome outcome =
        evaluate(artifact.generated_code, artifact.direction.target,
                 task_it->second.tests, config.limits, config.toolchain,
                 workdir_base, policy);
    record.verdict = outcome.verdict;
    record.diagnostic_digest = "fnv1a64:" + fnv1a64_hex(outcome.primary_diagnostic);
    record.first_failure_test = outcome.first_failure_test;
    if (!deterministic) {
      record.compile_ms = outcome.compile.duration_ms;
      for (const RunResult& run : outcome.runs) record.run_ms += run.duration_ms;
    }
    if (auto labeled = label_failure(book, outcome, artifact.direction.target)) {
      if (labeled->classified) {
        record.label = labeled->label;
      } else {
        record.unclassified = true;
      }
    }
    slots[i].record = std::move(record);
    slots[i].produced = true;
  });

  // Records land in unit order regardless of worker scheduling.
  for (Slot& slot : slots) {
    if (!slot.produced) {
      ++stats.skipped_existing;
      continue;
    }
    append_line(cases_path(config), slot.record.to_jsonl());
    ++stats.evaluated;
    if (slot.record.verdict != Verdict::Correct) ++stats.failures;
  }
  log_line(log, "evaluate: " + std::to_string(stats.evaluated) + " evaluated, " +
                    std::to_string(stats.skipped_existing) + " skipped, " +
                    std::to_string(stats.failures) + " failures");
  return stats;
}

MetricsStats cmd_metrics(const RunConfig& config, std::ostream* log) {
  validate_config(config, /*for_translate=*/false);
  MetricsStats stats;
  RunData data;
  data.run_id = config_run_id(config);

  std::error_code ec;
  if (fs::exists(cases_path(config), ec)) {
    data.records = load_case_records(cases_path(config));
  }
  if (!data.records.empty()) {
    data.tallies = tallies_from_records(data.records);
  } else if (!config.counts_csv.empty()) {
    if (!fs::exists(config.counts_csv, ec)) {
      throw ConfigError("counts csv not found: " + config.counts_csv.string());
    }
    data.tallies = load_counts_csv(config.counts_csv);
    stats.from_counts = true;
  } else {
    throw ConfigError("metrics needs " + cases_path(config).string() +
                      " or a counts csv");
  }
  if (data.tallies.empty()) {
    throw UndefinedInputError("metrics input is empty");
  }

  Codebook book = load_codebook(config);
  data.manifest_json = build_manifest_json(config, book);
  stats.written = emit_reports(config.out_dir, data);
  log_line(log, "metrics: wrote " + std::to_string(stats.written.size()) +
                    " files under " + reports_dir(config).string());
  return stats;
}

RunAllStats cmd_run_all(const RunConfig& config, std::ostream* log) {
  RunAllStats stats;
  stats.translate = cmd_translate(config, log);
  stats.evaluate = cmd_evaluate(config, log);
  stats.metrics = cmd_metrics(config, log);
  return stats;
}

}  // namespace xlate
