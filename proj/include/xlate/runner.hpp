// Run orchestration: configuration, the translate/evaluate/metrics stages,
// and their composition. Every stage is resumable; completed transcript tags,
// artifact files, and case records are never redone.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xlate/executor.hpp"
#include "xlate/gateway.hpp"
#include "xlate/pipelines.hpp"
#include "xlate/reporting.hpp"
#include "xlate/types.hpp"

namespace xlate {

struct RunConfig {
  std::filesystem::path corpus_root;
  std::vector<std::string> datasets;
  std::vector<Direction> directions;
  std::vector<Approach> approaches = {Approach::Direct, Approach::AlgorithmBased};
  std::vector<std::string> models;

  std::string endpoint;  // live chat-completions base URL
  std::string api_key_env = "XLATE_API_KEY";
  std::filesystem::path mock_script;  // mutually exclusive with a live endpoint

  ResourceLimits limits;
  Toolchain toolchain;
  DecodingParams decoding;
  int jobs = 1;
  int plan_retries = 2;
  std::filesystem::path codebook_path;  // empty = built-in codebook
  std::filesystem::path plan_rules_path;
  std::filesystem::path out_dir = "out";
  std::filesystem::path counts_csv;  // metrics replay input
  std::string run_id;                // empty = derived from the config digest
  bool keep_failed_workspaces = false;
  // Zeroes recorded durations so repeated runs emit identical bytes.
  // Unset = on for mock runs, off for live runs.
  std::optional<bool> deterministic_timings;

  bool mock_mode() const { return !mock_script.empty(); }
  bool deterministic() const {
    return deterministic_timings.value_or(mock_mode());
  }
};

RunConfig load_config_file(const std::filesystem::path& path);

// Throws ConfigError on contradictions (mock plus live endpoint, no
// resolvable combination, missing credential in live mode when `for_translate`).
void validate_config(const RunConfig& config, bool for_translate);

// Digest of the experimental setup; ignores out paths and job counts.
std::string config_digest(const RunConfig& config);
// `run_id` when set, else "run-<config digest>".
std::string config_run_id(const RunConfig& config);

std::filesystem::path transcript_path(const RunConfig& config);
std::filesystem::path artifact_path(const RunConfig& config,
                                    const TranslationTask& task,
                                    const std::string& model_id, Approach approach);
std::filesystem::path cases_path(const RunConfig& config);
std::filesystem::path reports_dir(const RunConfig& config);

std::string artifact_to_json(const TranslationArtifact& artifact);
TranslationArtifact artifact_from_json(const std::string& text);

Codebook load_codebook(const RunConfig& config);
std::string build_manifest_json(const RunConfig& config, const Codebook& book);

struct TranslateStats {
  int artifacts_written = 0;
  int skipped_existing = 0;
  int artifact_errors = 0;  // empty output or exhausted gateway per task
  long provider_calls = 0;
  std::vector<std::pair<std::string, std::string>> rejected_tasks;
};

struct EvaluateStats {
  int evaluated = 0;
  int skipped_existing = 0;
  int failures = 0;  // verdicts other than Correct
};

struct MetricsStats {
  std::vector<std::filesystem::path> written;
  bool from_counts = false;
};

TranslateStats cmd_translate(const RunConfig& config, std::ostream* log = nullptr);
EvaluateStats cmd_evaluate(const RunConfig& config, std::ostream* log = nullptr);
MetricsStats cmd_metrics(const RunConfig& config, std::ostream* log = nullptr);

struct RunAllStats {
  TranslateStats translate;
  EvaluateStats evaluate;
  MetricsStats metrics;
};

RunAllStats cmd_run_all(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace xlate
