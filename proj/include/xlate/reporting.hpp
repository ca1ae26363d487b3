// Per-case records and report emission: failure profiles, taxonomy count
// grids, accuracy comparisons, and mitigation summaries as CSV, JSONL, and
// Markdown. Zero cells render as "x" in human-readable views and 0 in
// machine views.
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "xlate/metrics.hpp"
#include "xlate/taxonomy.hpp"
#include "xlate/types.hpp"

namespace xlate {

struct CaseRecord {
  std::string task_id;
  std::string dataset_id;
  std::string model_id;
  Approach approach = Approach::Direct;
  Direction direction;
  Verdict verdict = Verdict::Correct;
  long compile_ms = 0;
  long run_ms = 0;  // summed over executed tests
  std::string diagnostic_digest;
  std::optional<FailureLabel> label;
  bool unclassified = false;
  std::optional<int> first_failure_test;

  CombinationKey combination() const {
    return {model_id, dataset_id, approach, direction};
  }
  // Identity used for resume/idempotence.
  std::string case_key() const;

  std::string to_jsonl() const;
  static CaseRecord from_jsonl(const std::string& line);
};

std::vector<CaseRecord> load_case_records(const std::filesystem::path& jsonl);

// Groups records into per-combination tallies, sorted by key.
std::vector<CombinationTally> tallies_from_records(std::span<const CaseRecord> records);

struct FailureProfileRow {
  CombinationKey key;
  long long instances = 0;
  bool incomplete = false;  // empty record set
  Rat accuracy, re_rate, ce_rate, tf_rate, to_rate;  // fractions of N
};

// All records must share one combination; empty input yields an
// incomplete-flagged row.
FailureProfileRow failure_profile(std::span<const CaseRecord> records);

// Taxonomy count grid: one row per (model, dataset, approach), columns are
// RE1..RE6 and CE1..CE7 per direction.
struct TaxonomyGridRow {
  std::string model_id;
  std::string dataset_id;
  Approach approach = Approach::Direct;
  // counts[direction_key][subtype]
  std::map<std::string, std::map<Subtype, long long>> counts;
  std::map<std::string, long long> unclassified;
};

struct TaxonomyGrid {
  std::vector<std::string> direction_keys;  // column groups, sorted
  std::vector<TaxonomyGridRow> rows;        // sorted by (model, dataset, approach)

  long long column_sum(Subtype s) const;
};

TaxonomyGrid taxonomy_grid(std::span<const CombinationTally> tallies);

// Inputs for one emitted report set.
struct RunData {
  std::string run_id;
  std::vector<CaseRecord> records;          // may be empty for counts replay
  std::vector<CombinationTally> tallies;    // always present
  std::string manifest_json;                // written verbatim
};

enum class ReportFormat { Csv, Jsonl, Markdown };

// Writes reports/<run_id>/{cases.jsonl, summary.csv, taxonomy.csv, report.md,
// manifest.json} under out_dir, restricted to the requested formats.
// Returns the emitted paths.
std::vector<std::filesystem::path> emit_reports(
    const std::filesystem::path& out_dir, const RunData& data,
    const std::set<ReportFormat>& formats = {ReportFormat::Csv, ReportFormat::Jsonl,
                                             ReportFormat::Markdown});

// Counts CSV (taxonomy-table shape) used to replay published counts with no
// model access. Columns: model,dataset,approach,direction,N,K,RE1..RE6,CE1..CE7.
std::vector<CombinationTally> load_counts_csv(const std::filesystem::path& csv);
void write_counts_csv(const std::filesystem::path& csv,
                      std::span<const CombinationTally> tallies);

}  // namespace xlate
