#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "fixture_helpers.hpp"
#include "xlate/errors.hpp"
#include "xlate/reporting.hpp"
#include "xlate/runner.hpp"
#include "xlate/util.hpp"

using namespace xlate;
namespace fs = std::filesystem;

namespace {

struct RunFixture {
  fs::path root;

  explicit RunFixture(const char* name) {
    root = fs::temp_directory_path() /
           ("xlate-runner-" + std::to_string(::getpid()) + "-" + name);
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root / "corpus");
    testfix::write_verdict_corpus(root / "corpus");
    testfix::write_mini_corpus(root / "corpus");
    testfix::write_mock_script(root / "mock.json");
  }
  ~RunFixture() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }

  RunConfig config(const std::string& out_name = "out") const {
    RunConfig c;
    c.corpus_root = root / "corpus";
    c.datasets = {"avatar"};
    c.directions = {{Lang::Java, Lang::Python}};
    c.models = {"mock-1"};
    c.mock_script = root / "mock.json";
    c.out_dir = root / out_name;
    c.limits.run_timeout_ms = 1500;
    return c;
  }
};

int count_verdicts(const std::vector<CaseRecord>& records, Verdict v) {
  int n = 0;
  for (const CaseRecord& r : records) n += r.verdict == v;
  return n;
}

}  // namespace

TEST_CASE("translate produces artifacts for every unit and is resumable") {
  RunFixture fx("translate");
  RunConfig config = fx.config();

  TranslateStats stats = cmd_translate(config, nullptr);
  CHECK(stats.artifacts_written == 10);  // 5 tasks x 2 approaches
  CHECK(stats.skipped_existing == 0);
  CHECK(stats.artifact_errors == 0);
  // direct: 5, algorithm: 2+3+4+2+2 = 13
  CHECK(stats.provider_calls == 18);

  // Re-invocation after completion: no new model calls.
  TranslateStats again = cmd_translate(config, nullptr);
  CHECK(again.artifacts_written == 0);
  CHECK(again.skipped_existing == 10);
  CHECK(again.provider_calls == 0);
}

TEST_CASE("the 3-task mini corpus needs exactly 9 scripted calls") {
  RunFixture fx("mini");
  RunConfig config = fx.config();
  config.datasets = {"mini"};

  TranslateStats stats = cmd_translate(config, nullptr);
  CHECK(stats.artifacts_written == 6);  // 3 direct + 3 algorithm
  CHECK(stats.provider_calls == 9);     // 3 + 3x2
  auto lines = split_lines(read_file(transcript_path(config)));
  CHECK(lines.size() == 9);
}

TEST_CASE("interrupted translate resumes from the transcript without new calls") {
  RunFixture fx("resume");
  RunConfig config = fx.config();
  cmd_translate(config, nullptr);

  // Simulate a crash after the calls but before artifacts landed.
  fs::remove_all(config.out_dir / "artifacts");
  TranslateStats resumed = cmd_translate(config, nullptr);
  CHECK(resumed.artifacts_written == 10);
  CHECK(resumed.provider_calls == 0);  // everything replayed from the transcript
}

TEST_CASE("evaluate covers all five verdicts and is idempotent") {
  RunFixture fx("evaluate");
  RunConfig config = fx.config();
  cmd_translate(config, nullptr);

  EvaluateStats stats = cmd_evaluate(config, nullptr);
  CHECK(stats.evaluated == 10);
  CHECK(stats.failures == 8);  // both approaches fail t02..t05

  auto records = load_case_records(cases_path(config));
  REQUIRE(records.size() == 10);
  CHECK(count_verdicts(records, Verdict::Correct) == 2);
  CHECK(count_verdicts(records, Verdict::CompileError) == 2);
  CHECK(count_verdicts(records, Verdict::RuntimeError) == 2);
  CHECK(count_verdicts(records, Verdict::TestFailure) == 2);
  CHECK(count_verdicts(records, Verdict::Timeout) == 2);

  // Labels only for the two taxonomy buckets.
  for (const CaseRecord& r : records) {
    bool labeled_bucket = r.verdict == Verdict::CompileError ||
                          r.verdict == Verdict::RuntimeError;
    CHECK(r.label.has_value() == labeled_bucket);
  }

  EvaluateStats again = cmd_evaluate(config, nullptr);
  CHECK(again.evaluated == 0);
  CHECK(again.skipped_existing == 10);
  CHECK(load_case_records(cases_path(config)).size() == 10);
}

TEST_CASE("metrics from case records emits the full report set") {
  RunFixture fx("metrics");
  RunConfig config = fx.config();
  cmd_translate(config, nullptr);
  cmd_evaluate(config, nullptr);

  MetricsStats stats = cmd_metrics(config, nullptr);
  CHECK_FALSE(stats.from_counts);
  fs::path dir = reports_dir(config);
  CHECK(fs::exists(dir / "report.md"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  std::string report = read_file(dir / "report.md");
  CHECK(report.find("## Accuracy (micro-average)") != std::string::npos);
  CHECK(report.find("## Mitigation") != std::string::npos);

  // Reconstructibility: delete cases.jsonl, re-evaluate + metrics, compare.
  std::string before = read_file(dir / "report.md");
  std::string cases_before = read_file(dir / "cases.jsonl");
  fs::remove(cases_path(config));
  cmd_evaluate(config, nullptr);
  cmd_metrics(config, nullptr);
  CHECK(read_file(dir / "report.md") == before);
  CHECK(read_file(dir / "cases.jsonl") == cases_before);
}

TEST_CASE("metrics replays pooled accuracy counts without any model access") {
  RunFixture fx("counts");
  RunConfig config = fx.config();
  config.counts_csv = std::string(XLATE_FIXTURES_DIR) + "/counts_pooled_accuracy.csv";

  MetricsStats stats = cmd_metrics(config, nullptr);
  CHECK(stats.from_counts);
  std::string report = read_file(reports_dir(config) / "report.md");
  CHECK(report.find("67.7%") != std::string::npos);
  CHECK(report.find("78.5%") != std::string::npos);
  CHECK(report.find("10.8 pp") != std::string::npos);
}

TEST_CASE("metrics without any input exits with a configuration error") {
  RunFixture fx("noinput");
  RunConfig config = fx.config();
  CHECK_THROWS_AS(cmd_metrics(config, nullptr), ConfigError);
}

TEST_CASE("config invariants") {
  RunFixture fx("config");
  RunConfig config = fx.config();
  config.endpoint = "https://example.com/api/v1";
  CHECK_THROWS_AS(validate_config(config, true), ConfigError);  // mock + live

  RunConfig live = fx.config();
  live.mock_script.clear();
  live.api_key_env = "XLATE_TEST_KEY_UNSET";
  ::unsetenv("XLATE_TEST_KEY_UNSET");
  CHECK_THROWS_AS(validate_config(live, true), ConfigError);  // no credential

  RunConfig nothing = fx.config();
  nothing.models.clear();
  CHECK_THROWS_AS(cmd_translate(nothing, nullptr), ConfigError);
}

TEST_CASE("config files load and override defaults") {
  RunFixture fx("file");
  fs::path cfg = fx.root / "config.json";
  write_file(cfg, R"({
    "corpus_root": ")" + (fx.root / "corpus").string() + R"(",
    "datasets": ["avatar"],
    "directions": ["java-python"],
    "approaches": ["direct"],
    "models": ["mock-1"],
    "mock_script": ")" + (fx.root / "mock.json").string() + R"(",
    "jobs": 3,
    "plan_retries": 1,
    "limits": {"run_timeout_ms": 1500},
    "decoding": {"temperature": 0.0, "seed": 7}
  })");
  RunConfig config = load_config_file(cfg);
  CHECK(config.jobs == 3);
  CHECK(config.plan_retries == 1);
  CHECK(config.approaches == std::vector<Approach>{Approach::Direct});
  CHECK(config.limits.run_timeout_ms == 1500);
  CHECK(config.decoding.seed == 7);
  CHECK(config_run_id(config) == config_run_id(config));

  // Jobs do not change the run identity; the mock script content does.
  RunConfig other = config;
  other.jobs = 1;
  CHECK(config_run_id(other) == config_run_id(config));
}

namespace {

// Order-stable digest of every file under a tree.
std::string tree_digest(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const fs::path& p : files) {
    acc += p.string() + ":" + fnv1a64_hex(read_file(p)) + "\n";
  }
  return fnv1a64_hex(acc);
}

}  // namespace

TEST_CASE("run-all composes the three stages under one run id") {
  RunFixture fx("runall");
  RunConfig config = fx.config();
  std::string corpus_before = tree_digest(config.corpus_root);
  RunAllStats stats = cmd_run_all(config, nullptr);
  CHECK(stats.translate.artifacts_written == 10);
  CHECK(stats.evaluate.evaluated == 10);
  CHECK(fs::exists(reports_dir(config) / "report.md"));
  // The corpus is read-only to every stage.
  CHECK(tree_digest(config.corpus_root) == corpus_before);

  // Direct-only filter produces no plan or codegen prompts in the transcript.
  RunFixture fx2("direct-only");
  RunConfig direct_only = fx2.config();
  direct_only.approaches = {Approach::Direct};
  cmd_translate(direct_only, nullptr);
  std::string transcript = read_file(transcript_path(direct_only));
  CHECK(transcript.find("algorithm") == std::string::npos);
  CHECK(transcript.find("codegen") == std::string::npos);
  CHECK(transcript.find("extract a detailed algorithm") == std::string::npos);
}
