// xlate: batch harness for judged Python<->Java translation runs.
//
// Subcommands: translate, evaluate, metrics, run-all, classify, kappa,
// codebook. Exit codes: 0 success, 1 run finished with failures, 2
// configuration or environment error.
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "xlate/errors.hpp"
#include "xlate/metrics.hpp"
#include "xlate/runner.hpp"
#include "xlate/taxonomy.hpp"
#include "xlate/util.hpp"

namespace {

using namespace xlate;

struct CliOverrides {
  std::string config_file;
  std::string corpus;
  std::vector<std::string> datasets;
  std::vector<std::string> directions;
  std::vector<std::string> approaches;
  std::vector<std::string> models;
  std::string mock_script;
  std::string endpoint;
  std::string out_dir;
  std::string codebook;
  std::string counts;
  std::string run_id;
  int jobs = 0;
  int run_timeout_ms = 0;
  int compile_timeout_ms = 0;
  int plan_retries = -1;
  bool keep_failed = false;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_file, "Configuration file (JSON)");
  cmd->add_option("--corpus", o.corpus, "Corpus root directory");
  cmd->add_option("--dataset", o.datasets, "Dataset id (repeatable)");
  cmd->add_option("--direction", o.directions,
                  "Direction, e.g. python-java (repeatable)");
  cmd->add_option("--approach", o.approaches, "direct or algorithm (repeatable)");
  cmd->add_option("--model", o.models, "Model id (repeatable)");
  cmd->add_option("--mock", o.mock_script, "Mock provider script (JSON)");
  cmd->add_option("--endpoint", o.endpoint, "Live chat-completions base URL");
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--codebook", o.codebook, "Failure codebook file");
  cmd->add_option("--counts", o.counts, "Counts CSV for metric replay");
  cmd->add_option("--run-id", o.run_id, "Run id (default: config digest)");
  cmd->add_option("--jobs", o.jobs, "Worker count");
  cmd->add_option("--run-timeout", o.run_timeout_ms, "Per-test wall limit (ms)");
  cmd->add_option("--compile-timeout", o.compile_timeout_ms, "Compile wall limit (ms)");
  cmd->add_option("--plan-retries", o.plan_retries, "Plan retry budget");
  cmd->add_flag("--keep-failed", o.keep_failed, "Keep workspaces of failed cases");
}

RunConfig resolve_config(const CliOverrides& o) {
  RunConfig config;
  if (!o.config_file.empty()) config = load_config_file(o.config_file);
  if (!o.corpus.empty()) config.corpus_root = o.corpus;
  if (!o.datasets.empty()) config.datasets = o.datasets;
  if (!o.directions.empty()) {
    config.directions.clear();
    for (const std::string& d : o.directions) {
      auto parsed = direction_from_key(d);
      if (!parsed) throw ConfigError("bad direction '" + d + "'");
      config.directions.push_back(*parsed);
    }
  }
  if (!o.approaches.empty()) {
    config.approaches.clear();
    for (const std::string& a : o.approaches) {
      auto parsed = approach_from_key(a);
      if (!parsed) throw ConfigError("bad approach '" + a + "'");
      config.approaches.push_back(*parsed);
    }
  }
  if (!o.models.empty()) config.models = o.models;
  if (!o.mock_script.empty()) config.mock_script = o.mock_script;
  if (!o.endpoint.empty()) config.endpoint = o.endpoint;
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (!o.codebook.empty()) config.codebook_path = o.codebook;
  if (!o.counts.empty()) config.counts_csv = o.counts;
  if (!o.run_id.empty()) config.run_id = o.run_id;
  if (o.jobs > 0) config.jobs = o.jobs;
  if (o.run_timeout_ms > 0) config.limits.run_timeout_ms = o.run_timeout_ms;
  if (o.compile_timeout_ms > 0) config.limits.compile_timeout_ms = o.compile_timeout_ms;
  if (o.plan_retries >= 0) config.plan_retries = o.plan_retries;
  if (o.keep_failed) config.keep_failed_workspaces = true;
  return config;
}

int run_classify(const std::string& stage, const std::string& lang,
                 const std::string& codebook_file) {
  Codebook book = codebook_file.empty() ? Codebook::builtin()
                                        : Codebook::parse(read_file(codebook_file));
  auto target = lang_from_key(lang);
  if (!target) throw ConfigError("bad --lang '" + lang + "'");
  std::ostringstream buf;
  buf << std::cin.rdbuf();
  std::string diagnostics = buf.str();
  if (trim(diagnostics).empty()) throw ConfigError("no diagnostic text on stdin");

  if (stage == "compile") {
    FailureLabel label = classify_compile(book, diagnostics, *target);
    std::cout << subtype_key(label.subtype) << " " << subtype_long_name(label.subtype)
              << " rule=" << label.matched_rule_id << "\n";
    return 0;
  }
  if (stage == "runtime") {
    LabelResult result = classify_runtime(book, diagnostics, *target);
    if (result.classified) {
      std::cout << subtype_key(result.label.subtype) << " "
                << subtype_long_name(result.label.subtype)
                << " rule=" << result.label.matched_rule_id << "\n";
      return 0;
    }
    std::cout << "UNCLASSIFIED evidence=" << result.evidence << "\n";
    return 1;
  }
  throw ConfigError("bad --stage '" + stage + "' (compile|runtime)");
}

std::vector<std::string> read_label_file(const std::string& path) {
  std::vector<std::string> labels;
  for (const std::string& line : split_lines(read_file(path))) {
    if (!trim(line).empty()) labels.emplace_back(trim(line));
  }
  return labels;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch harness for judged Python<->Java code translation runs"};
  app.require_subcommand(1);

  CliOverrides o;
  bool print_calls = false;

  CLI::App* translate = app.add_subcommand("translate", "Generate translations");
  add_common_flags(translate, o);
  translate->add_flag("--print-calls", print_calls, "Report provider call count");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Compile, run, and judge artifacts");
  add_common_flags(evaluate, o);

  CLI::App* metrics = app.add_subcommand("metrics", "Aggregate records into reports");
  add_common_flags(metrics, o);

  CLI::App* run_all = app.add_subcommand("run-all", "translate + evaluate + metrics");
  add_common_flags(run_all, o);

  std::string classify_stage, classify_lang, classify_codebook;
  CLI::App* classify = app.add_subcommand("classify", "Label one diagnostic from stdin");
  classify->add_option("--stage", classify_stage, "compile|runtime")->required();
  classify->add_option("--lang", classify_lang, "python|java")->required();
  classify->add_option("--codebook", classify_codebook, "Codebook file");

  std::string kappa_a, kappa_b;
  CLI::App* kappa = app.add_subcommand("kappa", "Cohen's kappa of two label files");
  kappa->add_option("a", kappa_a, "Labels, one per line")->required();
  kappa->add_option("b", kappa_b, "Labels, one per line")->required();

  bool codebook_dump = false;
  std::string codebook_check;
  CLI::App* codebook = app.add_subcommand("codebook", "Inspect the failure codebook");
  codebook->add_flag("--dump", codebook_dump, "Print the built-in codebook");
  codebook->add_option("--check", codebook_check, "Parse and validate a codebook file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (translate->parsed()) {
      RunConfig config = resolve_config(o);
      TranslateStats stats = cmd_translate(config, &std::cerr);
      if (print_calls) std::cout << "provider_calls=" << stats.provider_calls << "\n";
      return stats.artifact_errors > 0 ? 1 : 0;
    }
    if (evaluate->parsed()) {
      RunConfig config = resolve_config(o);
      EvaluateStats stats = cmd_evaluate(config, &std::cerr);
      return stats.failures > 0 ? 1 : 0;
    }
    if (metrics->parsed()) {
      RunConfig config = resolve_config(o);
      cmd_metrics(config, &std::cerr);
      return 0;
    }
    if (run_all->parsed()) {
      RunConfig config = resolve_config(o);
      RunAllStats stats = cmd_run_all(config, &std::cerr);
      bool failures = stats.translate.artifact_errors > 0 || stats.evaluate.failures > 0;
      return failures ? 1 : 0;
    }
    if (classify->parsed()) {
      return run_classify(classify_stage, classify_lang, classify_codebook);
    }
    if (kappa->parsed()) {
      double k = cohen_kappa(read_label_file(kappa_a), read_label_file(kappa_b));
      std::cout << k << "\n";
      return 0;
    }
    if (codebook->parsed()) {
      if (codebook_dump) {
        std::cout << builtin_codebook_text();
        return 0;
      }
      if (!codebook_check.empty()) {
        Codebook book = Codebook::parse(read_file(codebook_check));
        std::cout << "ok: version " << book.version() << ", " << book.rules().size()
                  << " rules\n";
        return 0;
      }
      std::cerr << "codebook: pass --dump or --check FILE\n";
      return 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
