// On-disk task corpus: <root>/<dataset>/<src>-<tgt>/<task_id>/source.{py|java}
// plus tests/<n>.in and tests/<n>.out. Payloads are raw bytes.
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "xlate/types.hpp"

namespace xlate {

struct TestCase {
  int index = 0;                // 1-based, consecutive within a task
  std::string stdin_payload;
  std::string expected_stdout;

  bool operator==(const TestCase&) const = default;
};

struct TranslationTask {
  std::string task_id;
  std::string dataset_id;
  Lang source_lang = Lang::Python;
  Lang target_lang = Lang::Java;
  std::string source_code;
  std::vector<TestCase> tests;

  Direction direction() const { return {source_lang, target_lang}; }
  bool operator==(const TranslationTask&) const = default;
};

struct CorpusReport {
  int loaded_count = 0;
  std::vector<std::pair<std::string, std::string>> rejected;  // (task_id, reason)
  std::vector<std::string> manifest_issues;  // integrity notes, not scan rejections
};

// Loads every well-formed task under root/dataset/direction, sorted by task_id.
// Malformed tasks land in the report; they are never silently dropped.
// Throws NotFoundError when the corpus root does not exist.
std::pair<std::vector<TranslationTask>, CorpusReport> load_corpus(
    const std::filesystem::path& root, const std::string& dataset_id,
    const Direction& direction);

// Empty result means the task satisfies all invariants.
std::vector<std::string> validate_task(const TranslationTask& task);

// Writes a task back into the corpus layout (fixtures, round-trip checks).
void write_task(const std::filesystem::path& root, const TranslationTask& task);

std::string source_file_name(Lang lang);  // "source.py" / "source.java"

}  // namespace xlate
