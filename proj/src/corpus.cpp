#include "xlate/corpus.hpp"

#include <algorithm>
#include <set>

#include "nlohmann/json.hpp"
#include "xlate/errors.hpp"
#include "xlate/util.hpp"

namespace fs = std::filesystem;

namespace xlate {

namespace {

// Returns the task or a rejection reason.
std::pair<TranslationTask, std::string> load_task_dir(const fs::path& dir,
                                                      const std::string& dataset_id,
                                                      const Direction& direction) {
  TranslationTask task;
  task.task_id = dir.filename().string();
  task.dataset_id = dataset_id;
  task.source_lang = direction.source;
  task.target_lang = direction.target;

  fs::path source = dir / source_file_name(direction.source);
  std::error_code ec;
  if (!fs::exists(source, ec)) {
    return {task, "missing " + source_file_name(direction.source)};
  }
  try {
    task.source_code = read_file(source);
  } catch (const IoError& e) {
    return {task, std::string("unreadable source: ") + e.what()};
  }
  if (trim(task.source_code).empty()) {
    return {task, "empty source"};
  }

  fs::path tests_dir = dir / "tests";
  if (!fs::is_directory(tests_dir, ec)) {
    return {task, "no tests"};
  }
  std::set<int> in_indices, out_indices;
  for (const auto& entry : fs::directory_iterator(tests_dir)) {
    const fs::path& p = entry.path();
    std::string stem = p.stem().string();
    std::string ext = p.extension().string();
    if (ext != ".in" && ext != ".out") continue;
    int idx = 0;
    try {
      size_t consumed = 0;
      idx = std::stoi(stem, &consumed);
      if (consumed != stem.size() || idx < 1) continue;
    } catch (...) {
      continue;
    }
    (ext == ".in" ? in_indices : out_indices).insert(idx);
  }
  if (in_indices.empty()) {
    return {task, "no tests"};
  }
  for (int idx : in_indices) {
    if (!out_indices.count(idx)) {
      return {task, "unpaired test input " + std::to_string(idx)};
    }
  }
  for (int idx : out_indices) {
    if (!in_indices.count(idx)) {
      return {task, "unpaired test output " + std::to_string(idx)};
    }
  }
  int expect = 1;
  for (int idx : in_indices) {
    if (idx != expect) {
      return {task, "non-consecutive test index " + std::to_string(idx)};
    }
    ++expect;
  }

  for (int idx : in_indices) {
    TestCase tc;
    tc.index = idx;
    try {
      tc.stdin_payload = read_file(tests_dir / (std::to_string(idx) + ".in"));
      tc.expected_stdout = read_file(tests_dir / (std::to_string(idx) + ".out"));
    } catch (const IoError& e) {
      return {task, std::string("unreadable test ") + std::to_string(idx) + ": " + e.what()};
    }
    task.tests.push_back(std::move(tc));
  }
  return {task, ""};
}

}  // namespace

std::string source_file_name(Lang lang) {
  return lang == Lang::Python ? "source.py" : "source.java";
}

std::pair<std::vector<TranslationTask>, CorpusReport> load_corpus(
    const fs::path& root, const std::string& dataset_id, const Direction& direction) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw NotFoundError("corpus root not found: " + root.string());
  }
  fs::path split = root / dataset_id / direction_key(direction);
  std::vector<TranslationTask> tasks;
  CorpusReport report;
  if (!fs::is_directory(split, ec)) {
    // Dataset or direction absent: an empty split, not a fault.
    return {tasks, report};
  }

  std::vector<fs::path> task_dirs;
  for (const auto& entry : fs::directory_iterator(split)) {
    if (entry.is_directory()) task_dirs.push_back(entry.path());
  }
  std::sort(task_dirs.begin(), task_dirs.end());

  for (const fs::path& dir : task_dirs) {
    auto [task, reason] = load_task_dir(dir, dataset_id, direction);
    if (reason.empty()) {
      tasks.push_back(std::move(task));
      ++report.loaded_count;
    } else {
      report.rejected.emplace_back(task.task_id, reason);
    }
  }

  // Optional dataset manifest lists expected task ids per direction.
  fs::path manifest = root / dataset_id / "manifest.json";
  if (fs::exists(manifest, ec)) {
    try {
      auto doc = nlohmann::json::parse(read_file(manifest));
      auto it = doc.find(direction_key(direction));
      if (it != doc.end() && it->is_array()) {
        std::set<std::string> listed;
        for (const auto& id : *it) listed.insert(id.get<std::string>());
        std::set<std::string> present;
        for (const auto& t : tasks) present.insert(t.task_id);
        for (const auto& [id, reason] : report.rejected) present.insert(id);
        for (const auto& id : listed) {
          if (!present.count(id)) {
            report.manifest_issues.push_back("listed in manifest but absent: " + id);
          }
        }
        for (const auto& id : present) {
          if (!listed.count(id)) {
            report.manifest_issues.push_back("on disk but not in manifest: " + id);
          }
        }
      }
    } catch (const std::exception& e) {
      report.manifest_issues.push_back(std::string("unreadable manifest: ") + e.what());
    }
  }
  return {tasks, report};
}

std::vector<std::string> validate_task(const TranslationTask& task) {
  std::vector<std::string> violations;
  if (task.task_id.empty()) violations.push_back("empty task_id");
  if (task.source_lang == task.target_lang) {
    violations.push_back("source and target language are the same");
  }
  if (trim(task.source_code).empty()) violations.push_back("empty source");
  if (task.tests.empty()) {
    violations.push_back("no tests");
  } else {
    int expect = 1;
    for (const TestCase& tc : task.tests) {
      if (tc.index != expect) {
        violations.push_back("non-consecutive test index " + std::to_string(tc.index));
        break;
      }
      ++expect;
    }
  }
  return violations;
}

void write_task(const fs::path& root, const TranslationTask& task) {
  fs::path dir = root / task.dataset_id / direction_key(task.direction()) / task.task_id;
  write_file(dir / source_file_name(task.source_lang), task.source_code);
  for (const TestCase& tc : task.tests) {
    write_file(dir / "tests" / (std::to_string(tc.index) + ".in"), tc.stdin_payload);
    write_file(dir / "tests" / (std::to_string(tc.index) + ".out"), tc.expected_stdout);
  }
}

}  // namespace xlate
