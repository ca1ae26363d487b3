#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "fixture_helpers.hpp"
#include "xlate/corpus.hpp"
#include "xlate/errors.hpp"
#include "xlate/util.hpp"

using namespace xlate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("xlate-corpus-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const Direction kJavaPython{Lang::Java, Lang::Python};

}  // namespace

TEST_CASE("load_corpus returns tasks sorted and deterministic") {
  TempDir tmp;
  testfix::write_verdict_corpus(tmp.path);

  auto [tasks, report] = load_corpus(tmp.path, "avatar", kJavaPython);
  REQUIRE(tasks.size() == 5);
  CHECK(report.loaded_count == 5);
  CHECK(report.rejected.empty());
  for (size_t i = 1; i < tasks.size(); ++i) {
    CHECK(tasks[i - 1].task_id < tasks[i].task_id);
  }
  CHECK(tasks[0].tests.size() == 2);
  CHECK(tasks[0].tests[0].stdin_payload == "5\n");

  auto [tasks2, report2] = load_corpus(tmp.path, "avatar", kJavaPython);
  CHECK(tasks == tasks2);
}

TEST_CASE("missing root raises, empty split does not") {
  TempDir tmp;
  CHECK_THROWS_AS(load_corpus(tmp.path / "nope", "avatar", kJavaPython), NotFoundError);

  auto [tasks, report] = load_corpus(tmp.path, "avatar", kJavaPython);
  CHECK(tasks.empty());
  CHECK(report.loaded_count == 0);

  // A split directory that exists but holds nothing behaves the same way.
  fs::create_directories(tmp.path / "avatar" / "java-python");
  auto [tasks2, report2] = load_corpus(tmp.path, "avatar", kJavaPython);
  CHECK(tasks2.empty());
  CHECK(report2.loaded_count == 0);
  CHECK(report2.rejected.empty());
}

TEST_CASE("malformed task directories are rejected with reasons") {
  TempDir tmp;
  testfix::write_verdict_corpus(tmp.path);
  fs::path split = tmp.path / "avatar" / "java-python";

  // No tests subdirectory at all.
  write_file(split / "t90" / "source.java", testfix::kJavaSource);
  // Input without matching output.
  write_file(split / "t91" / "source.java", testfix::kJavaSource);
  write_file(split / "t91" / "tests" / "1.in", "1\n");
  write_file(split / "t91" / "tests" / "1.out", "2\n");
  write_file(split / "t91" / "tests" / "2.in", "3\n");
  // Missing source file.
  write_file(split / "t92" / "tests" / "1.in", "1\n");
  write_file(split / "t92" / "tests" / "1.out", "2\n");
  // Empty source.
  write_file(split / "t93" / "source.java", "  \n");
  write_file(split / "t93" / "tests" / "1.in", "1\n");
  write_file(split / "t93" / "tests" / "1.out", "2\n");
  // Indices not starting at 1.
  write_file(split / "t94" / "source.java", testfix::kJavaSource);
  write_file(split / "t94" / "tests" / "2.in", "1\n");
  write_file(split / "t94" / "tests" / "2.out", "2\n");

  auto [tasks, report] = load_corpus(tmp.path, "avatar", kJavaPython);
  CHECK(tasks.size() == 5);
  REQUIRE(report.rejected.size() == 5);
  CHECK(report.loaded_count + static_cast<int>(report.rejected.size()) == 10);

  std::map<std::string, std::string> reasons(report.rejected.begin(),
                                             report.rejected.end());
  CHECK(reasons["t90"] == "no tests");
  CHECK(reasons["t91"] == "unpaired test input 2");
  CHECK(reasons["t92"] == "missing source.java");
  CHECK(reasons["t93"] == "empty source");
  CHECK(reasons["t94"] == "non-consecutive test index 2");
}

TEST_CASE("corpus round-trip preserves every field") {
  TempDir tmp;
  TranslationTask task = testfix::make_task(
      "avatar", "rt1", kJavaPython, testfix::kJavaSource,
      {{1, "a b\r\n", "x\n"}, {2, "", "\x01\x02 raw bytes"}});
  write_task(tmp.path, task);

  auto [tasks, report] = load_corpus(tmp.path, "avatar", kJavaPython);
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0] == task);
}

TEST_CASE("validate_task flags invariant violations") {
  TranslationTask task = testfix::make_task("avatar", "v1", kJavaPython,
                                            testfix::kJavaSource,
                                            testfix::doubling_tests());
  CHECK(validate_task(task).empty());

  TranslationTask empty_source = task;
  empty_source.source_code = "   ";
  auto violations = validate_task(empty_source);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "empty source");

  TranslationTask no_tests = task;
  no_tests.tests.clear();
  CHECK(validate_task(no_tests) == std::vector<std::string>{"no tests"});

  TranslationTask same_lang = task;
  same_lang.target_lang = same_lang.source_lang;
  CHECK(validate_task(same_lang).size() == 1);

  TranslationTask bad_index = task;
  bad_index.tests[1].index = 5;
  CHECK(validate_task(bad_index) ==
        std::vector<std::string>{"non-consecutive test index 5"});
}

TEST_CASE("manifest integrity issues are reported separately") {
  TempDir tmp;
  testfix::write_verdict_corpus(tmp.path);
  write_file(tmp.path / "avatar" / "manifest.json",
             R"({"java-python": ["t01", "t02", "t03", "t04", "t05", "t99"]})");

  auto [tasks, report] = load_corpus(tmp.path, "avatar", kJavaPython);
  CHECK(tasks.size() == 5);
  CHECK(report.rejected.empty());
  REQUIRE(report.manifest_issues.size() == 1);
  CHECK(report.manifest_issues[0] == "listed in manifest but absent: t99");
}
