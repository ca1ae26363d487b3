#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "xlate/errors.hpp"
#include "xlate/labeling.hpp"
#include "xlate/taxonomy.hpp"
#include "xlate/util.hpp"

using namespace xlate;

namespace {

const Codebook& book() {
  static const Codebook instance = Codebook::builtin();
  return instance;
}

Subtype compile_subtype(const std::string& text, Lang lang) {
  return classify_compile(book(), text, lang).subtype;
}

struct GoldenCase {
  Stage stage;
  Lang lang;
  Subtype expected;
  std::string text;
};

std::vector<GoldenCase> load_golden() {
  std::string raw = read_file(std::string(XLATE_FIXTURES_DIR) +
                              "/golden_diagnostics.tsv");
  std::vector<GoldenCase> cases;
  for (const std::string& line : split_lines(raw)) {
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
      size_t tab = line.find('\t', pos);
      REQUIRE(tab != std::string::npos);
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    fields.push_back(line.substr(pos));
    GoldenCase g;
    g.stage = fields[0] == "compile" ? Stage::Compile : Stage::Runtime;
    auto lang = lang_from_key(fields[1]);
    auto subtype = subtype_from_key(fields[2]);
    REQUIRE(lang.has_value());
    REQUIRE(subtype.has_value());
    g.lang = *lang;
    g.expected = *subtype;
    g.text = replace_all(fields[3], "\\n", "\n");
    cases.push_back(std::move(g));
  }
  return cases;
}

}  // namespace

TEST_CASE("builtin codebook parses with a version and a compile catch-all") {
  CHECK(book().version() == "1.0.0");
  CHECK(book().rules().size() > 30);
  const CodebookRule& last_compile = *[&] {
    const CodebookRule* found = nullptr;
    for (const CodebookRule& r : book().rules()) {
      if (r.stage == Stage::Compile) found = &r;
    }
    return found;
  }();
  CHECK(last_compile.subtype == Subtype::CE7);
  CHECK_FALSE(last_compile.lang.has_value());
}

TEST_CASE("compile classification spec examples") {
  CHECK(compile_subtype("error: package foo does not exist", Lang::Java) == Subtype::CE1);
  CHECK(compile_subtype("error: illegal character: '\\u2014'", Lang::Java) == Subtype::CE2);
  CHECK(compile_subtype("SyntaxError: unexpected EOF while parsing", Lang::Python) ==
        Subtype::CE3);
  CHECK(compile_subtype("error: class, interface, or enum expected", Lang::Java) ==
        Subtype::CE4);
  CHECK(compile_subtype("incompatible types: String cannot be converted to int",
                        Lang::Java) == Subtype::CE5);
  CHECK(compile_subtype("error: integer number too large", Lang::Java) == Subtype::CE6);
  CHECK(compile_subtype("some diagnostic nothing matches", Lang::Java) == Subtype::CE7);
}

TEST_CASE("runtime classification spec examples") {
  auto runtime = [&](const std::string& text, Lang lang) {
    LabelResult r = classify_runtime(book(), text, lang);
    REQUIRE(r.classified);
    return r.label.subtype;
  };
  CHECK(runtime("ModuleNotFoundError: No module named 'x'", Lang::Python) == Subtype::RE1);
  CHECK(runtime("ValueError: invalid literal for int() with base 10: 'x'",
                Lang::Python) == Subtype::RE2);
  CHECK(runtime("IndexError: list index out of range", Lang::Python) == Subtype::RE3);
  CHECK(runtime("Exception in thread \"main\" java.lang.NullPointerException",
                Lang::Java) == Subtype::RE4);
  CHECK(runtime("NameError: name 'x' is not defined", Lang::Python) == Subtype::RE4);
  CHECK(runtime("Exception in thread \"main\" java.lang.ArithmeticException: / by zero",
                Lang::Java) == Subtype::RE5);
  CHECK(runtime("Exception in thread \"main\" java.lang.StackOverflowError",
                Lang::Java) == Subtype::RE6);
  CHECK(runtime("RecursionError: maximum recursion depth exceeded", Lang::Python) ==
        Subtype::RE6);
  // Scanner exhaustion is input handling, not a reference problem.
  CHECK(runtime("Exception in thread \"main\" java.util.NoSuchElementException",
                Lang::Java) == Subtype::RE2);
}

TEST_CASE("unmatched runtime traces: reference-shaped goes to RE4, rest unclassified") {
  LabelResult shaped = classify_runtime(
      book(), "FancyFault: variable frobnicator is undefined here", Lang::Python);
  REQUIRE(shaped.classified);
  CHECK(shaped.label.subtype == Subtype::RE4);
  CHECK(shaped.label.matched_rule_id == "re-ref-shaped");

  LabelResult garbage = classify_runtime(book(), "kernel panicked politely", Lang::Java);
  CHECK_FALSE(garbage.classified);
  CHECK(garbage.evidence == "kernel panicked politely");
}

TEST_CASE("multi-error compile output classifies from the first error line") {
  std::string diagnostics =
      "Main.java:3: error: ';' expected\n"
      "        int x = 1\n"
      "                 ^\n"
      "Main.java:9: error: incompatible types: String cannot be converted to int\n"
      "2 errors\n";
  FailureLabel label = classify_compile(book(), diagnostics, Lang::Java);
  CHECK(label.subtype == Subtype::CE3);
  CHECK(label.evidence == "Main.java:3: error: ';' expected");
}

TEST_CASE("python runtime evidence is the last exception line") {
  std::string trace =
      "Traceback (most recent call last):\n"
      "  File \"main.py\", line 7, in <module>\n"
      "    main()\n"
      "ValueError: bad seed\n"
      "\n"
      "During handling of the above exception, another exception occurred:\n"
      "\n"
      "Traceback (most recent call last):\n"
      "  File \"main.py\", line 3, in main\n"
      "KeyError: 'fallback'\n";
  LabelResult r = classify_runtime(book(), trace, Lang::Python);
  REQUIRE(r.classified);
  CHECK(r.label.subtype == Subtype::RE3);
  CHECK(r.label.evidence == "KeyError: 'fallback'");
}

TEST_CASE("golden diagnostic corpus classifies at 100%") {
  std::vector<GoldenCase> cases = load_golden();
  int compile_cases = 0, runtime_cases = 0;
  for (const GoldenCase& g : cases) {
    if (g.stage == Stage::Compile) {
      ++compile_cases;
      FailureLabel label = classify_compile(book(), g.text, g.lang);
      CAPTURE(g.text);
      CHECK(label.subtype == g.expected);
    } else {
      ++runtime_cases;
      LabelResult r = classify_runtime(book(), g.text, g.lang);
      CAPTURE(g.text);
      REQUIRE(r.classified);
      CHECK(r.label.subtype == g.expected);
    }
  }
  CHECK(compile_cases >= 26);
  CHECK(runtime_cases >= 24);
}

TEST_CASE("a silent crash (empty trace) is unclassified, never guessed") {
  ExecutionOutcome outcome;
  outcome.verdict = Verdict::RuntimeError;
  outcome.primary_diagnostic = "";  // e.g. the program exited nonzero quietly
  auto labeled = label_failure(book(), outcome, Lang::Python);
  REQUIRE(labeled.has_value());
  CHECK_FALSE(labeled->classified);
}

TEST_CASE("label_failure maps only the two taxonomy buckets") {
  ExecutionOutcome outcome;
  outcome.verdict = Verdict::CompileError;
  outcome.primary_diagnostic = "Main.java:1: error: package a.b does not exist";
  auto labeled = label_failure(book(), outcome, Lang::Java);
  REQUIRE(labeled.has_value());
  CHECK(labeled->label.stage == Stage::Compile);
  CHECK(labeled->label.subtype == Subtype::CE1);

  outcome.verdict = Verdict::TestFailure;
  CHECK_FALSE(label_failure(book(), outcome, Lang::Java).has_value());
  outcome.verdict = Verdict::Timeout;
  CHECK_FALSE(label_failure(book(), outcome, Lang::Java).has_value());
  outcome.verdict = Verdict::Correct;
  CHECK_FALSE(label_failure(book(), outcome, Lang::Java).has_value());
}

TEST_CASE("stage/lang/subtype consistency is enforced at parse time") {
  CHECK_THROWS_AS(Codebook::parse("# version: 1\nbad\truntime\tjava\tCE1\tx\t"),
                  ConfigError);
  CHECK_THROWS_AS(Codebook::parse("# version: 1\nbad\tcompile\tjava\tCE1\t(\t"),
                  ConfigError);
  CHECK_THROWS_AS(Codebook::parse("no version header\n"), ConfigError);
}

TEST_CASE("shipped codebook file matches the built-in text") {
  std::string shipped = read_file(std::string(XLATE_FIXTURES_DIR) +
                                  "/../../data/codebook.tsv");
  CHECK(shipped == builtin_codebook_text());
}
