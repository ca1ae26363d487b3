// Materializes generated code in an isolated workspace, compiles it, runs the
// tests under limits, and produces the verdict with compile-before-runtime
// precedence.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xlate/corpus.hpp"
#include "xlate/types.hpp"

namespace xlate {

struct ResourceLimits {
  int compile_timeout_ms = 60'000;
  int run_timeout_ms = 20'000;
  long memory_limit_bytes = 512L << 20;  // enforced where the runtime allows
};

struct Toolchain {
  std::string python = "python3";
  std::string java_compiler = "javac";
  std::string java_runtime = "java";
};

enum class CleanupPolicy { AlwaysDelete, KeepOnFailure };

struct Workspace {
  std::filesystem::path dir;
  std::string entry_file;
  Lang lang = Lang::Python;
  CleanupPolicy cleanup_policy = CleanupPolicy::AlwaysDelete;
  // Java entry class, package-qualified when the source declares a package.
  std::string main_class;
  // Set when the source could not be materialized in a compilable shape;
  // evaluation short-circuits to CompileError with this synthetic diagnostic.
  std::string malformed_reason;

  Workspace() = default;
  Workspace(Workspace&& other) noexcept;
  Workspace& operator=(Workspace&& other) noexcept;
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace();

  // Deletes the directory now unless the policy says to keep failures.
  void finish(bool failed);

 private:
  bool released_ = false;
  void remove_dir() noexcept;
};

struct CompileResult {
  bool ok = false;
  std::string diagnostics;
  long duration_ms = 0;
};

struct RunResult {
  int test_index = 0;
  bool exit_ok = false;
  bool timed_out = false;
  std::string stdout_bytes;
  std::string stderr_bytes;
  long duration_ms = 0;
  bool output_matched = false;
};

struct ExecutionOutcome {
  Verdict verdict = Verdict::Correct;
  CompileResult compile;
  std::vector<RunResult> runs;
  std::optional<int> first_failure_test;
  std::string primary_diagnostic;
};

// Writes `code` into a fresh directory under `base`. Python entry is always
// main.py; Java uses the first public type name, else the first type name,
// else Main.java with malformed_reason set.
Workspace prepare_workspace(const std::string& code, Lang lang,
                            const std::filesystem::path& base,
                            CleanupPolicy policy = CleanupPolicy::AlwaysDelete);

// javac for Java; the interpreter's syntax/bytecode check for Python.
// A compile that exceeds the limit fails with a synthetic diagnostic.
// Throws EnvironmentError when the toolchain binary is missing.
CompileResult compile(const Workspace& ws, const ResourceLimits& limits,
                      const Toolchain& tools = {});

RunResult run_test(const Workspace& ws, const TestCase& test,
                   const ResourceLimits& limits, const Toolchain& tools = {});

// Byte comparison after normalization: CRLF -> LF, trailing whitespace
// stripped per line, trailing blank lines stripped. Internal whitespace kept.
bool compare_output(const std::string& actual, const std::string& expected);
std::string normalize_output(const std::string& bytes);

// Full pipeline for one program: compile, run tests in index order, stop at
// the first crash or timeout, judge outputs. Compile failure always wins.
ExecutionOutcome evaluate(const std::string& code, Lang lang,
                          const std::vector<TestCase>& tests,
                          const ResourceLimits& limits, const Toolchain& tools,
                          const std::filesystem::path& workdir_base,
                          CleanupPolicy policy = CleanupPolicy::AlwaysDelete);

// Throws EnvironmentError when a toolchain needed for `lang` is absent.
void require_toolchain(Lang lang, const Toolchain& tools);
// Version banner for the manifest, e.g. "Python 3.10.12"; empty if absent.
std::string toolchain_version(Lang lang, const Toolchain& tools);

}  // namespace xlate
