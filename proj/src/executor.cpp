#include "xlate/executor.hpp"

#include <unistd.h>

#include <atomic>
#include <cstring>
#include <regex>

#include "xlate/errors.hpp"
#include "xlate/subprocess.hpp"
#include "xlate/util.hpp"

namespace fs = std::filesystem;

namespace xlate {

namespace {

std::atomic<unsigned> g_ws_counter{0};

fs::path fresh_workspace_dir(const fs::path& base) {
  fs::create_directories(base);
  unsigned seq = g_ws_counter.fetch_add(1);
  fs::path dir = base / ("ws-" + std::to_string(::getpid()) + "-" + std::to_string(seq));
  fs::create_directories(dir);
  return dir;
}

struct JavaEntry {
  std::string type_name;
  std::string package;
  bool found = false;
};

JavaEntry scan_java_entry(const std::string& code) {
  JavaEntry entry;
  static const std::regex kPackage(R"(^\s*package\s+([\w.]+)\s*;)",
                                   std::regex::ECMAScript | std::regex::multiline);
  static const std::regex kPublicType(
      R"(\bpublic\s+(?:final\s+|abstract\s+|strictfp\s+)*(?:class|interface|enum|record)\s+([A-Za-z_$][\w$]*))");
  static const std::regex kAnyType(
      R"(\b(?:class|interface|enum|record)\s+([A-Za-z_$][\w$]*))");

  std::smatch m;
  if (std::regex_search(code, m, kPackage)) entry.package = m[1];
  if (std::regex_search(code, m, kPublicType)) {
    entry.type_name = m[1];
    entry.found = true;
  } else if (std::regex_search(code, m, kAnyType)) {
    entry.type_name = m[1];
    entry.found = true;
  }
  return entry;
}

std::string combined_output(const ProcessResult& pr) {
  std::string out = pr.stderr_bytes;
  if (!pr.stdout_bytes.empty()) {
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += pr.stdout_bytes;
  }
  return out;
}

// Interpreters print the absolute script path in diagnostics; the workspace
// directory is per-evaluation noise, so records would never be reproducible
// with it left in.
std::string scrub_workspace_path(std::string text, const Workspace& ws) {
  text = replace_all(std::move(text), ws.dir.string() + "/", "");
  return replace_all(std::move(text), ws.dir.string(), ".");
}

void throw_if_spawn_failed(const ProcessResult& pr, const std::string& what) {
  if (pr.spawn_errno != 0) {
    throw EnvironmentError(what + ": " + std::strerror(pr.spawn_errno));
  }
}

std::vector<std::string> run_command_argv(const Workspace& ws,
                                          const ResourceLimits& limits,
                                          const Toolchain& tools) {
  if (ws.lang == Lang::Python) {
    return {tools.python, ws.entry_file};
  }
  long mx_mb = limits.memory_limit_bytes > 0 ? limits.memory_limit_bytes >> 20 : 0;
  std::vector<std::string> argv = {tools.java_runtime};
  if (mx_mb > 0) argv.push_back("-Xmx" + std::to_string(mx_mb) + "m");
  argv.push_back("-cp");
  argv.push_back(".");
  argv.push_back(ws.main_class);
  return argv;
}

}  // namespace

Workspace::Workspace(Workspace&& other) noexcept { *this = std::move(other); }

Workspace& Workspace::operator=(Workspace&& other) noexcept {
  if (this != &other) {
    if (!released_ && !dir.empty()) remove_dir();
    dir = std::move(other.dir);
    entry_file = std::move(other.entry_file);
    lang = other.lang;
    cleanup_policy = other.cleanup_policy;
    main_class = std::move(other.main_class);
    malformed_reason = std::move(other.malformed_reason);
    released_ = other.released_;
    other.released_ = true;
    other.dir.clear();
  }
  return *this;
}

Workspace::~Workspace() {
  if (!released_ && !dir.empty()) remove_dir();
}

void Workspace::finish(bool failed) {
  if (released_ || dir.empty()) return;
  if (cleanup_policy == CleanupPolicy::KeepOnFailure && failed) {
    released_ = true;  // leave the directory for inspection
    return;
  }
  remove_dir();
  released_ = true;
}

void Workspace::remove_dir() noexcept {
  std::error_code ec;
  fs::remove_all(dir, ec);
}

Workspace prepare_workspace(const std::string& code, Lang lang, const fs::path& base,
                            CleanupPolicy policy) {
  Workspace ws;
  ws.lang = lang;
  ws.cleanup_policy = policy;
  ws.dir = fresh_workspace_dir(base);

  if (lang == Lang::Python) {
    ws.entry_file = "main.py";
    write_file(ws.dir / ws.entry_file, code);
    return ws;
  }

  JavaEntry entry = scan_java_entry(code);
  if (entry.found) {
    ws.entry_file = entry.type_name + ".java";
    ws.main_class = entry.package.empty() ? entry.type_name
                                          : entry.package + "." + entry.type_name;
  } else {
    ws.entry_file = "Main.java";
    ws.main_class = "Main";
    ws.malformed_reason = "no class declaration found in generated Java code";
  }
  write_file(ws.dir / ws.entry_file, code);
  return ws;
}

CompileResult compile(const Workspace& ws, const ResourceLimits& limits,
                      const Toolchain& tools) {
  CompileResult result;
  if (!ws.malformed_reason.empty()) {
    result.ok = false;
    result.diagnostics = ws.malformed_reason;
    return result;
  }

  ProcessSpec spec;
  spec.cwd = ws.dir;
  spec.timeout_ms = limits.compile_timeout_ms;
  if (ws.lang == Lang::Python) {
    spec.argv = {tools.python, "-m", "py_compile", ws.entry_file};
  } else {
    spec.argv = {tools.java_compiler, "-d", ".", ws.entry_file};
  }
  ProcessResult pr = run_process(spec);
  throw_if_spawn_failed(pr, "cannot launch compiler '" + spec.argv[0] + "'");
  result.duration_ms = pr.duration_ms;
  if (pr.timed_out) {
    result.ok = false;
    result.diagnostics = "compile timeout";
    return result;
  }
  result.ok = pr.exited_ok();
  result.diagnostics = scrub_workspace_path(combined_output(pr), ws);
  return result;
}

RunResult run_test(const Workspace& ws, const TestCase& test,
                   const ResourceLimits& limits, const Toolchain& tools) {
  ProcessSpec spec;
  spec.cwd = ws.dir;
  spec.argv = run_command_argv(ws, limits, tools);
  spec.stdin_bytes = test.stdin_payload;
  spec.timeout_ms = limits.run_timeout_ms;
  // RLIMIT_AS breaks the JVM's address-space reservation; Java gets -Xmx instead.
  if (ws.lang == Lang::Python) spec.memory_limit_bytes = limits.memory_limit_bytes;

  ProcessResult pr = run_process(spec);
  throw_if_spawn_failed(pr, "cannot launch runtime '" + spec.argv[0] + "'");

  RunResult result;
  result.test_index = test.index;
  result.timed_out = pr.timed_out;
  result.exit_ok = pr.exited_ok();
  result.stdout_bytes = std::move(pr.stdout_bytes);
  result.stderr_bytes = scrub_workspace_path(std::move(pr.stderr_bytes), ws);
  result.duration_ms = pr.duration_ms;
  result.output_matched = compare_output(result.stdout_bytes, test.expected_stdout);
  return result;
}

std::string normalize_output(const std::string& bytes) {
  std::string out;
  out.reserve(bytes.size());
  size_t pos = 0;
  while (pos <= bytes.size()) {
    size_t nl = bytes.find('\n', pos);
    std::string_view line(bytes.data() + pos,
                          (nl == std::string::npos ? bytes.size() : nl) - pos);
    // Trailing whitespace (including CR from CRLF) is stripped per line.
    size_t end = line.size();
    while (end > 0 && (line[end - 1] == ' ' || line[end - 1] == '\t' ||
                       line[end - 1] == '\r')) {
      --end;
    }
    out.append(line.substr(0, end));
    if (nl == std::string::npos) break;
    out.push_back('\n');
    pos = nl + 1;
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

bool compare_output(const std::string& actual, const std::string& expected) {
  return normalize_output(actual) == normalize_output(expected);
}

ExecutionOutcome evaluate(const std::string& code, Lang lang,
                          const std::vector<TestCase>& tests,
                          const ResourceLimits& limits, const Toolchain& tools,
                          const fs::path& workdir_base, CleanupPolicy policy) {
  ExecutionOutcome outcome;
  Workspace ws = prepare_workspace(code, lang, workdir_base, policy);

  outcome.compile = compile(ws, limits, tools);
  if (!outcome.compile.ok) {
    outcome.verdict = Verdict::CompileError;
    outcome.primary_diagnostic = outcome.compile.diagnostics;
    ws.finish(/*failed=*/true);
    return outcome;
  }

  bool any_mismatch = false;
  for (const TestCase& test : tests) {
    RunResult run = run_test(ws, test, limits, tools);
    bool crashed = !run.timed_out && !run.exit_ok;
    bool timed_out = run.timed_out;
    bool mismatched = !run.output_matched;
    outcome.runs.push_back(std::move(run));
    const RunResult& r = outcome.runs.back();

    if (timed_out) {
      outcome.verdict = Verdict::Timeout;
      outcome.first_failure_test = r.test_index;
      outcome.primary_diagnostic = r.stderr_bytes;
      ws.finish(true);
      return outcome;
    }
    if (crashed) {
      outcome.verdict = Verdict::RuntimeError;
      outcome.first_failure_test = r.test_index;
      outcome.primary_diagnostic = r.stderr_bytes;
      ws.finish(true);
      return outcome;
    }
    if (mismatched && !any_mismatch) {
      any_mismatch = true;
      outcome.first_failure_test = r.test_index;
    }
  }

  outcome.verdict = any_mismatch ? Verdict::TestFailure : Verdict::Correct;
  ws.finish(outcome.verdict != Verdict::Correct);
  return outcome;
}

void require_toolchain(Lang lang, const Toolchain& tools) {
  if (lang == Lang::Python) {
    if (!binary_on_path(tools.python)) {
      throw EnvironmentError("python interpreter '" + tools.python + "' not on PATH");
    }
    return;
  }
  if (!binary_on_path(tools.java_compiler)) {
    throw EnvironmentError("java compiler '" + tools.java_compiler + "' not on PATH");
  }
  if (!binary_on_path(tools.java_runtime)) {
    throw EnvironmentError("java runtime '" + tools.java_runtime + "' not on PATH");
  }
}

std::string toolchain_version(Lang lang, const Toolchain& tools) {
  ProcessSpec spec;
  spec.timeout_ms = 10'000;
  if (lang == Lang::Python) {
    spec.argv = {tools.python, "--version"};
  } else {
    spec.argv = {tools.java_compiler, "-version"};
  }
  ProcessResult pr = run_process(spec);
  if (pr.spawn_errno != 0) return "";
  std::string banner = combined_output(pr);
  std::vector<std::string> lines = split_lines(banner);
  return lines.empty() ? "" : std::string(trim(lines.front()));
}

}  // namespace xlate
