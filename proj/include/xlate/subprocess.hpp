// POSIX subprocess runner: pipes stdin in, captures stdout/stderr fully,
// enforces a wall-clock deadline and kills the whole process group on expiry.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace xlate {

struct ProcessSpec {
  std::vector<std::string> argv;   // argv[0] resolved via PATH
  std::filesystem::path cwd;       // empty = inherit
  std::string stdin_bytes;
  int timeout_ms = 0;              // 0 = no limit
  long memory_limit_bytes = 0;     // 0 = no limit; applied as RLIMIT_AS
  std::size_t max_capture_bytes = 64u << 20;  // per stream
};

struct ProcessResult {
  int exit_code = -1;      // valid when signal == 0 and !timed_out
  int term_signal = 0;     // nonzero if killed by a signal
  bool timed_out = false;
  int spawn_errno = 0;     // nonzero: exec failed (e.g. ENOENT for missing binary)
  std::string stdout_bytes;
  std::string stderr_bytes;
  long duration_ms = 0;

  bool exited_ok() const {
    return spawn_errno == 0 && !timed_out && term_signal == 0 && exit_code == 0;
  }
};

ProcessResult run_process(const ProcessSpec& spec);

// True if `binary` resolves to an executable via PATH.
bool binary_on_path(const std::string& binary);

}  // namespace xlate
