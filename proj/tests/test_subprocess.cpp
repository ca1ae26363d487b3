#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cerrno>

#include "xlate/subprocess.hpp"

using namespace xlate;

TEST_CASE("stdin is piped through and stdout captured") {
  ProcessSpec spec;
  spec.argv = {"python3", "-c", "import sys; sys.stdout.write(sys.stdin.read())"};
  spec.stdin_bytes = "5\n";
  ProcessResult r = run_process(spec);
  CHECK(r.spawn_errno == 0);
  CHECK(r.exited_ok());
  CHECK(r.stdout_bytes == "5\n");
}

TEST_CASE("large stdin does not deadlock against large stdout") {
  std::string blob(1 << 20, 'x');
  ProcessSpec spec;
  spec.argv = {"python3", "-c", "import sys; sys.stdout.write(sys.stdin.read())"};
  spec.stdin_bytes = blob;
  spec.timeout_ms = 30'000;
  ProcessResult r = run_process(spec);
  CHECK(r.exited_ok());
  CHECK(r.stdout_bytes.size() == blob.size());
}

TEST_CASE("nonzero exit and stderr capture") {
  ProcessSpec spec;
  spec.argv = {"python3", "-c", "import sys; sys.stderr.write('boom\\n'); sys.exit(3)"};
  ProcessResult r = run_process(spec);
  CHECK_FALSE(r.exited_ok());
  CHECK(r.exit_code == 3);
  CHECK(r.stderr_bytes == "boom\n");
}

TEST_CASE("wall-clock timeout kills the process group") {
  ProcessSpec spec;
  spec.argv = {"python3", "-c", "while True: pass"};
  spec.timeout_ms = 1000;
  ProcessResult r = run_process(spec);
  CHECK(r.timed_out);
  CHECK_FALSE(r.exited_ok());
  // Reaped promptly after the kill, not after a full scheduler round.
  CHECK(r.duration_ms < 5000);
}

TEST_CASE("missing binary reports spawn errno") {
  ProcessSpec spec;
  spec.argv = {"definitely-not-a-binary-xyz"};
  ProcessResult r = run_process(spec);
  CHECK(r.spawn_errno == ENOENT);
}

TEST_CASE("binary_on_path") {
  CHECK(binary_on_path("python3"));
  CHECK_FALSE(binary_on_path("definitely-not-a-binary-xyz"));
}

TEST_CASE("child closing stdin early is not fatal") {
  ProcessSpec spec;
  spec.argv = {"python3", "-c", "print('done')"};
  spec.stdin_bytes = std::string(1 << 20, 'y');  // never read by the child
  ProcessResult r = run_process(spec);
  CHECK(r.exited_ok());
  CHECK(r.stdout_bytes == "done\n");
}
