#include "xlate/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace xlate {

namespace {

void set_nonblocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

std::int64_t steady_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

// A child closing its stdin pipe must not kill the harness.
void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

ProcessResult run_process(const ProcessSpec& spec) {
  ignore_sigpipe_once();
  ProcessResult result;

  int in_pipe[2], out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0 ||
      pipe2(exec_pipe, O_CLOEXEC) != 0) {
    result.spawn_errno = errno;
    return result;
  }

  const std::int64_t started = steady_ms();
  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_errno = errno;
    return result;
  }

  if (pid == 0) {
    // Child. Own process group so a timeout kill reaps grandchildren too.
    setsid();
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    close(err_pipe[0]); close(err_pipe[1]);
    close(exec_pipe[0]);

    if (!spec.cwd.empty() && chdir(spec.cwd.c_str()) != 0) {
      int err = errno;
      (void)!write(exec_pipe[1], &err, sizeof err);
      _exit(127);
    }
    if (spec.memory_limit_bytes > 0) {
      rlimit lim{static_cast<rlim_t>(spec.memory_limit_bytes),
                 static_cast<rlim_t>(spec.memory_limit_bytes)};
      setrlimit(RLIMIT_AS, &lim);
    }

    std::vector<char*> argv;
    argv.reserve(spec.argv.size() + 1);
    for (const std::string& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int err = errno;
    (void)!write(exec_pipe[1], &err, sizeof err);
    _exit(127);
  }

  // Parent.
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  int exec_err = 0;
  if (read(exec_pipe[0], &exec_err, sizeof exec_err) == sizeof(int)) {
    result.spawn_errno = exec_err;
  }
  close(exec_pipe[0]);
  if (result.spawn_errno != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(err_pipe[0]);
    waitpid(pid, nullptr, 0);
    result.duration_ms = steady_ms() - started;
    return result;
  }

  set_nonblocking(in_pipe[1]);
  set_nonblocking(out_pipe[0]);
  set_nonblocking(err_pipe[0]);

  size_t stdin_written = 0;
  bool stdin_open = true;
  if (spec.stdin_bytes.empty()) {
    close(in_pipe[1]);
    stdin_open = false;
  }
  bool out_open = true, err_open = true;
  const std::int64_t deadline =
      spec.timeout_ms > 0 ? started + spec.timeout_ms : -1;
  bool killed = false;

  char buf[65536];
  while (out_open || err_open) {
    pollfd fds[3];
    int nfds = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_open) { out_idx = nfds; fds[nfds++] = {out_pipe[0], POLLIN, 0}; }
    if (err_open) { err_idx = nfds; fds[nfds++] = {err_pipe[0], POLLIN, 0}; }
    if (stdin_open) { in_idx = nfds; fds[nfds++] = {in_pipe[1], POLLOUT, 0}; }

    int wait_ms = 1000;
    if (deadline >= 0) {
      std::int64_t left = deadline - steady_ms();
      if (left <= 0) {
        if (!killed) {
          kill(-pid, SIGKILL);
          killed = true;
          result.timed_out = true;
        }
        wait_ms = 50;
      } else {
        wait_ms = static_cast<int>(left < 1000 ? left : 1000);
      }
    }

    int rc = poll(fds, static_cast<nfds_t>(nfds), wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }

    auto drain = [&](int fd, std::string& sink, bool& open_flag) {
      while (true) {
        ssize_t n = read(fd, buf, sizeof buf);
        if (n > 0) {
          if (sink.size() < spec.max_capture_bytes) {
            sink.append(buf, static_cast<size_t>(
                                 std::min<size_t>(static_cast<size_t>(n),
                                                  spec.max_capture_bytes - sink.size())));
          }
          continue;
        }
        if (n == 0) {
          close(fd);
          open_flag = false;
        }
        break;  // n < 0: EAGAIN or real error; poll again either way
      }
    };

    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP | POLLERR))) {
      drain(out_pipe[0], result.stdout_bytes, out_open);
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP | POLLERR))) {
      drain(err_pipe[0], result.stderr_bytes, err_open);
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        close(in_pipe[1]);
        stdin_open = false;
      } else {
        ssize_t n = write(in_pipe[1], spec.stdin_bytes.data() + stdin_written,
                          spec.stdin_bytes.size() - stdin_written);
        if (n > 0) stdin_written += static_cast<size_t>(n);
        if (n < 0 && errno != EAGAIN && errno != EINTR) {
          close(in_pipe[1]);
          stdin_open = false;
        }
        if (stdin_written == spec.stdin_bytes.size()) {
          close(in_pipe[1]);
          stdin_open = false;
        }
      }
    }
  }
  if (stdin_open) close(in_pipe[1]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.duration_ms = steady_ms() - started;
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.term_signal = WTERMSIG(status);
  }
  return result;
}

bool binary_on_path(const std::string& binary) {
  if (binary.find('/') != std::string::npos) {
    return access(binary.c_str(), X_OK) == 0;
  }
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string paths(path);
  size_t pos = 0;
  while (pos <= paths.size()) {
    size_t colon = paths.find(':', pos);
    std::string dir = paths.substr(pos, colon == std::string::npos ? std::string::npos
                                                                   : colon - pos);
    if (!dir.empty()) {
      std::string candidate = dir + "/" + binary;
      if (access(candidate.c_str(), X_OK) == 0) return true;
    }
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  return false;
}

}  // namespace xlate
