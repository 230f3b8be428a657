#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "compsim/compressor.hpp"
#include "compsim/errors.hpp"

namespace compsim {

namespace {

// A dying child must not kill us with SIGPIPE mid-write.
void ignore_sigpipe_once() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

SubprocessCompressor::SubprocessCompressor(CompressorId id,
                                           std::vector<std::string> argv,
                                           std::size_t window)
    : id_(std::move(id)), argv_(std::move(argv)), window_(window) {
  if (argv_.empty())
    throw DataError("subprocess backend '" + id_.name + "' has empty command");
}

std::string SubprocessCompressor::settings() const {
  std::string s = "command=";
  for (std::size_t i = 0; i < argv_.size(); ++i) {
    if (i) s += ' ';
    s += argv_[i];
  }
  return s;
}

std::uint64_t SubprocessCompressor::compressed_size(
    std::span<const std::uint8_t> data) const {
  ignore_sigpipe_once();

  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw BackendError(id_.name, "pipe() failed");

  pid_t pid = fork();
  if (pid < 0) throw BackendError(id_.name, "fork() failed");

  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv_) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);

  std::thread writer([&] {
    std::size_t written = 0;
    while (written < data.size()) {
      ssize_t n = write(in_pipe[1], data.data() + written, data.size() - written);
      if (n <= 0) break;  // EPIPE: child stopped reading
      written += static_cast<std::size_t>(n);
    }
    close(in_pipe[1]);
  });

  std::uint64_t total = 0;
  std::uint8_t buf[1 << 16];
  while (true) {
    ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    total += static_cast<std::uint64_t>(n);
  }
  close(out_pipe[0]);
  writer.join();

  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw BackendError(id_.name, "command '" + argv_[0] + "' failed (status " +
                                     std::to_string(code) + ")");
  }
  return total;
}

}  // namespace compsim
