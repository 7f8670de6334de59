#include "bsev/smt/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <sstream>

extern char** environ;

namespace bsev::smt {

std::vector<std::string> split_command(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

SolverConfig default_solver() {
  SolverConfig c;
  if (const char* env = std::getenv("BSEV_SOLVER"); env && *env) c.command = split_command(env);
  return c;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Unsat: return "unsat";
    case Verdict::Sat: return "sat";
    case Verdict::Unknown: return "unknown";
    case Verdict::Timeout: return "timeout";
    case Verdict::Error: return "error";
  }
  return "?";
}

namespace {

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (pipe(fd) != 0) throw SolverError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fd[0] >= 0) close(fd[0]);
    fd[0] = -1;
  }
  void close_write() {
    if (fd[1] >= 0) close(fd[1]);
    fd[1] = -1;
  }
};

}  // namespace

SolverResult run_solver(const std::string& script, const SolverConfig& cfg) {
  if (cfg.command.empty()) throw SolverError("empty solver command");
  auto start = std::chrono::steady_clock::now();
  Pipe in, out;

  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, in.fd[0], 0);
  posix_spawn_file_actions_adddup2(&fa, out.fd[1], 1);
  posix_spawn_file_actions_adddup2(&fa, out.fd[1], 2);
  posix_spawn_file_actions_addclose(&fa, in.fd[1]);
  posix_spawn_file_actions_addclose(&fa, out.fd[0]);

  std::vector<char*> argv;
  for (const auto& a : cfg.command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0) throw SolverError("solver '" + cfg.command[0] + "' not found or not executable: " + std::strerror(rc));
  in.close_read();
  out.close_write();

  // The script is small next to the pipe buffer, but interleave anyway so
  // a chatty solver cannot deadlock us.
  fcntl(in.fd[1], F_SETFL, O_NONBLOCK);
  std::size_t written = 0;
  std::string output;
  bool timed_out = false;
  auto deadline = start + std::chrono::duration<double>(cfg.timeout_s);
  signal(SIGPIPE, SIG_IGN);
  while (true) {
    if (written == script.size()) in.close_write();
    pollfd fds[2];
    int n = 0;
    fds[n++] = {out.fd[0], POLLIN, 0};
    if (in.fd[1] >= 0) fds[n++] = {in.fd[1], POLLOUT, 0};
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    if (poll(fds, n, static_cast<int>(left)) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = write(in.fd[1], script.data() + written, script.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      else if (w < 0 && errno != EAGAIN) written = script.size();
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[4096];
      ssize_t r = read(out.fd[0], buf, sizeof buf);
      if (r > 0) output.append(buf, static_cast<std::size_t>(r));
      else if (r == 0) break;
    }
  }
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);

  SolverResult res;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (timed_out) {
    res.verdict = Verdict::Timeout;
    return res;
  }
  auto nl = output.find('\n');
  std::string first = output.substr(0, nl);
  while (!first.empty() && std::isspace(static_cast<unsigned char>(first.back()))) first.pop_back();
  if (nl != std::string::npos) res.model = output.substr(nl + 1);
  if (first == "unsat") res.verdict = Verdict::Unsat;
  else if (first == "sat") res.verdict = Verdict::Sat;
  else if (first == "unknown") res.verdict = Verdict::Unknown;
  else {
    res.verdict = Verdict::Error;
    res.message = output.empty() ? "solver exited with status " + std::to_string(WEXITSTATUS(status)) : output;
  }
  return res;
}

}  // namespace bsev::smt
