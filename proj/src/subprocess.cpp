#include "histnorm/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "histnorm/errors.hpp"

namespace histnorm {

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
    return true;
  }();
  (void)once;
}

}  // namespace

Subprocess::Subprocess(const std::string& command) {
  ignore_sigpipe();
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw ProcessUnavailable(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ProcessUnavailable(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw ProcessUnavailable(std::string("fork: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    // Own process group, so the shell and anything it spawns die together.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid_, pid_);
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

Subprocess::~Subprocess() { terminate(); }

void Subprocess::terminate() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ <= 0) return;
  // Closing stdin asks well-behaved peers to exit; give them a moment.
  int status = 0;
  for (int i = 0; i < 50; ++i) {
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      kill(-pid_, SIGKILL);  // stragglers left behind by the shell
      pid_ = -1;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  kill(-pid_, SIGKILL);
  waitpid(pid_, &status, 0);
  pid_ = -1;
}

void Subprocess::write_line(std::string_view line) {
  if (to_child_ < 0) throw ProcessUnavailable("process already closed");
  std::string data(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProcessUnavailable(std::string("write to child failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string Subprocess::read_line(std::chrono::milliseconds timeout) {
  if (from_child_ < 0) throw ProcessUnavailable("process already closed");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("no reply within " + std::to_string(timeout.count()) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProcessUnavailable(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProcessUnavailable(std::string("read from child failed: ") + std::strerror(errno));
    }
    if (n == 0) throw ProcessUnavailable("child closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

NdjsonChannel::NdjsonChannel(const std::string& command, PeerRole role, std::chrono::milliseconds timeout)
    : process_(command), role_(role), timeout_(timeout) {}

void NdjsonChannel::unavailable(const std::string& what) const {
  if (role_ == PeerRole::kGenerator) throw GeneratorUnavailable("generator: " + what);
  throw ScorerUnavailable("scorer: " + what);
}

nlohmann::json NdjsonChannel::request(nlohmann::json body) {
  if (broken_) unavailable("channel unusable after an earlier failure");
  const int64_t id = next_id_++;
  body["id"] = id;
  std::string line;
  try {
    process_.write_line(body.dump());
    line = process_.read_line(timeout_);
  } catch (const TimeoutError&) {
    broken_ = true;
    throw;
  } catch (const ProcessUnavailable& e) {
    broken_ = true;
    unavailable(e.what());
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    broken_ = true;
    throw ProtocolError("malformed reply: " + line.substr(0, 200));
  }
  if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer())
    throw ProtocolError("reply without integer id");
  if (reply["id"].get<int64_t>() != id) {
    broken_ = true;
    throw ProtocolError("reply id " + reply["id"].dump() + " does not match request id " + std::to_string(id));
  }
  if (reply.contains("error"))
    throw ProtocolError("peer reported error: " + reply["error"].dump());
  return reply;
}

}  // namespace histnorm
