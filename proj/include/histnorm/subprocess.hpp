#pragma once

// Line-oriented JSON conversation with a child process over its stdin/stdout.

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace histnorm {

class Subprocess {
 public:
  // Runs `command` through /bin/sh -c; stderr is inherited.
  explicit Subprocess(const std::string& command);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Both throw ProcessUnavailable when the child is gone, TimeoutError on timeout.
  void write_line(std::string_view line);
  std::string read_line(std::chrono::milliseconds timeout);

  void terminate();

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

enum class PeerRole { kGenerator, kScorer };

// Request/response channel with sequential ids. Errors are reported with the
// exception types matching the peer role.
class NdjsonChannel {
 public:
  NdjsonChannel(const std::string& command, PeerRole role, std::chrono::milliseconds timeout);

  // Sends {"id":N, ...body} and returns the reply after checking its id.
  nlohmann::json request(nlohmann::json body);

 private:
  [[noreturn]] void unavailable(const std::string& what) const;

  Subprocess process_;
  PeerRole role_;
  std::chrono::milliseconds timeout_;
  int64_t next_id_ = 1;
  bool broken_ = false;
};

}  // namespace histnorm
