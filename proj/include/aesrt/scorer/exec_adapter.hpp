// Copyright 2026 The aesrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Line transport: a long-lived child process reads one request per line on
// stdin and writes one reply per line on stdout, in any order.

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <cstring>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "aesrt/error.hpp"
#include "aesrt/scorer/adapter.hpp"

namespace aesrt {

class ExecAdapter final : public ScorerAdapter {
 public:
  /// Spawns `/bin/sh -c command`.
  ExecAdapter(std::string command, AdapterOptions options = {})
      : command_(std::move(command)), options_(options), gate_(options.max_in_flight) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
      throw ScorerError(std::string("socketpair failed: ") + std::strerror(errno));
    const pid_t pid = ::fork();
    if (pid < 0) {
      ::close(sv[0]);
      ::close(sv[1]);
      throw ScorerError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      ::dup2(sv[1], STDIN_FILENO);
      ::dup2(sv[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(sv[1]);
    fd_ = sv[0];
    pid_ = pid;
    reader_ = std::thread([this] { read_loop(); });
  }

  ExecAdapter(const ExecAdapter&) = delete;
  ExecAdapter& operator=(const ExecAdapter&) = delete;

  ~ExecAdapter() override {
    ::shutdown(fd_, SHUT_WR);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    int status = 0;
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
      if (std::chrono::steady_clock::now() > deadline) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::shutdown(fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    ::close(fd_);
  }

  BatchResult score_batch(std::span<const ScoreRequest> requests) override {
    BatchResult out;
    if (requests.empty()) return out;
    std::vector<const ScoreRequest*> accepted;
    out.failures = screen_requests(requests, accepted);

    gate_.acquire();
    Batch batch;
    std::vector<const ScoreRequest*> to_send;
    {
      std::lock_guard lock(mu_);
      for (const auto* r : accepted) {
        if (dead_) {
          out.failures.push_back({r->id, "scorer process exited"});
        } else if (pending_.count(r->id)) {
          out.failures.push_back({r->id, "request id already in flight"});
        } else {
          pending_.emplace(r->id, &batch);
          ++batch.remaining;
          to_send.push_back(r);
        }
      }
    }

    std::string payload;
    for (const auto* r : to_send) {
      payload += request_to_json(*r).dump();
      payload += '\n';
    }
    const bool sent = write_all(payload);

    {
      std::unique_lock lock(mu_);
      if (!sent) dead_ = true;
      const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
      batch.cv.wait_until(lock, deadline, [&] { return batch.remaining == 0 || dead_; });
      for (const auto* r : to_send) {
        auto it = pending_.find(r->id);
        if (it == pending_.end() || it->second != &batch) continue;
        pending_.erase(it);
        batch.failures.push_back({r->id, dead_ ? "scorer process exited" : "timeout"});
      }
      out.replies = std::move(batch.replies);
      out.failures.insert(out.failures.end(), batch.failures.begin(), batch.failures.end());
    }
    gate_.release();
    return out;
  }

  std::string describe() const override { return "exec:" + command_; }

  /// Reply lines that carried no usable id.
  std::size_t garbage_lines() const noexcept { return garbage_.load(); }

  /// Well-formed replies whose id was not awaited (late or unknown).
  std::size_t unmatched_replies() const noexcept { return unmatched_.load(); }

 private:
  struct Batch {
    std::condition_variable cv;
    std::size_t remaining = 0;
    std::vector<ScoreReply> replies;
    std::vector<ScoreFailure> failures;
  };

  bool write_all(std::string_view data) {
    std::lock_guard lock(write_mu_);
    while (!data.empty()) {
      const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

  void read_loop() {
    std::string buffer;
    char chunk[8192];
    for (;;) {
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        handle_line(std::string_view(buffer).substr(0, nl));
        buffer.erase(0, nl + 1);
      }
    }
    std::lock_guard lock(mu_);
    dead_ = true;
    for (auto& [id, batch] : pending_) {
      batch->failures.push_back({id, "scorer process exited"});
      --batch->remaining;
      batch->cv.notify_all();
    }
    pending_.clear();
  }

  void handle_line(std::string_view line) {
    if (trim(line).empty()) return;
    const ParsedReply p = parse_reply_line(line);
    if (!p.id) {
      ++garbage_;
      return;
    }
    std::lock_guard lock(mu_);
    auto it = pending_.find(*p.id);
    if (it == pending_.end()) {
      ++unmatched_;
      return;
    }
    Batch* batch = it->second;
    pending_.erase(it);
    if (p.score) batch->replies.push_back({*p.id, *p.score});
    else batch->failures.push_back({*p.id, p.error});
    if (--batch->remaining == 0) batch->cv.notify_all();
  }

  std::string command_;
  AdapterOptions options_;
  InFlightGate gate_;
  int fd_ = -1;
  pid_t pid_ = -1;
  std::thread reader_;
  std::mutex write_mu_;
  std::mutex mu_;
  std::map<std::string, Batch*> pending_;
  bool dead_ = false;
  std::atomic<std::size_t> garbage_{0};
  std::atomic<std::size_t> unmatched_{0};
};

}  // namespace aesrt
