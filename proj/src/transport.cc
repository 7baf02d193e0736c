/*
 * Copyright 2026 The GIRP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "girp/transport.h"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "girp/errors.h"

namespace girp {
namespace {

using Clock = std::chrono::steady_clock;
using Code = EndpointError::Code;

class FileDescriptor {
 public:
  FileDescriptor() = default;
  explicit FileDescriptor(int fd) : fd_(fd) {}
  FileDescriptor(FileDescriptor&& other) noexcept
      : fd_(std::exchange(other.fd_, -1)) {}
  FileDescriptor& operator=(FileDescriptor&& other) noexcept {
    if (this != &other) {
      Reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  ~FileDescriptor() { Reset(); }

  int get() const { return fd_; }
  void Reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

// Buffered line reader/writer over a pair of descriptors.
class FdLineStream {
 public:
  FdLineStream(int read_fd, int write_fd, bool is_socket)
      : read_fd_(read_fd), write_fd_(write_fd), is_socket_(is_socket) {}

  void WriteLine(std::string_view line) {
    std::string data(line);
    data.push_back('\n');
    std::size_t written = 0;
    while (written < data.size()) {
      ssize_t rc;
      if (is_socket_) {
        rc = ::send(write_fd_, data.data() + written, data.size() - written,
                    MSG_NOSIGNAL);
      } else {
        rc = ::write(write_fd_, data.data() + written, data.size() - written);
      }
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw EndpointError(Code::kClosed,
                            std::string("write failed: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(rc);
    }
  }

  std::string ReadLine(std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    while (true) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof_) {
        throw EndpointError(Code::kClosed, "model endpoint closed the stream");
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (remaining.count() <= 0) {
        throw EndpointError(Code::kTimeout, "no response within " +
                                                std::to_string(timeout.count()) +
                                                " ms");
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw EndpointError(Code::kClosed,
                            std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) continue;  // deadline check above reports the timeout
      char chunk[4096];
      const ssize_t got = ::read(read_fd_, chunk, sizeof(chunk));
      if (got < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        eof_ = true;
        continue;
      }
      if (got == 0) {
        eof_ = true;
        continue;
      }
      buffer_.append(chunk, static_cast<std::size_t>(got));
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  bool is_socket_;
  bool eof_ = false;
  std::string buffer_;
};

class ProcessTransport : public LineTransport {
 public:
  explicit ProcessTransport(const std::string& command) {
    // Writes to a dead child must fail with EPIPE instead of killing us.
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw EndpointError(Code::kSpawn, "pipe failed");
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw EndpointError(Code::kSpawn, "pipe failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
        ::close(fd);
      }
      throw EndpointError(Code::kSpawn, "fork failed");
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::signal(SIGPIPE, SIG_DFL);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    stdin_ = FileDescriptor(to_child[1]);
    stdout_ = FileDescriptor(from_child[0]);
    stream_ = std::make_unique<FdLineStream>(stdout_.get(), stdin_.get(), false);
  }

  ~ProcessTransport() override {
    stdin_.Reset();
    stdout_.Reset();
    if (pid_ <= 0) return;
    // Give the child a moment to exit on EOF, then kill it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      ::usleep(2000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

  void WriteLine(std::string_view line) override { stream_->WriteLine(line); }
  std::string ReadLine(std::chrono::milliseconds timeout) override {
    return stream_->ReadLine(timeout);
  }

 private:
  pid_t pid_ = -1;
  FileDescriptor stdin_;
  FileDescriptor stdout_;
  std::unique_ptr<FdLineStream> stream_;
};

class TcpTransport : public LineTransport {
 public:
  TcpTransport(const std::string& address, std::chrono::milliseconds timeout) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size()) {
      throw EndpointError(Code::kConnect,
                          "address must be host:port, got '" + address + "'");
    }
    const std::string host = address.substr(0, colon);
    const std::string port = address.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    if (::getaddrinfo(host.empty() ? "127.0.0.1" : host.c_str(), port.c_str(),
                      &hints, &result) != 0) {
      throw EndpointError(Code::kConnect, "cannot resolve '" + address + "'");
    }
    std::string last_error = "no addresses";
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
      FileDescriptor fd(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC,
                                 ai->ai_protocol));
      if (fd.get() < 0) continue;
      if (ConnectWithTimeout(fd.get(), ai, timeout, last_error)) {
        socket_ = std::move(fd);
        break;
      }
    }
    ::freeaddrinfo(result);
    if (socket_.get() < 0) {
      throw EndpointError(Code::kConnect,
                          "cannot connect to '" + address + "': " + last_error);
    }
    stream_ = std::make_unique<FdLineStream>(socket_.get(), socket_.get(), true);
  }

  void WriteLine(std::string_view line) override { stream_->WriteLine(line); }
  std::string ReadLine(std::chrono::milliseconds timeout) override {
    return stream_->ReadLine(timeout);
  }

 private:
  static bool ConnectWithTimeout(int fd, const addrinfo* ai,
                                 std::chrono::milliseconds timeout,
                                 std::string& error) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc <= 0) {
        error = "connect timed out";
        return false;
      }
      int so_error = 0;
      socklen_t len = sizeof(so_error);
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &so_error, &len);
      if (so_error != 0) {
        error = std::strerror(so_error);
        return false;
      }
    } else if (rc != 0) {
      error = std::strerror(errno);
      return false;
    }
    ::fcntl(fd, F_SETFL, flags);
    return true;
  }

  FileDescriptor socket_;
  std::unique_ptr<FdLineStream> stream_;
};

}  // namespace

std::unique_ptr<LineTransport> SpawnProcess(const std::string& command) {
  return std::make_unique<ProcessTransport>(command);
}

std::unique_ptr<LineTransport> ConnectTcp(const std::string& address,
                                          std::chrono::milliseconds timeout) {
  return std::make_unique<TcpTransport>(address, timeout);
}

}  // namespace girp
