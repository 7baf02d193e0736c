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

// Newline-delimited byte streams to a model server: a child process's
// stdin/stdout or a TCP connection.

#ifndef GIRP_TRANSPORT_H_
#define GIRP_TRANSPORT_H_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace girp {

class LineTransport {
 public:
  virtual ~LineTransport() = default;

  // Writes `line` plus '\n'. Throws EndpointError(kClosed) if the peer is
  // gone.
  virtual void WriteLine(std::string_view line) = 0;

  // Next line without its terminator. Throws EndpointError(kTimeout) or
  // EndpointError(kClosed).
  virtual std::string ReadLine(std::chrono::milliseconds timeout) = 0;
};

// Runs `command` through /bin/sh -c with piped stdin/stdout; stderr is
// inherited. The child is terminated on destruction.
std::unique_ptr<LineTransport> SpawnProcess(const std::string& command);

// "host:port". Throws EndpointError(kConnect) when the connection fails.
std::unique_ptr<LineTransport> ConnectTcp(const std::string& address,
                                          std::chrono::milliseconds timeout);

}  // namespace girp

#endif  // GIRP_TRANSPORT_H_
