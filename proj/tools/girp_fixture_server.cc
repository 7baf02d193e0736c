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

// Prediction-protocol server over fixed analytic models, for tests and
// demos. Speaks newline-delimited JSON on stdin/stdout, or on one TCP
// connection with --port.
//
//   linear:    f(x) = bias + sum_i w_i x_i
//   additive:  f(x) = bias + sum_i w_i (x_i^2 + sin(x_i))
//   constant:  f(x) = bias
//
// Categorical values arrive as labels; a label that parses as a number is
// used as that number, otherwise its position in --levels (or 0).

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using Json = nlohmann::json;

struct Options {
  std::string model = "linear";
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<std::string> levels;
  int exit_after = -1;  // predict requests answered before exiting
  std::string misbehave;  // "", "nan", "wrong-id", "garbage", "short"
  int delay_ms = 0;
  int port = -1;
};

double Numeric(const Json& value, const Options& options) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string label = value.get<std::string>();
    try {
      std::size_t used = 0;
      const double parsed = std::stod(label, &used);
      if (used == label.size()) return parsed;
    } catch (const std::exception&) {
    }
    for (std::size_t i = 0; i < options.levels.size(); ++i) {
      if (options.levels[i] == label) return static_cast<double>(i);
    }
  }
  return 0.0;
}

double Evaluate(const Json& row, const Options& options) {
  double score = options.bias;
  if (options.model == "constant") return score;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double w = i < options.weights.size() ? options.weights[i] : 0.0;
    const double x = Numeric(row[i], options);
    score += options.model == "additive" ? w * (x * x + std::sin(x)) : w * x;
  }
  return score;
}

// Returns false when the server should stop.
template <typename Write>
bool Handle(const std::string& line, const Options& options, int& answered,
            Write&& write) {
  Json request;
  try {
    request = Json::parse(line);
  } catch (const Json::exception&) {
    write(Json{{"type", "error"}, {"id", nullptr}, {"message", "malformed JSON"}}
              .dump());
    return true;
  }
  const std::string type = request.value("type", "");
  if (type == "hello") {
    write(Json{{"type", "ready"}}.dump());
    return true;
  }
  if (type != "predict") {
    write(Json{{"type", "error"}, {"id", request.value("id", Json())},
               {"message", "unknown type"}}
              .dump());
    return true;
  }
  if (options.exit_after >= 0 && answered >= options.exit_after) return false;
  if (options.delay_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(options.delay_ms));
  }
  Json scores = Json::array();
  for (const Json& row : request.at("rows")) {
    scores.push_back(Evaluate(row, options));
  }
  Json id = request.at("id");
  if (options.misbehave == "nan") {
    // JSON has no NaN; a null score is the closest a server can send.
    scores[0] = nullptr;
  } else if (options.misbehave == "wrong-id") {
    id = id.get<long long>() + 1000;
  } else if (options.misbehave == "short") {
    scores.erase(scores.size() - 1);
  } else if (options.misbehave == "garbage") {
    write("this is not json");
    ++answered;
    return true;
  }
  write(Json{{"type", "scores"}, {"id", id}, {"scores", std::move(scores)}}.dump());
  ++answered;
  return true;
}

int ServeStdio(const Options& options) {
  int answered = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    const bool keep_going = Handle(line, options, answered, [](const std::string& out) {
      std::cout << out << '\n' << std::flush;
    });
    if (!keep_going) break;
  }
  return 0;
}

int ServeTcp(const Options& options) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in address{};
  address.sin_family = AF_INET;
  address.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  address.sin_port = htons(static_cast<std::uint16_t>(options.port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&address), sizeof(address)) != 0 ||
      ::listen(listener, 1) != 0) {
    std::perror("bind/listen");
    return 1;
  }
  socklen_t length = sizeof(address);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&address), &length);
  // Announce the bound port (useful with --port 0).
  std::cout << ntohs(address.sin_port) << std::endl;
  const int client = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (client < 0) return 1;

  int answered = 0;
  std::string buffer;
  char chunk[4096];
  auto write = [client](const std::string& out) {
    const std::string data = out + "\n";
    ::send(client, data.data(), data.size(), MSG_NOSIGNAL);
  };
  while (true) {
    const ssize_t got = ::read(client, chunk, sizeof(chunk));
    if (got <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(got));
    std::size_t newline;
    bool stop = false;
    while (!stop && (newline = buffer.find('\n')) != std::string::npos) {
      const std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (!line.empty()) stop = !Handle(line, options, answered, write);
    }
    if (stop) break;
  }
  ::close(client);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options options;
  CLI::App app{"Fixture model server for the prediction protocol"};
  app.add_option("--model", options.model, "linear | additive | constant");
  app.add_option("--weights", options.weights, "Per-feature weights")->delimiter(',');
  app.add_option("--bias", options.bias, "Constant term / constant score");
  app.add_option("--levels", options.levels, "Label order for categorical values")
      ->delimiter(',');
  app.add_option("--exit-after", options.exit_after,
                 "Exit after answering this many predict requests");
  app.add_option("--misbehave", options.misbehave,
                 "nan | wrong-id | garbage | short");
  app.add_option("--delay-ms", options.delay_ms, "Delay before each reply");
  app.add_option("--port", options.port, "Serve one TCP connection on this port");
  CLI11_PARSE(app, argc, argv);
  return options.port >= 0 ? ServeTcp(options) : ServeStdio(options);
}
