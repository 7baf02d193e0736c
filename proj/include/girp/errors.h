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

#ifndef GIRP_ERRORS_H_
#define GIRP_ERRORS_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace girp {

// Input validation failures. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  enum class Code {
    kIo,
    kParse,
    kShapeMismatch,
    kHeaderMismatch,
    kUnknownLevel,
    kNotBinary,
    kNotNumeric,
    kMissingValue,
    kNonFinite,
    kDuplicateRowId,
    kRowIdMismatch,
    kSchema,
    kInvalidArgument,
  };

  DataError(Code code, std::string message,
            std::optional<std::size_t> row = std::nullopt,
            std::optional<std::size_t> column = std::nullopt);

  Code code() const { return code_; }
  // 1-based data row (header excluded) and 1-based column, when known.
  std::optional<std::size_t> row() const { return row_; }
  std::optional<std::size_t> column() const { return column_; }

 private:
  Code code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

// Broken internal invariant. Never expected; exit code 3.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Model endpoint failure (timeout, closed stream, protocol violation, bad
// score). Exit code 4.
class EndpointError : public std::runtime_error {
 public:
  enum class Code { kSpawn, kConnect, kTimeout, kClosed, kProtocol, kNonFinite };

  EndpointError(Code code, std::string message,
                std::optional<std::size_t> row = std::nullopt);

  Code code() const { return code_; }
  std::optional<std::size_t> row() const { return row_; }

  // Same error annotated with the table row being explained.
  EndpointError WithRow(std::size_t row) const;

 private:
  Code code_;
  std::optional<std::size_t> row_;
  std::string bare_message_;
};

const char* ToString(DataError::Code code);
const char* ToString(EndpointError::Code code);

}  // namespace girp

#endif  // GIRP_ERRORS_H_
