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

#include "girp/errors.h"

#include <utility>

namespace girp {
namespace {

std::string WithCoordinates(std::string message,
                            std::optional<std::size_t> row,
                            std::optional<std::size_t> column) {
  if (row && column) {
    return message + " (row " + std::to_string(*row) + ", column " +
           std::to_string(*column) + ")";
  }
  if (row) return message + " (row " + std::to_string(*row) + ")";
  if (column) return message + " (column " + std::to_string(*column) + ")";
  return message;
}

}  // namespace

DataError::DataError(Code code, std::string message,
                     std::optional<std::size_t> row,
                     std::optional<std::size_t> column)
    : std::runtime_error(std::string(ToString(code)) + ": " +
                         WithCoordinates(std::move(message), row, column)),
      code_(code),
      row_(row),
      column_(column) {}

EndpointError::EndpointError(Code code, std::string message,
                             std::optional<std::size_t> row)
    : std::runtime_error(std::string(ToString(code)) + ": " +
                         WithCoordinates(message, row, std::nullopt)),
      code_(code),
      row_(row),
      bare_message_(std::move(message)) {}

EndpointError EndpointError::WithRow(std::size_t row) const {
  return EndpointError(code_, bare_message_, row);
}

const char* ToString(DataError::Code code) {
  switch (code) {
    case DataError::Code::kIo: return "Io";
    case DataError::Code::kParse: return "Parse";
    case DataError::Code::kShapeMismatch: return "ShapeMismatch";
    case DataError::Code::kHeaderMismatch: return "HeaderMismatch";
    case DataError::Code::kUnknownLevel: return "UnknownLevel";
    case DataError::Code::kNotBinary: return "NotBinary";
    case DataError::Code::kNotNumeric: return "NotNumeric";
    case DataError::Code::kMissingValue: return "MissingValue";
    case DataError::Code::kNonFinite: return "NonFinite";
    case DataError::Code::kDuplicateRowId: return "DuplicateRowId";
    case DataError::Code::kRowIdMismatch: return "RowIdMismatch";
    case DataError::Code::kSchema: return "Schema";
    case DataError::Code::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* ToString(EndpointError::Code code) {
  switch (code) {
    case EndpointError::Code::kSpawn: return "EndpointSpawn";
    case EndpointError::Code::kConnect: return "EndpointConnect";
    case EndpointError::Code::kTimeout: return "EndpointTimeout";
    case EndpointError::Code::kClosed: return "EndpointClosed";
    case EndpointError::Code::kProtocol: return "ProtocolViolation";
    case EndpointError::Code::kNonFinite: return "NonFiniteScore";
  }
  return "Unknown";
}

}  // namespace girp
