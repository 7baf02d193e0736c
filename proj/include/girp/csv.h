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

// Minimal RFC 4180 reader/writer.

#ifndef GIRP_CSV_H_
#define GIRP_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace girp::csv {

using Record = std::vector<std::string>;

// Splits the text into records. Accepts LF or CRLF line endings and a
// missing final newline. Throws DataError(kParse) on unterminated quotes or
// stray characters after a closing quote.
std::vector<Record> Parse(std::string_view text);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string EscapeField(std::string_view field);
std::string FormatRecord(const Record& record);

}  // namespace girp::csv

#endif  // GIRP_CSV_H_
