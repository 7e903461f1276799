/*
 * Copyright 2026 The tbt Authors.
 *
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

#ifndef TBT_DATA_CSV_HPP_
#define TBT_DATA_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace tbt::data {

using CsvRow = std::vector<std::string>;

// Parses RFC 4180 text: comma separated, optional double-quoted fields with
// "" as the escaped quote, CRLF or LF line endings. Blank lines are skipped.
// Throws DataError naming the 1-based line of an unterminated quote.
std::vector<CsvRow> ParseCsv(std::string_view text);

}  // namespace tbt::data

#endif  // TBT_DATA_CSV_HPP_
