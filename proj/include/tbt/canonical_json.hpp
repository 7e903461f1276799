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

#ifndef TBT_CANONICAL_JSON_HPP_
#define TBT_CANONICAL_JSON_HPP_

#include <string>

#include "json.hpp"

namespace tbt {

// Compact JSON with sorted object keys and every floating-point value written
// as a decimal with 17 significant digits. Two equal documents always dump to
// the same bytes, and reparsing a dump then dumping again is a fixed point.
std::string DumpCanonical(const nlohmann::json& value);

// Formats one double the way DumpCanonical does.
std::string FormatReal(double value);

}  // namespace tbt

#endif  // TBT_CANONICAL_JSON_HPP_
