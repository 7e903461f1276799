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

#include "tbt/canonical_json.hpp"

#include <cmath>
#include <cstdio>

#include "tbt/error.hpp"

namespace tbt {
namespace {

void Append(const nlohmann::json& value, std::string* out) {
  switch (value.type()) {
    case nlohmann::json::value_t::object: {
      out->push_back('{');
      bool first = true;
      // nlohmann::json keeps object keys in a std::map, so iteration is sorted.
      for (const auto& [key, item] : value.items()) {
        if (!first) out->push_back(',');
        first = false;
        out->append(nlohmann::json(key).dump());
        out->push_back(':');
        Append(item, out);
      }
      out->push_back('}');
      break;
    }
    case nlohmann::json::value_t::array: {
      out->push_back('[');
      bool first = true;
      for (const auto& item : value) {
        if (!first) out->push_back(',');
        first = false;
        Append(item, out);
      }
      out->push_back(']');
      break;
    }
    case nlohmann::json::value_t::number_float:
      out->append(FormatReal(value.get<double>()));
      break;
    default:
      out->append(value.dump());
      break;
  }
}

}  // namespace

std::string FormatReal(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInternal, "cannot serialize a non-finite real");
  }
  if (value == 0.0) return "0";  // folds -0 into 0
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string DumpCanonical(const nlohmann::json& value) {
  std::string out;
  Append(value, &out);
  return out;
}

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadRequest:
      return "bad_request";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kConflict:
      return "conflict";
    case ErrorCode::kInternal:
      return "internal";
  }
  return "internal";
}

}  // namespace tbt
