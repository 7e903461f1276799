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

#ifndef TBT_ERROR_HPP_
#define TBT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace tbt {

// Mirrors the service-level error taxonomy so that library failures map onto
// HTTP statuses and CLI exit codes without re-classification.
enum class ErrorCode { kBadRequest, kNotFound, kConflict, kInternal };

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json detail = nullptr)
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const { return code_; }
  const nlohmann::json& detail() const { return detail_; }

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

// Malformed or inconsistent input data (CSV, dataset JSON, schema mismatch).
class DataError : public Error {
 public:
  explicit DataError(const std::string& message,
                     nlohmann::json detail = nullptr)
      : Error(ErrorCode::kBadRequest, message, std::move(detail)) {}
};

// Numerical failure inside the learner.
class FitError : public Error {
 public:
  explicit FitError(const std::string& message)
      : Error(ErrorCode::kInternal, message) {}
};

inline Error BadRequest(const std::string& message,
                        nlohmann::json detail = nullptr) {
  return Error(ErrorCode::kBadRequest, message, std::move(detail));
}

inline Error NotFound(const std::string& message,
                      nlohmann::json detail = nullptr) {
  return Error(ErrorCode::kNotFound, message, std::move(detail));
}

}  // namespace tbt

#endif  // TBT_ERROR_HPP_
