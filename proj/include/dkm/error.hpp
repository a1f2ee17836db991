/*
 * Copyright 2026 The dkm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace dkm {

enum class ErrorCode {
  InvalidArgument = 1,
  NumericalFailure = 2,
  Format = 3,
  Io = 4,
  EstimationFailure = 5,
  UndefinedResult = 6,
  Config = 7,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code maps
/// one-to-one onto the status values of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::InvalidArgument, what) {}
};

/// Raised when every jitter escalation and the least-squares fallback failed.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double final_jitter)
      : Error(ErrorCode::NumericalFailure, what), final_jitter_(final_jitter) {}
  double final_jitter() const noexcept { return final_jitter_; }

 private:
  double final_jitter_;
};

/// Malformed binary or text input. Carries the byte offset where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(ErrorCode::Format, what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class EstimationFailure : public Error {
 public:
  explicit EstimationFailure(const std::string& what)
      : Error(ErrorCode::EstimationFailure, what) {}
};

class UndefinedResult : public Error {
 public:
  explicit UndefinedResult(const std::string& what)
      : Error(ErrorCode::UndefinedResult, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

}  // namespace dkm
