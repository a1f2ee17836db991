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

#include "dkm/error.hpp"

namespace dkm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::Format: return "format-error";
    case ErrorCode::Io: return "io-error";
    case ErrorCode::EstimationFailure: return "estimation-failure";
    case ErrorCode::UndefinedResult: return "undefined-result";
    case ErrorCode::Config: return "config-error";
  }
  return "unknown";
}

}  // namespace dkm
