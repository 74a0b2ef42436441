// Copyright 2026 The Advisor Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVISOR_ERROR_HPP_
#define ADVISOR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace advisor {

// Error categories shared by the C++ core, the C API and the HTTP service.
enum class ErrorCode {
  kInvalidArgument = 1,  // schema or validation failure
  kDomain = 2,           // value outside a utility's domain [0, bbar]
  kInfeasible = 3,       // inconsistent answers, infeasible caps
  kNumeric = 4,          // solver did not converge
  kIo = 5,
  kNotFound = 6,
  kConflict = 7,
  kInternal = 8,
  kModel = 9,            // malformed conic program
  kSingular = 10,        // singular matrix in a closed-form computation
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace advisor

#endif  // ADVISOR_ERROR_HPP_
