// Copyright 2026 The Loudnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOUDNET_CORE_ERROR_HPP_
#define LOUDNET_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace loudnet {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kFormat = 3,
  kNumeric = 4,
  kState = 5,
};

// All recoverable failures in the core library surface as this exception; the
// C API maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& what);

inline void Require(bool condition, const std::string& what) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace loudnet

#endif  // LOUDNET_CORE_ERROR_HPP_
