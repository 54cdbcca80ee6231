// Copyright 2026 The CWIC Authors
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

#ifndef CWIC_ERROR_HPP_
#define CWIC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace cwic {

// Error categories map one-to-one onto the C API status codes and the CLI
// exit codes.
enum class ErrorKind {
  kIo,
  kConfig,
  kCorruptData,
  kNumeric,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void IoError(const std::string& message) {
  throw Error(ErrorKind::kIo, message);
}
[[noreturn]] inline void ConfigError(const std::string& message) {
  throw Error(ErrorKind::kConfig, message);
}
[[noreturn]] inline void CorruptData(const std::string& message) {
  throw Error(ErrorKind::kCorruptData, message);
}
[[noreturn]] inline void NumericError(const std::string& message) {
  throw Error(ErrorKind::kNumeric, message);
}

}  // namespace cwic

#endif  // CWIC_ERROR_HPP_
