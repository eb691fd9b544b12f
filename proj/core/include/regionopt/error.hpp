// Copyright 2026 The regionopt Authors.
//
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regionopt {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kParse,
  kDimensionMismatch,
  kInvariant,
  kConvergence,
  kNumerical,
  kCapacity,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// stable and machine-readable; the message names the violated condition.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when the wait-time fixed point does not settle within the cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double last_gap, int iterations)
      : Error(ErrorKind::kConvergence, message),
        last_gap_(last_gap),
        iterations_(iterations) {}

  double last_gap() const noexcept { return last_gap_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_gap_;
  int iterations_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace regionopt
