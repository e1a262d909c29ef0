// Copyright 2026 The tridrop Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tridrop {

enum class ErrorCode {
  NonPositiveMass,
  NegativeMass,
  NegativeGamma,
  InvalidShape,
  MassMismatch,
  InsufficientMass,
  IndexOutOfRange,
  OverlappingBalls,
  InvalidSpec,
  ConvergenceFailure,
  NotMixed,
  PreconditionViolated,
  SchemaError,
  IoFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::NegativeGamma: return "NegativeGamma";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::InsufficientMass: return "InsufficientMass";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OverlappingBalls: return "OverlappingBalls";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotMixed: return "NotMixed";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code and, when relevant, the name
/// (or JSON pointer) of the offending field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) +
                           (field.empty() ? "" : " at " + field) + ": " +
                           message),
        code_(code),
        field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

  /// Input-validation failures as opposed to numeric failures.
  bool is_validation() const noexcept {
    return code_ != ErrorCode::ConvergenceFailure;
  }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace tridrop
