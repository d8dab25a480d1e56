// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace attrforge {

enum class ErrorCode {
  kSingularTransform,
  kEmptyMask,
  kEmptyBackground,
  kEmptyDataset,
  kEmptyPool,
  kStepOutOfRange,
  kInvalidLabel,
  kInvalidScale,
  kBadOffset,
  kDimensionMismatch,
  kNotPSD,
  kDegenerateDataset,
  kMissingVariant,
  kValidation,
  kIo,
  kInvariant,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Single exception type for the library. The code identifies the failure
/// class named in the public contracts (EmptyMask, StepOutOfRange, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace attrforge
