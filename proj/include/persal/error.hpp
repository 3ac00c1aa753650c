// Copyright 2026 The persal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
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

namespace persal {

enum class ErrorCode {
  InvalidArgument = 1,
  ZeroDim,
  DimMismatch,
  EmptyList,
  UnmappedCategory,
  RatingOutOfRange,
  TooManySuperCategories,
  CategoryOutOfRange,
  ChannelMismatch,
  ZeroVariance,
  NotNormalized,
  UndefinedRatio,
  ZeroMass,
  OutOfRange,
  BadMagic,
  ChecksumMismatch,
  TruncatedFile,
  Io,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C boundary can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for failures caused by the filesystem rather than by the inputs.
  bool is_io() const noexcept {
    return code_ == ErrorCode::Io || code_ == ErrorCode::TruncatedFile ||
           code_ == ErrorCode::BadMagic || code_ == ErrorCode::ChecksumMismatch;
  }

 private:
  ErrorCode code_;
};

}  // namespace persal
