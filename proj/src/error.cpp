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

#include "persal/error.hpp"

namespace persal {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroDim: return "ZeroDim";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::UnmappedCategory: return "UnmappedCategory";
    case ErrorCode::RatingOutOfRange: return "RatingOutOfRange";
    case ErrorCode::TooManySuperCategories: return "TooManySuperCategories";
    case ErrorCode::CategoryOutOfRange: return "CategoryOutOfRange";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::UndefinedRatio: return "UndefinedRatio";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace persal
