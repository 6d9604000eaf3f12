/*
 * Copyright 2026 The FogForge Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fogforge/error.hpp"

namespace fogforge {

const char *ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
      return "SchemaError";
    case ErrorCode::kValidation:
      return "ValidationError";
    case ErrorCode::kDisconnectedGraph:
      return "DisconnectedGraph";
    case ErrorCode::kCyclicSoftwareGraph:
      return "CyclicSoftwareGraph";
    case ErrorCode::kMissingRate:
      return "MissingRate";
    case ErrorCode::kEmptySpace:
      return "EmptySpace";
    case ErrorCode::kUnknownPathClass:
      return "UnknownPathClass";
    case ErrorCode::kEmptyCandidates:
      return "EmptyCandidates";
    case ErrorCode::kUnreachable:
      return "Unreachable";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kCalibrationUnstable:
      return "CalibrationUnstable";
    case ErrorCode::kResourceExhausted:
      return "ResourceExhausted";
    case ErrorCode::kStarvation:
      return "Starvation";
    case ErrorCode::kUnknownOption:
      return "UnknownOption";
    case ErrorCode::kIo:
      return "IoError";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message),
      code_(code),
      detail_(message) {}

bool IsEmptyResult(ErrorCode code) {
  return code == ErrorCode::kEmptySpace || code == ErrorCode::kEmptyCandidates ||
         code == ErrorCode::kEmptyInput;
}

bool IsValidationFailure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
    case ErrorCode::kValidation:
    case ErrorCode::kDisconnectedGraph:
    case ErrorCode::kCyclicSoftwareGraph:
    case ErrorCode::kMissingRate:
    case ErrorCode::kUnknownPathClass:
    case ErrorCode::kInvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace fogforge
