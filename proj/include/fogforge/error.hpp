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

#ifndef FOGFORGE_ERROR_HPP_
#define FOGFORGE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fogforge {

enum class ErrorCode {
  kSchema,
  kValidation,
  kDisconnectedGraph,
  kCyclicSoftwareGraph,
  kMissingRate,
  kEmptySpace,
  kUnknownPathClass,
  kEmptyCandidates,
  kUnreachable,
  kEmptyInput,
  kCalibrationUnstable,
  kResourceExhausted,
  kStarvation,
  kUnknownOption,
  kIo,
  kInvalidArgument,
};

const char *ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const { return code_; }
  /* Message without the code name prefix. */
  const std::string &detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/* True for the codes that mean "nothing left to work with". */
bool IsEmptyResult(ErrorCode code);

/* True for malformed or inconsistent input documents. */
bool IsValidationFailure(ErrorCode code);

}  // namespace fogforge

#endif  // FOGFORGE_ERROR_HPP_
