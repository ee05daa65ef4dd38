/* Copyright 2026 The perturb-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PFORGE_ERRORS_HPP
#define PFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pforge {

/// Base class for every error perturb-forge raises on purpose.  Anything else
/// escaping the library is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when input data is malformed or inconsistent (exit code 2 in the CLI).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation is called with arguments outside its contract.
class UsageError : public Error {
 public:
  using Error::Error;
};

class InvalidQuaternion : public DataError {
 public:
  using DataError::DataError;
};

class InvalidParameter : public UsageError {
 public:
  using UsageError::UsageError;
};

class EmptyFrame : public UsageError {
 public:
  using UsageError::UsageError;
};

class KindMismatch : public UsageError {
 public:
  using UsageError::UsageError;
};

class UnsupportedMode : public UsageError {
 public:
  using UsageError::UsageError;
};

class KernelTooLarge : public UsageError {
 public:
  using UsageError::UsageError;
};

class DelayExceedsSequence : public UsageError {
 public:
  using UsageError::UsageError;
};

class TooShort : public UsageError {
 public:
  using UsageError::UsageError;
};

class NoAssociations : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateGroundTruth : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateGeometry : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public UsageError {
 public:
  using UsageError::UsageError;
};

class PlanShapeError : public DataError {
 public:
  using DataError::DataError;
};

class MissingSource : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class LayoutError : public DataError {
 public:
  using DataError::DataError;
};

class DecodeError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace pforge

#endif  // PFORGE_ERRORS_HPP
