/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HEMI_ERROR_H_
#define HEMI_ERROR_H_

#include <stdexcept>
#include <string>

namespace hemi {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that do not compose.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An operation was called in the wrong lifecycle state (e.g. backward
// without a matching forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or argument values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Channel label without a recognised reference suffix.
class UnknownChannelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input files. The message names the file and line.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hemi

#endif  // HEMI_ERROR_H_
