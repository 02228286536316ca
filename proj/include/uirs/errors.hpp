// Copyright 2026 The uirs Authors
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

namespace uirs {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operator or vector whose dimension is not a supported power of two.
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A value outside its documented domain (probability > 1, n out of range...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A precondition on the structure of an operator does not hold, e.g. an
/// operator that is not supported on the requested irrep block.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a simulated distribution is negative or unnormalized beyond
/// tolerance.
class SimulationIntegrityError : public Error {
 public:
  using Error::Error;
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace uirs
