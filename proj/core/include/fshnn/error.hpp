// Copyright 2026 The FSHNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace fshnn {

// Root of every error raised by the library. The CLI maps subclasses onto
// exit codes, so new error kinds must derive from one of the groups below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that do not line up (tensor arithmetic, layer wiring).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf inputs or results, log of zero, and the like.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A configuration value outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Semantically invalid input data (empty calibration set, unnormalized
// probability vector, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed files: bad magic, truncated payloads, CRC mismatch, bad JSON.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Tapes, records or specs that disagree with each other.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Layers the ANN->SNN converter cannot rewrite.
class ConversionError : public Error {
 public:
  using Error::Error;
};

}  // namespace fshnn
