// Copyright 2026 The cvbench Authors
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

namespace cvbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside their documented domain (negative noise, η > 1, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Output moments violate the uncertainty relation var_x * var_p >= 1/4.
class PhysicalityError : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock-space oracle lost too much probability mass.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Interior-point iterations stopped making progress before the requested
/// accuracy was reached.
class SolverStall : public Error {
 public:
  using Error::Error;
};

/// Threshold bisection could not bracket the ENTANGLED/COMPATIBLE flip.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Malformed moments / EVM document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvbench
