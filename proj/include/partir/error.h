/* Copyright 2026 The partirc Authors.

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

#ifndef PARTIR_ERROR_H_
#define PARTIR_ERROR_H_

#include <stdexcept>
#include <string>

namespace partir {

// Base class for all user-facing errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Malformed textual IR. Carries the 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        line(line),
        column(column) {}
  int line;
  int column;
};

// A structurally invalid program (SSA violations, shape mismatches,
// loop-nesting violations, ...). The message names the offending op.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error(message) {}
};

// A rewrite action whose preconditions do not hold.
class IllegalActionError : public Error {
 public:
  explicit IllegalActionError(const std::string& message) : Error(message) {}
};

// An invariant the implementation itself must uphold was violated. Seeing
// this is a bug signal, not a user error; the CLI maps it to exit code 70.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& message) : Error(message) {}
};

}  // namespace partir

#endif  // PARTIR_ERROR_H_
