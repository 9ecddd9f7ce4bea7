//
// Copyright 2026 The fairdial Authors
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
//

#ifndef FAIRDIAL_ERROR_HPP_
#define FAIRDIAL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairdial {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition stated by an operation's contract was violated by the
// caller (mismatched lengths, out-of-range arguments, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Context has no term on the requested source side.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

// Context carries terms of both groups at once.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

// A measurement is not defined on the given data (e.g. zero tokens).
class UndefinedMeasureError : public Error {
 public:
  using Error::Error;
};

class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Failure talking to an out-of-process peer: timeout, closed stream, or a
// reply that breaks the line protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ResponderError : public Error {
 public:
  using Error::Error;
};

class DetectorError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairdial

#endif  // FAIRDIAL_ERROR_HPP_
