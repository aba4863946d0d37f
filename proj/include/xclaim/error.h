// Copyright 2026 The X-Claim Toolkit Authors
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

#ifndef XCLAIM_ERROR_H_
#define XCLAIM_ERROR_H_

#include <stdexcept>
#include <string>

namespace xclaim {

// Base of all toolkit errors. The CLI maps the subclasses onto exit codes:
// validation-type errors exit 1, I/O and transport errors exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented invariant or precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed line in a line-oriented input file.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, int line, const std::string& cause)
      : ValidationError(source + ":" + std::to_string(line) + ": " + cause),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Missing or inconsistent configuration (e.g. BERTScore without a provider).
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The aligner produced no links into the selected sentence.
class NoAlignmentError : public Error {
 public:
  explicit NoAlignmentError(const std::string& id)
      : Error("no alignment links for sample '" + id + "'"), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// An LLM response was empty after trimming.
class EmptyResponseError : public Error {
 public:
  explicit EmptyResponseError(const std::string& id)
      : Error("empty model response for sample '" + id + "'"), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Chat endpoint failure. Transient failures are retried by the caller.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool transient)
      : Error(what), transient_(transient) {}

  bool transient() const { return transient_; }

 private:
  bool transient_;
};

}  // namespace xclaim

#endif  // XCLAIM_ERROR_H_
