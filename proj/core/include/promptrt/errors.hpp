/* Copyright 2026 The promptrt Authors

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

#pragma once

#include <stdexcept>
#include <string>

namespace promptrt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Template text failed to parse. Carries a 1-based line/column position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, int line, int col)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class MissingBinding : public Error {
 public:
  explicit MissingBinding(const std::string& name)
      : Error("no binding for variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class HolePresent : public Error {
 public:
  explicit HolePresent(const std::string& name)
      : Error("template contains generation hole '" + name +
              "'; rendering requires a hole-free template (use the executor)"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Transport or HTTP failure talking to a completions endpoint.
class EndpointError : public Error {
 public:
  EndpointError(const std::string& what, int status, const std::string& body)
      : Error(what), status_(status), body_(body) {}

  /// HTTP status, or 0 for transport-level failures.
  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_; }

 private:
  int status_;
  std::string body_;
};

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class BoundaryUnalignable : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

class PoolTooSmall : public Error {
 public:
  using Error::Error;
};

class FormatShotMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

}  // namespace promptrt
