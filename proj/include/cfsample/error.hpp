/*
 * Copyright 2026 The cfsample Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace cfsample {

// Base of every error raised by the library. The message is prefixed with the
// module that raised it ("data: ...", "samplers: ...") so the CLI can surface
// it verbatim.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& message)
      : std::runtime_error(module + ": " + message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error("data", source + ":" + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public Error {
 public:
  explicit EmptyDatasetError(const std::string& message) : Error("data", message) {}
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& module, int epoch)
      : Error(module, "non-finite loss at epoch " + std::to_string(epoch)), epoch_(epoch) {}

  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace cfsample
