// Copyright 2026 The aesrt Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aesrt {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One rejected input row. `row` is 1-based and counts the header line, so
/// it matches what a text editor shows.
struct Diagnostic {
  std::size_t row = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// Raised when a corpus or manifest file fails validation. Carries every
/// row-level diagnostic rather than only the first.
class LoadError : public Error {
 public:
  LoadError(std::string what, std::vector<Diagnostic> diagnostics = {})
      : Error(std::move(what)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// A perturbation could not be applied to the given response.
class PerturbError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class ScorerError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aesrt
