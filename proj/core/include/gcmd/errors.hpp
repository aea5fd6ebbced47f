// Copyright 2026 The gcmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace gcmd {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid shapes that do not agree, or a kernel too wide for its grid.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument outside its admissible range (sigma <= 0, zero baseline, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values met inside an iterative solve.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid strategy, sweep or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed file payload. Carries the byte offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A scene could not be assembled from disk; names the offending path.
class LoadError : public Error {
 public:
  LoadError(const std::string& path, const std::string& why)
      : Error(path + ": " + why), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcmd
