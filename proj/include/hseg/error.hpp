// Copyright 2026 The horizonseg Authors. All Rights Reserved.
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

namespace hseg {

/// Base of every domain failure raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or corrupted input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two thickened horizons claim the same voxel.
class OverlapError : public Error {
 public:
  OverlapError(std::string first, std::string second, const std::string& where)
      : Error("horizons '" + first + "' and '" + second +
              "' overlap after thickening" + (where.empty() ? "" : " " + where)),
        first_(std::move(first)),
        second_(std::move(second)) {}

  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

 private:
  std::string first_;
  std::string second_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hseg
