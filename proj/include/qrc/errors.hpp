// Copyright 2026 The qrc Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qrc {

// Base class for every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define QRC_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(tag, what) {}      \
  }

QRC_DEFINE_ERROR(DimensionError, "dimension");
QRC_DEFINE_ERROR(RangeError, "range");
QRC_DEFINE_ERROR(NotHermitianError, "not_hermitian");
QRC_DEFINE_ERROR(InvariantError, "invariant");
QRC_DEFINE_ERROR(ShapeError, "shape");
QRC_DEFINE_ERROR(IntegratorError, "integrator");
QRC_DEFINE_ERROR(ConfigError, "config");
QRC_DEFINE_ERROR(IoError, "io");
QRC_DEFINE_ERROR(ValueError, "value");

#undef QRC_DEFINE_ERROR

}  // namespace qrc
