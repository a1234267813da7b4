// Copyright 2026 The tcrystal Authors
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

namespace tcrystal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not compose (kron/trace/commutator/channel inputs).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a value failed: non-Hermitian input, negative rate,
/// bad label, wrong model kind.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer, e.g. no
/// eigenvalue near 1 for a channel or an empty Liouvillian kernel.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration rejected by schema validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcrystal
