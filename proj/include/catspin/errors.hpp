//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace catspin {

/// Invalid argument to a public operation (bad atom count, angle out of range, ...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Two-CSS superposition whose normalization C^2 vanishes.
class DegenerateSuperpositionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// State handed to the symmetric sector is not invariant under m -> -m.
class SymmetryViolationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Protocol has no first-order response to the phase.
class DegenerateSignalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or record file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace catspin
