// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vrvfl {

/// Input outside the mathematical domain of an operation (negative power,
/// non-finite argument, vehicle out of coverage, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// epsilon == 0: the estimate carries no information about the channel.
class DegenerateChannelError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Bad configuration key or value. The message names the key.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf that escaped a numerical routine, or a runtime I/O failure.
class RuntimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vrvfl
