#pragma once

#include <stdexcept>
#include <string>

namespace lqf {

/// Invalid parameters or input files. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical-domain violations. The CLI maps this to exit code 3.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scaled view asked for a time that was not recorded.
class InterpolationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The closed-form u1 expression is only available below the fixed point.
class BranchUnsupportedError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Oracle state space grew past its limit.
class SizeError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace lqf
