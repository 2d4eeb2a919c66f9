// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace emweak {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A diffusion matrix whose elimination hit a vanishing pivot.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Drift, payoff or weight produced NaN/Inf where a finite value is required.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Malformed problem, ladder or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Monte Carlo run that cannot produce an estimate (e.g. an all-invalid batch).
class McError : public Error {
public:
    using Error::Error;
};

}  // namespace emweak
