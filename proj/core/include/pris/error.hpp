#pragma once

#include <stdexcept>
#include <string>

namespace pris {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    kOk = 0,
    kConfig = 2,
    kData = 3,
    kNumeric = 4,
};

/// Base of every error the library throws on purpose. Each subclass knows
/// which exit code the CLI should report for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::kData; }
};

/// Tensor shapes that do not fit an operation (odd spatial dims, channel
/// counts, mismatched branches).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Out-of-range operation parameters (negative sigma, qf outside [1,100]).
class ParameterError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

class DataError : public Error {
public:
    using Error::Error;
};

/// Raised when training produces a non-finite loss.
class NumericError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kNumeric; }
};

}  // namespace pris
