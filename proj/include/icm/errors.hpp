#pragma once

#include <stdexcept>
#include <string>

namespace icm {

/// Process exit codes used by the CLI. Library errors carry the code they
/// should map to so the tool layer stays a thin switch.
enum class ExitCode : int {
    ok = 0,
    validation = 1,
    numerical = 2,
    property = 3,
};

class Error : public std::runtime_error {
public:
    Error(std::string msg, ExitCode code)
        : std::runtime_error(std::move(msg)), code_(code) {}

    [[nodiscard]] ExitCode exit_code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Bad input: violated invariants, malformed files, unsupported requests.
class ValidationError : public Error {
public:
    explicit ValidationError(std::string msg)
        : Error(std::move(msg), ExitCode::validation) {}
};

/// Parse failure with file/line context.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& msg)
        : ValidationError(source + ":" + std::to_string(line) + ": " + msg),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Numerical failure: divergence, pole hit, unsettled trace.
class NumericalError : public Error {
public:
    explicit NumericalError(std::string msg)
        : Error(std::move(msg), ExitCode::numerical) {}
};

/// A claimed property (e.g. sweep monotonicity) did not hold on real output.
class PropertyViolation : public Error {
public:
    explicit PropertyViolation(std::string msg)
        : Error(std::move(msg), ExitCode::property) {}
};

} // namespace icm
