#pragma once

#include <stdexcept>
#include <string>

namespace hpforge {

// Base class for all data and processing failures raised by this library.
// The CLI maps these to exit code 2; usage problems never reach this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A request that is wrong at the invocation level (bad flag values, missing
// arguments). The CLI maps these to exit code 64.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that could not be parsed at all. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(message + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace hpforge
