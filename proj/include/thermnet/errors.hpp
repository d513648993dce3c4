#pragma once

#include <stdexcept>
#include <string>

namespace thermnet {

/// Base class for all thermnet failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An index or label referred to something out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// A linear system required by the operation is singular (floating massless
/// subnetwork, unanchored component, ...).
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// State-space extraction found no capacitive nodes.
class NoStatesError : public Error {
public:
    using Error::Error;
};

/// A connection would merge two nodes of the same circuit, or create a
/// self-loop branch.
class MergeError : public Error {
public:
    using Error::Error;
};

/// A required input channel is missing or inconsistent.
class InputBindingError : public Error {
public:
    using Error::Error;
};

/// Explicit integration step exceeds the stability limit.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// Text-format error with source location.
class ParseError : public Error {
public:
    ParseError(std::string file, int line, int column, const std::string& message)
        : Error(format(file, line, column, message)),
          file_(std::move(file)),
          line_(line),
          column_(column) {}

    const std::string& file() const { return file_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& file, int line, int column,
                              const std::string& message) {
        std::string out = file.empty() ? std::string("<input>") : file;
        out += ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        return out;
    }

    std::string file_;
    int line_ = 0;
    int column_ = 0;
};

}  // namespace thermnet
