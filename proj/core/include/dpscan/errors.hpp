#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpscan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violated a type invariant (negative coordinate, x1 > x2, bad hex colour, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Misconfiguration: missing template placeholder, unusable threshold, missing env var.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error(line == 0 ? reason : "line " + std::to_string(line) + ": " + reason),
          line_(line),
          reason_(reason) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

/// A single-token alias that is not in the alias table.
class UnknownAlias : public Error {
public:
    explicit UnknownAlias(const std::string& word)
        : Error("unknown alias '" + word + "'"), word_(word) {}
    const std::string& word() const noexcept { return word_; }

private:
    std::string word_;
};

/// A pluggable backend (OCR, detector, chat model, browser, search) failed.
class BackendError : public Error {
public:
    BackendError(std::string backend, const std::string& what)
        : Error("backend '" + backend + "': " + what), backend_(std::move(backend)) {}
    const std::string& backend() const noexcept { return backend_; }

private:
    std::string backend_;
};

/// Failure of one pipeline stage; wraps the stage name around the underlying message.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what, std::string backend = {})
        : Error(stage + " stage failed: " + what),
          stage_(std::move(stage)),
          backend_(std::move(backend)) {}
    const std::string& stage() const noexcept { return stage_; }
    /// Empty unless the failure came from a backend.
    const std::string& backend() const noexcept { return backend_; }

private:
    std::string stage_;
    std::string backend_;
};

}  // namespace dpscan
