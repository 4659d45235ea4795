#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groupcast {

/// Base for every error the library raises. Callers that only need a message
/// can catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (mismatched graphs, empty
/// inputs, out-of-range indices).
class ContractError : public Error {
public:
    using Error::Error;
};

class EmptySession : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class OrderingError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class PromptOverflow : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Connection refused, timeout, or retry exhaustion on transient statuses.
class TransportError : public Error {
public:
    using Error::Error;
};

/// The endpoint answered with a non-retryable non-2xx status.
class EndpointError : public Error {
public:
    EndpointError(int status, std::string message)
        : Error("endpoint returned HTTP " + std::to_string(status) + ": " + message),
          status_(status), message_(std::move(message)) {}

    int status() const noexcept { return status_; }
    const std::string& message() const noexcept { return message_; }

private:
    int status_;
    std::string message_;
};

class PredictorUnavailable : public Error {
public:
    using Error::Error;
};

}  // namespace groupcast
