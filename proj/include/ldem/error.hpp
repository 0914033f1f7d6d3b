#pragma once

#include <stdexcept>
#include <string>

namespace ldem {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidResolution : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

// Raised when a training loss or a primal value becomes non-finite.
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, long epoch)
        : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
    long epoch() const noexcept { return epoch_; }

private:
    long epoch_;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

// Configuration rejected by schema validation; `pointer` is a JSON pointer.
class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& message)
        : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace ldem
