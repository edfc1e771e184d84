#pragma once

#include <stdexcept>
#include <string>

namespace gainprint {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed container or byte layout.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that uses a codec, rate or layout we do not handle.
/// `field()` names the offending header field.
class UnsupportedFormatError : public Error {
public:
    UnsupportedFormatError(std::string field, const std::string& what)
        : Error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Precondition violated on otherwise well-typed values (empty input,
/// wrong length, gap in a sequence, shape mismatch).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration (overlapping splits, bad hyperparameters).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace gainprint
