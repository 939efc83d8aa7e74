#pragma once

#include <stdexcept>
#include <string>

namespace flametomo {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or range.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The file system refused a read or write.
class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// A binary or text artifact could not be decoded.
class FormatError : public Error {
public:
    using Error::Error;
};

class MalformedFileError : public FormatError {
public:
    using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
public:
    using FormatError::FormatError;
};

class ChecksumError : public FormatError {
public:
    using FormatError::FormatError;
};

// Configuration file problems. Carries the offending line or key when known.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// A gray value lies outside the declared range of a calibration curve.
class OutOfCalibrationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace flametomo
