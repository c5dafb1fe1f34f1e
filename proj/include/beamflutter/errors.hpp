#pragma once

#include <stdexcept>
#include <string>

namespace beamflutter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class BracketingFailure : public Error {
public:
    using Error::Error;
};

class NormalizationFailure : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EigenSolveFailure : public Error {
public:
    using Error::Error;
};

class NoInstabilityInRange : public Error {
public:
    using Error::Error;
};

class InvalidResolution : public Error {
public:
    using Error::Error;
};

class MissingBasis : public Error {
public:
    using Error::Error;
};

class NonpositiveEnergy : public Error {
public:
    using Error::Error;
};

class InsufficientPeaks : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Schema violation; `key_path()` names the offending key (e.g. "runs[1].initial_data.n").
class SchemaError : public Error {
public:
    SchemaError(std::string key_path, const std::string& what)
        : Error(key_path + ": " + what), key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

} // namespace beamflutter
