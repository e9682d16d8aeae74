#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input data (bad file header, bad parameter).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// File system failure while reading or writing.
class IoError : public Error {
public:
    using Error::Error;
};

/// Ghost-artifact removal left no foreground pixels.
class NoForeground : public Error {
public:
    NoForeground() : Error("no foreground detected") {}
};

/// The image cannot drive the automatic edge threshold (zero variance).
class DegenerateImage : public Error {
public:
    explicit DegenerateImage(const std::string& what) : Error(what) {}
};

}  // namespace spectral
