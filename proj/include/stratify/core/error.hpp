#pragma once

#include <stdexcept>
#include <string>

namespace stratify {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: missing file, malformed CSV, invalid config, wrong shapes.
class InputError : public Error {
public:
    using Error::Error;
};

// A statistic or fit cannot be computed for the data at hand (single class,
// empty cluster, retry bound exceeded).
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace stratify
