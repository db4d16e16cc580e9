#pragma once

#include <stdexcept>
#include <string>

namespace msbm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, dimensions, labels).
class InputError : public Error
{
public:
    using Error::Error;
};

/// Arguments whose shapes do not agree with each other.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// Brute-force computation refused because the assignment space is too large.
class TooLargeError : public Error
{
public:
    using Error::Error;
};

/// Operation is defined only for a restricted class of inputs (e.g. K = 2).
class UnsupportedError : public Error
{
public:
    using Error::Error;
};

/// Conditioning on an event of probability zero.
class ZeroProbabilityError : public Error
{
public:
    using Error::Error;
};

} // namespace msbm
