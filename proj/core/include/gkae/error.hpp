#pragma once

#include <stdexcept>
#include <string>

namespace gkae {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Layer/tensor shape errors carry the same meaning as DimensionMismatch.
using ShapeMismatch = DimensionMismatch;

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class KTooLarge : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class NotScalarLoss : public Error {
public:
    using Error::Error;
};

// Raised when an operation produces a non-finite value; message names the op.
class NumericError : public Error {
public:
    using Error::Error;
};

class RateOutOfRange : public Error {
public:
    using Error::Error;
};

class LTooLarge : public Error {
public:
    using Error::Error;
};

class MissingTargets : public Error {
public:
    using Error::Error;
};

class Unfillable : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class EmptyScope : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gkae
