#pragma once

#include <stdexcept>
#include <string>

namespace dca {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input-data errors (bad files, inconsistent shapes, empty sets).
class ParseError : public Error {
public:
    using Error::Error;
};

class DimMismatch : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class TooFewPoints : public Error {
public:
    using Error::Error;
};

class MissingArtifact : public Error {
public:
    using Error::Error;
};

// Configuration errors (out-of-range parameters).
class InvalidCoverage : public Error {
public:
    using Error::Error;
};

class InvalidMcs : public Error {
public:
    using Error::Error;
};

// A query produced no edges at all; callers decide how to report it.
class EmptyNeighborhood : public Error {
public:
    using Error::Error;
};

// Degenerate geometry detected by the exact 2D triangulator.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

// Violated internal invariant; always a bug, never a user error.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace dca
