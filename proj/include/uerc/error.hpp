#pragma once

#include <stdexcept>
#include <string>

namespace uerc {

// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed manifest, descriptor or matrix input.
class FormatError : public Error {
public:
    using Error::Error;
};

// A score row with zero spread cannot be z-scored.
class DegenerateScoresError : public Error {
public:
    using Error::Error;
};

}  // namespace uerc
