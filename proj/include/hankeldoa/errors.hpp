// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace hankeldoa {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched vector/matrix dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Invalid arguments, scenes, configs, or infeasible sampling plans.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Inputs on which the requested quantity is undefined (all-zero data,
// empty mask complements, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// File read/write failures; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hankeldoa
