#pragma once

#include <stdexcept>
#include <string>

namespace cnsdeblur {

//! Bad input data, bad configuration, unreadable files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Solver breakdown: non-finite iterates, ambiguous null space, etc.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cnsdeblur
