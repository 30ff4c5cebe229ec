#pragma once

#include <stdexcept>
#include <string>

namespace poolcomp {

/// Bad user input: malformed files, out-of-domain arguments, invalid configs.
/// The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that should not fail did (non-finite density, empty grid mass).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace poolcomp
