#pragma once

#include <stdexcept>
#include <string>

namespace riskscan {

// Bad user input: malformed files, unknown ids, invalid configuration.
// The CLI maps this to exit code 1; anything else escaping is an internal error.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace riskscan
