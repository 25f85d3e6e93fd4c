#pragma once

#include <stdexcept>
#include <string>

namespace subcount {

// Bad input: malformed files, out-of-range arguments, violated preconditions.
// The CLI maps this to its own exit code, distinct from runtime failures.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subcount
