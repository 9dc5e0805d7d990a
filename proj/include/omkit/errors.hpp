#pragma once

#include <stdexcept>
#include <string>

namespace omkit {

// Invalid input or violated invariant. CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A solver or optimizer failed to reach its tolerance. CLI exit code 2.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File missing, unreadable or malformed. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& what)
{
    if (!condition) {
        throw ValidationError(what);
    }
}

} // namespace omkit
