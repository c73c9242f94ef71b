#pragma once

#include <stdexcept>
#include <string>

namespace rqc {

/// Raised when an input violates an operation's precondition (CLI exit code 2).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical procedure fails to converge or produces an invalid
/// result (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw PreconditionError(message);
    }
}

} // namespace rqc
