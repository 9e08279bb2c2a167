#ifndef FSMPC_ERRORS_HPP
#define FSMPC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fsmpc {

/// Raised when an arithmetic result leaves the representable range
/// (overflow to inf/NaN) or an operation is evaluated outside its domain.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fsmpc

#endif  // FSMPC_ERRORS_HPP
