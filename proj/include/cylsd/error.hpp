#pragma once

#include <stdexcept>
#include <string>

namespace cylsd {

/// Malformed input or a violated precondition (CLI exit code 2).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A checker or constructor found that an advertised property does not hold
/// (CLI exit code 1).
class VerificationFailure : public std::runtime_error {
public:
    explicit VerificationFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cylsd
