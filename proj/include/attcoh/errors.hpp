#pragma once

#include <stdexcept>
#include <string>

namespace attcoh {

// Bad inputs: parameter ranges, malformed files, schema violations.
// Mapped to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Failures of the numerics: non-identifiable fits, degenerate statistics.
// Mapped to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace attcoh
