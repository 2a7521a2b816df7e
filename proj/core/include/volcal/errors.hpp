#pragma once

#include <stdexcept>
#include <string>

namespace volcal {

// Numerical failure: non-finite intermediate, factorization breakdown,
// divergent iteration. These indicate the computation cannot proceed, not
// that the inputs were malformed.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid input: malformed files, schema violations, inconsistent market
// data, out-of-range configuration.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace volcal
