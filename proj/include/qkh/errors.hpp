// errors.hpp — Error taxonomy shared by the library and the CLI exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace qkh {

// Bad configuration, bad shapes, violated preconditions. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Step-size / convergence failures of a propagator or quadrature. CLI exit code 3.
class stability_error : public std::runtime_error {
public:
    explicit stability_error(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature failed to reach the requested tolerance. CLI exit code 3.
class accuracy_error : public std::runtime_error {
public:
    explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

// Fock-truncation leakage beyond the error threshold. CLI exit code 4.
class truncation_error : public std::runtime_error {
public:
    explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qkh
