#pragma once

#include <stdexcept>
#include <string>

namespace erspec {

// Bad caller-supplied parameter (CLI maps this to exit code 2).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a map.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A numerical routine failed to reach its contract (exit code 3).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input violated a structural precondition (non-symmetric matrix, bad fork).
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Profile support ran out before the requested radius.
struct DegenerateSupport : std::runtime_error {
    DegenerateSupport(int vertex, int radius);
    int vertex;
    int radius;
};

}  // namespace erspec
