#pragma once

#include <stdexcept>
#include <string>

namespace drda {

// Bad caller input: shape mismatch, invalid parameter, infeasible constraint set.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure inside a solver (singular system, no finite step).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace drda
