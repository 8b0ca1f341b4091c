#pragma once

#include <stdexcept>
#include <string>

namespace topoquench {

// Invalid parameters or mismatched structures (CLI exit code 1).
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Quadrature residues out of tolerance, step-size underflow, solver
// non-convergence and the like (CLI exit code 2).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Failed or partial file writes (CLI exit code 2).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace topoquench
