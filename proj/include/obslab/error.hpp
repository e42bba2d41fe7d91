#pragma once

#include <stdexcept>
#include <string>

namespace obslab {

enum class ErrorKind {
    precondition,
    horizon_too_small,
    inconclusive,
    no_convergence,
    truncation_too_small,
    quadrature_failure,
    ill_conditioned_fit,
    insufficient_data,
    grid_set_mismatch,
    eigen_iteration_failure,
    insufficient_modes,
    resonant_time,
};

const char* to_string(ErrorKind kind);

// Numeric failures map to exit code 3, contract violations to 2.
bool is_numeric_failure(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::precondition, what);
}

}  // namespace obslab
