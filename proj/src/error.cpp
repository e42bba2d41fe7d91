#include "obslab/error.hpp"

namespace obslab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::horizon_too_small: return "horizon-too-small";
        case ErrorKind::inconclusive: return "inconclusive";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::truncation_too_small: return "truncation-too-small";
        case ErrorKind::quadrature_failure: return "quadrature-failure";
        case ErrorKind::ill_conditioned_fit: return "ill-conditioned-fit";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::grid_set_mismatch: return "grid-set-mismatch";
        case ErrorKind::eigen_iteration_failure: return "eigen-iteration-failure";
        case ErrorKind::insufficient_modes: return "insufficient-modes";
        case ErrorKind::resonant_time: return "resonant-time";
    }
    return "unknown";
}

bool is_numeric_failure(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::no_convergence:
        case ErrorKind::truncation_too_small:
        case ErrorKind::quadrature_failure:
        case ErrorKind::ill_conditioned_fit:
        case ErrorKind::eigen_iteration_failure:
        case ErrorKind::inconclusive:
            return true;
        default:
            return false;
    }
}

}  // namespace obslab
