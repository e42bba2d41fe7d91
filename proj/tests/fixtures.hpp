#pragma once

#include "obslab/spectra.hpp"

#include <stdexcept>

namespace fixture {

// Solved once per test binary; the K=40 tables take several seconds each.
inline const obslab::SpectrumTable& table(int m, int K = 40, double accuracy = 1e-6) {
    if (m == 1 && K == 40 && accuracy == 1e-6) {
        static const auto t = obslab::solve_spectrum(obslab::Potential::monomial(1), 40, 1e-6);
        return t;
    }
    if (m == 2 && K == 40 && accuracy == 1e-6) {
        static const auto t = obslab::solve_spectrum(obslab::Potential::monomial(2), 40, 1e-6);
        return t;
    }
    if (m == 1 && K == 40 && accuracy == 1e-4) {
        static const auto t = obslab::solve_spectrum(obslab::Potential::monomial(1), 40, 1e-4);
        return t;
    }
    if (m == 2 && K == 40 && accuracy == 1e-4) {
        static const auto t = obslab::solve_spectrum(obslab::Potential::monomial(2), 40, 1e-4);
        return t;
    }
    throw std::logic_error("no fixture for this table");
}

}  // namespace fixture
