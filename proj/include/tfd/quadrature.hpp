#pragma once

#include <cstddef>

#include "tfd/core.hpp"

namespace tfd {

struct QuadResult {
    double value = 0.0;
    double abs_err = 0.0;
    std::size_t intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration on [a, b].
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below abs_tol. Throws NumericalError when max_subdiv is hit
/// or the integrand returns a non-finite value.
QuadResult integrate_adaptive(const RealFn& f, double a, double b, double abs_tol,
                              std::size_t max_subdiv);

}  // namespace tfd
