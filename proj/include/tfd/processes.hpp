#pragma once

#include "tfd/core.hpp"

namespace tfd {

/// Source x, target y, time t > 0.
struct EvalPoint {
    double x;
    double y;
    double t;
};

// All densities use the generator d^2/dy^2, i.e. B(t) has variance 2t.

/// g(x, y, t) = exp(-(y-x)^2 / 4t) / sqrt(4 pi t).
double heat_kernel(const EvalPoint& pt);

/// Transition density of B(t) + mu t + x, written as
/// g exp(-mu^2 t / 4 + (mu/2)(y - x)).
double drifted_density(const EvalPoint& pt, const DriftSpec& d);

/// Same density in completed-square form exp(-(y-x-mu t)^2 / 4t) / sqrt(4 pi t).
double drifted_density_gaussian(const EvalPoint& pt, const DriftSpec& d);

/// Transition density of |B(t) + mu t| + x on y >= x >= 0:
/// g exp(-mu^2 t / 4) [exp(-(mu/2)(y-x)) + exp((mu/2)(y-x))].
double folded_drifted_density(const EvalPoint& pt, const DriftSpec& d);

/// Closed-form distribution function of |B(t) + mu t| + x.
double folded_drifted_cdf(const EvalPoint& pt, const DriftSpec& d);

/// a(x, y) = +1 for x <= y, -1 for x > y.
double sign_weight(double x, double y) noexcept;

/// Laplace transform in t of the heat kernel, exp(-|y-x| sqrt(lambda)) / (2 sqrt(lambda)).
double g_laplace(double x, double y, double lambda);

/// exp(z^2) erfc(z), continued fraction for z > 5.
double erfcx(double z);

/// E_{1/2}(-z) = exp(z^2) erfc(z) for z >= 0.
double mittag_leffler_half(double z);

}  // namespace tfd
