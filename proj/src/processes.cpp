#include "tfd/processes.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tfd {
namespace {

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ValidationError("density needs t > 0, got " + std::to_string(t));
    }
}

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double heat_kernel(const EvalPoint& pt) {
    require_time(pt.t);
    const double r = pt.y - pt.x;
    return std::exp(-r * r / (4.0 * pt.t)) / std::sqrt(4.0 * std::numbers::pi * pt.t);
}

double drifted_density(const EvalPoint& pt, const DriftSpec& d) {
    const double mu = d.mu();
    return heat_kernel(pt) * std::exp(-mu * mu * pt.t / 4.0 + 0.5 * mu * (pt.y - pt.x));
}

double drifted_density_gaussian(const EvalPoint& pt, const DriftSpec& d) {
    require_time(pt.t);
    const double r = pt.y - pt.x - d.mu() * pt.t;
    return std::exp(-r * r / (4.0 * pt.t)) / std::sqrt(4.0 * std::numbers::pi * pt.t);
}

double folded_drifted_density(const EvalPoint& pt, const DriftSpec& d) {
    require_time(pt.t);
    if (!(pt.x >= 0.0)) {
        throw ValidationError("folded process needs x >= 0");
    }
    if (pt.y < pt.x) {
        throw ValidationError("folded density is supported on y >= x");
    }
    const double mu = d.mu();
    const double half = 0.5 * mu * (pt.y - pt.x);
    return heat_kernel(pt) * std::exp(-mu * mu * pt.t / 4.0) *
           (std::exp(-half) + std::exp(half));
}

double folded_drifted_cdf(const EvalPoint& pt, const DriftSpec& d) {
    require_time(pt.t);
    if (!(pt.x >= 0.0)) {
        throw ValidationError("folded process needs x >= 0");
    }
    if (pt.y <= pt.x) {
        return 0.0;
    }
    // P(x - y - mu t < B(t) < y - x - mu t), B(t) ~ N(0, 2t)
    const double s = std::sqrt(2.0 * pt.t);
    const double drift = d.mu() * pt.t;
    const double r = pt.y - pt.x;
    return gaussian_cdf((r - drift) / s) - gaussian_cdf((-r - drift) / s);
}

double sign_weight(double x, double y) noexcept { return x <= y ? 1.0 : -1.0; }

double g_laplace(double x, double y, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("Laplace variable must be > 0");
    }
    const double r = std::sqrt(lambda);
    return std::exp(-std::abs(y - x) * r) / (2.0 * r);
}

double erfcx(double z) {
    if (z <= 5.0) {
        return std::exp(z * z) * std::erfc(z);
    }
    // erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + 2/(z + ...)))))
    double tail = z;
    for (int k = 60; k >= 1; --k) {
        tail = z + 0.5 * k / tail;
    }
    return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

double mittag_leffler_half(double z) {
    if (!(z >= 0.0)) {
        throw ValidationError("mittag_leffler_half evaluates E_{1/2}(-z) for z >= 0 only");
    }
    return erfcx(z);
}

}  // namespace tfd
