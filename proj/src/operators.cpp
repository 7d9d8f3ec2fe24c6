#include "tfd/operators.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tfd/quadrature.hpp"
#include "tfd/spectral.hpp"

namespace tfd {
namespace {

// int_0^eps w^{b-1} e^{-eta w} dw
double lower_moment(double b, double eta, double eps) {
    if (eta == 0.0) {
        return std::pow(eps, b) / b;
    }
    return boost::math::tgamma_lower(b, eta * eps) * std::pow(eta, -b);
}

// int_W^inf (jw * a * w^{-a-1} + dw * w^{-a}) e^{-eta w} dw, without the 1/Gamma(1-a)
double kernel_tail_mass(double alpha, double eta, double jw, double dw, double W) {
    if (eta == 0.0) {
        if (dw != 0.0) {
            throw ValidationError("drift-weighted kernel needs eta > 0");
        }
        return jw * std::pow(W, -alpha);
    }
    const double upper = boost::math::tgamma(1.0 - alpha, eta * W);  // Gamma(1-a, eta W)
    const double jump = std::pow(W, -alpha) * std::exp(-eta * W) - std::pow(eta, alpha) * upper;
    return jw * jump + dw * std::pow(eta, alpha - 1.0) * upper;
}

}  // namespace

namespace detail {

double central_first(const RealFn& f, double x, double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

double central_second(const RealFn& f, double x, double step) {
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
}

double tempered_increment_integral(const RealFn& shifted, double base, double d1, double d2,
                                   const TemperParams& p, double jump_weight,
                                   double drift_weight, const QuadConfig& q) {
    q.validate();
    const double a = p.alpha();
    const double eta = p.eta();
    const double inv_gamma = 1.0 / std::tgamma(1.0 - a);
    if (jump_weight == 0.0 && eta == 0.0) {
        throw ValidationError("drift-weighted kernel needs eta > 0");
    }

    // [0, eps]: Taylor polynomial against the kernel, exact moments
    double taylor = 0.0;
    if (jump_weight != 0.0) {
        taylor += jump_weight * a *
                  (d1 * lower_moment(1.0 - a, eta, q.eps) + d2 * lower_moment(2.0 - a, eta, q.eps));
    }
    if (drift_weight != 0.0) {
        taylor += drift_weight *
                  (d1 * lower_moment(2.0 - a, eta, q.eps) + d2 * lower_moment(3.0 - a, eta, q.eps));
    }
    taylor *= inv_gamma;

    auto kernel = [&](double w) {
        return (jump_weight * a / w + drift_weight) * std::pow(w, -a) * std::exp(-eta * w) *
               inv_gamma;
    };
    auto direct = [&](double w) { return (base - shifted(w)) * kernel(w); };

    const double tol = 0.5 * q.abs_tol;
    if (std::isfinite(q.wmax)) {
        const double body = integrate_adaptive(direct, q.eps, q.wmax, tol, q.max_subdiv).value;
        // the constant part of the increment is integrated to infinity exactly;
        // the shifted part beyond wmax is dropped
        const double tail =
            base * kernel_tail_mass(a, eta, jump_weight, drift_weight, q.wmax) * inv_gamma;
        return taylor + body + tail;
    }

    const double split = std::max(1.0, 10.0 * q.eps);
    const double body = integrate_adaptive(direct, q.eps, split, tol, q.max_subdiv).value;

    double tail = 0.0;
    if (jump_weight != 0.0) {
        // v = (w/split)^{-a} sends a w^{-a-1} dw on [split, inf) to split^{-a} dv on (0, 1]
        auto mapped = [&](double v) {
            if (v <= 0.0) {
                return 0.0;
            }
            const double w = split * std::pow(v, -1.0 / a);
            if (!std::isfinite(w)) {
                return 0.0;
            }
            const double decay = std::exp(-eta * w);
            if (decay == 0.0) {
                return 0.0;
            }
            return (base - shifted(w)) * (jump_weight + drift_weight * w / a) * decay;
        };
        tail = std::pow(split, -a) * inv_gamma *
               integrate_adaptive(mapped, 0.0, 1.0, tol, q.max_subdiv).value;
    } else {
        // u = e^{-eta (w - split)} for the pure w^{-a} e^{-eta w} kernel
        auto mapped = [&](double u) {
            if (u <= 0.0) {
                return 0.0;
            }
            const double w = split - std::log(u) / eta;
            return (base - shifted(w)) * std::pow(w, -a);
        };
        tail = drift_weight * std::exp(-eta * split) / eta * inv_gamma *
               integrate_adaptive(mapped, 0.0, 1.0, tol, q.max_subdiv).value;
    }
    return taylor + body + tail;
}

}  // namespace detail

namespace {

constexpr double kSecondStep = 1e-4;

double checked_value(const RealFn& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw NumericalError("function value is not finite at x = " + std::to_string(x));
    }
    return v;
}

}  // namespace

double marchaud_tempered(const RealFn& f, double x, const TemperParams& p, const QuadConfig& q) {
    q.validate();
    const double fx = checked_value(f, x);
    const double d1 = detail::central_first(f, x, q.eps / 10.0);
    const double d2 = -0.5 * detail::central_second(f, x, kSecondStep);
    return detail::tempered_increment_integral([&](double w) { return f(x - w); }, fx, d1, d2, p,
                                               1.0, 0.0, q);
}

double weyl_plus_tempered(const RealFn& f, double x, const TemperParams& p, const QuadConfig& q) {
    q.validate();
    const double fx = checked_value(f, x);
    const double d1 = detail::central_first(f, x, q.eps / 10.0);
    const double d2 = -0.5 * detail::central_second(f, x, kSecondStep);
    return detail::tempered_increment_integral([&](double w) { return f(x - w); }, fx, d1, d2, p,
                                               1.0, p.eta(), q);
}

double weyl_minus_tempered(const RealFn& f, double x, const TemperParams& p, const QuadConfig& q) {
    q.validate();
    const double fx = checked_value(f, x);
    const double d1 = -detail::central_first(f, x, q.eps / 10.0);
    const double d2 = -0.5 * detail::central_second(f, x, kSecondStep);
    return detail::tempered_increment_integral([&](double w) { return f(x + w); }, fx, d1, d2, p,
                                               1.0, p.eta(), q);
}

double riesz_tempered_pointwise(const RealFn& f, double x, const TemperParams& p,
                                const QuadConfig& q) {
    q.validate();
    const double fx = checked_value(f, x);
    const double d2 = -detail::central_second(f, x, kSecondStep);
    const double sym = detail::tempered_increment_integral(
        [&](double w) { return f(x - w) + f(x + w); }, 2.0 * fx, 0.0, d2, p, 1.0, p.eta(), q);
    return riesz_constant(p) * sym;
}

TimeSeries::TimeSeries(Grid1D grid, std::vector<double> values)
    : field_(grid, std::move(values)) {
    if (grid.lo() != 0.0) {
        throw ValidationError("time series grid must start at t = 0");
    }
}

TimeSeries::TimeSeries(const SampledField& field) : TimeSeries(field.grid(), {field.values().begin(), field.values().end()}) {}

SampledField caputo_half(const TimeSeries& ts) {
    const std::size_t n = ts.size();
    if (n < 3) {
        throw ValidationError("time-fractional derivative needs at least 3 nodes");
    }
    const auto f = ts.values();
    const double h = ts.grid().spacing();
    // L1 weights b_j = (j+1)^{1/2} - j^{1/2}, scaled by 1 / (Gamma(3/2) h^{1/2})
    std::vector<double> b(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        b[j] = std::sqrt(static_cast<double>(j + 1)) - std::sqrt(static_cast<double>(j));
    }
    std::vector<double> df(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        df[k] = f[k + 1] - f[k];
    }
    const double scale = 2.0 / (std::sqrt(std::numbers::pi) * std::sqrt(h));
    std::vector<double> out(n - 1);
    for (std::size_t m = 1; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += b[j] * df[m - 1 - j];
        }
        out[m - 1] = scale * acc;
    }
    return SampledField(Grid1D(ts.grid().point(1), ts.grid().hi(), n - 1), std::move(out));
}

SampledField rl_half(const TimeSeries& ts) {
    const SampledField caputo = caputo_half(ts);
    const double f0 = ts.f0();
    std::vector<double> out(caputo.values().begin(), caputo.values().end());
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += f0 * inv_sqrt_pi / std::sqrt(ts.grid().point(i + 1));
    }
    return SampledField(caputo.grid(), std::move(out));
}

SampledField tempered_rl_half(const TimeSeries& ts, double eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw ValidationError("eta must be finite and >= 0");
    }
    if (eta * ts.grid().hi() > 700.0) {
        throw ValidationError("e^{eta t} overflows on this grid: eta * t_max = " +
                              std::to_string(eta * ts.grid().hi()) + " > 700");
    }
    const auto f = ts.values();
    std::vector<double> tilted(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        tilted[i] = std::exp(eta * ts.grid().point(i)) * f[i];
    }
    const SampledField d = rl_half(TimeSeries(ts.grid(), std::move(tilted)));
    const double root = std::sqrt(eta);
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = ts.grid().point(i + 1);
        out[i] = std::exp(-eta * t) * d[i] - root * f[i + 1];
    }
    return SampledField(d.grid(), std::move(out));
}

}  // namespace tfd
