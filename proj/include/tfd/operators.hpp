#pragma once

#include <vector>

#include "tfd/core.hpp"

namespace tfd {

/// Samples f(t_i) on a grid that starts at t = 0.
class TimeSeries {
public:
    TimeSeries(Grid1D grid, std::vector<double> values);
    explicit TimeSeries(const SampledField& field);

    const Grid1D& grid() const noexcept { return field_.grid(); }
    std::span<const double> values() const noexcept { return field_.values(); }
    double f0() const noexcept { return field_[0]; }
    std::size_t size() const noexcept { return field_.size(); }

private:
    SampledField field_;
};

// Tempered Marchaud derivative
//   (D^{a,eta} f)(x) = int_0^inf (f(x) - f(x-w)) Pi(dw),
//   Pi(dw) = a e^{-eta w} w^{-a-1} dw / Gamma(1-a).
// e^{s x} is an eigenfunction with eigenvalue (eta+s)^a - eta^a.
double marchaud_tempered(const RealFn& f, double x, const TemperParams& p,
                         const QuadConfig& q = {});

/// Tempered upper Weyl derivative in Marchaud form (backward increments):
/// int (f(x)-f(x-w)) Pi(dw) + eta int (f(x)-f(x-w)) e^{-eta w} w^{-a} dw / Gamma(1-a).
/// Evaluated as a single quadrature against the combined kernel.
double weyl_plus_tempered(const RealFn& f, double x, const TemperParams& p,
                          const QuadConfig& q = {});

/// Tempered lower Weyl derivative, -(1/Gamma(1-a)) d/dx int_x^inf f(t)(t-x)^{-a} e^{-eta(t-x)} dt,
/// in Marchaud form with forward increments f(x) - f(x+w).
/// Satisfies weyl_minus(f)(x) = weyl_plus(f(-.))(-x).
double weyl_minus_tempered(const RealFn& f, double x, const TemperParams& p,
                           const QuadConfig& q = {});

/// Tempered Riesz derivative: riesz_constant(p) times the symmetric
/// second-difference integral (sum of the upper and lower Weyl forms).
/// cos(g x) is an eigenfunction with eigenvalue riesz_multiplier(g, p).
double riesz_tempered_pointwise(const RealFn& f, double x, const TemperParams& p,
                                const QuadConfig& q = {});

/// Order-1/2 Caputo derivative by the L1 product-integration scheme.
/// Output lives on the nodes t_1, ..., t_{n-1}; t_0 = 0 is not emitted.
SampledField caputo_half(const TimeSeries& ts);

/// Order-1/2 Riemann-Liouville derivative: caputo_half plus f(0) t^{-1/2} / sqrt(pi).
SampledField rl_half(const TimeSeries& ts);

/// Tempered Riemann-Liouville type derivative of order 1/2:
/// e^{-eta t} D^{1/2}(e^{eta t} f) - sqrt(eta) f. Rejects eta * t_max > 700.
SampledField tempered_rl_half(const TimeSeries& ts, double eta);

namespace detail {

/// int_0^inf incr(w) k(w) dw with incr(w) = base - shifted(w) and
/// k(w) = (jump_weight * a * w^{-a-1} + drift_weight * w^{-a}) e^{-eta w} / Gamma(1-a).
/// incr(w) ~ d1 w + d2 w^2 is used on [0, eps].
double tempered_increment_integral(const RealFn& shifted, double base, double d1, double d2,
                                   const TemperParams& p, double jump_weight,
                                   double drift_weight, const QuadConfig& q);

/// Central-difference first and second derivative used for the Taylor region.
double central_first(const RealFn& f, double x, double step);
double central_second(const RealFn& f, double x, double step);

}  // namespace detail

}  // namespace tfd
