#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfd {

/// Input violates a documented precondition (bad parameter, bad grid, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not deliver the requested accuracy
/// (quadrature non-convergence, overflow, failed mass check).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using RealFn = std::function<double(double)>;

/// Order and tempering rate of a tempered fractional operator.
/// 0 < alpha < 1, eta >= 0.
class TemperParams {
public:
    TemperParams(double alpha, double eta);

    double alpha() const noexcept { return alpha_; }
    double eta() const noexcept { return eta_; }

private:
    double alpha_;
    double eta_;
};

/// Drift, start point and the tempering rate eta = mu^2/4 tied to the drift.
/// eta is always derived from mu, never stored separately.
class DriftSpec {
public:
    explicit DriftSpec(double mu, double x0 = 0.0);

    double mu() const noexcept { return mu_; }
    double x0() const noexcept { return x0_; }
    double eta() const noexcept { return 0.25 * mu_ * mu_; }

private:
    double mu_;
    double x0_;
};

/// Uniform grid lo, lo+h, ..., hi with n >= 2 points.
class Grid1D {
public:
    Grid1D(double lo, double hi, std::size_t n);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }

    // the last node is returned as hi exactly
    double point(std::size_t i) const noexcept {
        return i + 1 == n_ ? hi_ : lo_ + static_cast<double>(i) * h_;
    }
    std::vector<double> points() const;

private:
    double lo_;
    double hi_;
    std::size_t n_;
    double h_;
};

Grid1D make_grid(double lo, double hi, std::size_t n);

/// Real samples on a Grid1D; every value is finite.
class SampledField {
public:
    SampledField(Grid1D grid, std::vector<double> values);

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    Grid1D grid_;
    std::vector<double> values_;
};

SampledField sample_on_grid(const RealFn& f, const Grid1D& grid);

/// Accuracy controls for the improper integrals of the Marchaud-type operators.
///
/// eps        inner cutoff; on [0, eps] the increment is replaced by its Taylor polynomial
/// wmax       outer cutoff; +inf (default) maps [1, inf) onto a finite interval and
///            integrates it exactly, a finite value truncates the f-dependent tail there
/// abs_tol    target absolute error of the adaptive part
/// max_subdiv cap on adaptive interval bisections
struct QuadConfig {
    double eps = 1e-6;
    double wmax = std::numeric_limits<double>::infinity();
    double abs_tol = 1e-8;
    std::size_t max_subdiv = 2000;

    void validate() const;
};

}  // namespace tfd
