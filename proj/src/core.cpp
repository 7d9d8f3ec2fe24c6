#include "tfd/core.hpp"

#include <cmath>
#include <string>

namespace tfd {

TemperParams::TemperParams(double alpha, double eta) : alpha_(alpha), eta_(eta) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw ValidationError("eta must be finite and >= 0, got " + std::to_string(eta));
    }
}

DriftSpec::DriftSpec(double mu, double x0) : mu_(mu), x0_(x0) {
    if (!std::isfinite(mu) || !std::isfinite(x0)) {
        throw ValidationError("drift and start point must be finite");
    }
}

Grid1D::Grid1D(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi), n_(n), h_(0.0) {
    if (n < 2) {
        throw ValidationError("grid needs at least 2 points");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
        throw ValidationError("grid needs finite lo < hi");
    }
    h_ = (hi - lo) / static_cast<double>(n - 1);
}

std::vector<double> Grid1D::points() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        out[i] = point(i);
    }
    return out;
}

Grid1D make_grid(double lo, double hi, std::size_t n) { return Grid1D(lo, hi, n); }

SampledField::SampledField(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ValidationError("field length does not match grid size");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NumericalError("non-finite sample at node " + std::to_string(i));
        }
    }
}

SampledField sample_on_grid(const RealFn& f, const Grid1D& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = f(grid.point(i));
    }
    return SampledField(grid, std::move(v));
}

void QuadConfig::validate() const {
    if (!(eps > 0.0) || !(wmax > eps)) {
        throw ValidationError("quadrature config needs 0 < eps < wmax");
    }
    if (!(abs_tol > 0.0)) {
        throw ValidationError("quadrature config needs abs_tol > 0");
    }
    if (max_subdiv == 0) {
        throw ValidationError("quadrature config needs max_subdiv >= 1");
    }
}

}  // namespace tfd
