#include "tfd/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace tfd {
namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// out[j] = sum_m in[m] e^{sign 2 pi i m j / n}
std::vector<cplx> dft(std::span<const cplx> in, int sign) {
    const int n = static_cast<int>(in.size());
    std::vector<cplx> buf(in.begin(), in.end());
    std::vector<cplx> out(in.size());
    auto* ibuf = reinterpret_cast<fftw_complex*>(buf.data());
    auto* obuf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, ibuf, obuf, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

double laplace_symbol(double lambda, const TemperParams& p) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("lambda must be finite and >= 0");
    }
    const double a = p.alpha();
    const double eta = p.eta();
    if (eta == 0.0) {
        return std::pow(lambda, a);
    }
    // eta^a ((1 + lambda/eta)^a - 1) without cancellation for small lambda/eta
    return std::pow(eta, a) * std::expm1(a * std::log1p(lambda / eta));
}

double riesz_constant(const TemperParams& p) {
    if (p.alpha() > 0.999) {
        throw ValidationError("Riesz constant diverges as alpha -> 1; alpha must be <= 0.999");
    }
    return -1.0 / (2.0 * std::cos(0.5 * std::numbers::pi * p.alpha()));
}

double riesz_multiplier(double gamma, const TemperParams& p) {
    const double g = std::abs(gamma);
    if (g == 0.0) {
        return 0.0;
    }
    const double a = p.alpha();
    const double eta = p.eta();
    if (eta == 0.0) {
        return -std::pow(g, a);
    }
    const double theta = std::atan2(g, eta);
    return riesz_constant(p) * 2.0 * g * std::pow(eta * eta + g * g, -0.5 * (1.0 - a)) *
           std::sin((1.0 - a) * theta);
}

double riesz_multiplier_expanded(double gamma, const TemperParams& p) {
    const double g = std::abs(gamma);
    if (g == 0.0) {
        return 0.0;
    }
    const double a = p.alpha();
    const double eta = p.eta();
    const double theta = std::atan2(g, eta);
    const double bracket = g * std::cos(a * theta) - eta * std::sin(a * theta);
    return riesz_constant(p) * 2.0 * g * std::pow(eta * eta + g * g, -(1.0 - 0.5 * a)) * bracket;
}

std::vector<double> frequency_lattice(const Grid1D& grid) {
    const std::size_t n = grid.size();
    const double period = grid.spacing() * static_cast<double>(n);
    std::vector<double> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double k = m < (n + 1) / 2 ? static_cast<double>(m)
                                         : static_cast<double>(m) - static_cast<double>(n);
        out[m] = 2.0 * std::numbers::pi * k / period;
    }
    return out;
}

SpectralField::SpectralField(const SampledField& field)
    : grid_(field.grid()),
      values_(field.values().begin(), field.values().end()),
      freqs_(frequency_lattice(field.grid())) {
    std::vector<cplx> in(values_.begin(), values_.end());
    coeffs_ = dft(in, +1);
    const double h = grid_.spacing();
    for (std::size_t m = 0; m < coeffs_.size(); ++m) {
        coeffs_[m] *= h * std::polar(1.0, freqs_[m] * grid_.lo());
    }
}

std::vector<cplx> SpectralField::inverse(std::span<const cplx> c) const {
    if (c.size() != grid_.size()) {
        throw ValidationError("coefficient count does not match grid");
    }
    std::vector<cplx> shifted(c.size());
    for (std::size_t m = 0; m < c.size(); ++m) {
        shifted[m] = c[m] * std::polar(1.0, -freqs_[m] * grid_.lo());
    }
    std::vector<cplx> out = dft(shifted, -1);
    const double inv_period = 1.0 / period();
    for (auto& v : out) {
        v *= inv_period;
    }
    return out;
}

SpectralField riesz_apply(const SpectralField& field, const TemperParams& p) {
    const auto v = field.values();
    const double edge = std::max(std::abs(v.front()), std::abs(v.back()));
    if (edge >= 1e-10) {
        throw ValidationError("field is not negligible at the domain ends (|f| = " +
                              std::to_string(edge) + "); periodisation would alias");
    }
    const auto freqs = field.freqs();
    const auto coeffs = field.coeffs();
    std::vector<cplx> scaled(coeffs.size());
    for (std::size_t m = 0; m < scaled.size(); ++m) {
        scaled[m] = coeffs[m] * riesz_multiplier(freqs[m], p);
    }
    const std::vector<cplx> back = field.inverse(scaled);
    std::vector<double> re(back.size());
    double max_re = 0.0;
    double max_im = 0.0;
    for (std::size_t j = 0; j < back.size(); ++j) {
        re[j] = back[j].real();
        max_re = std::max(max_re, std::abs(back[j].real()));
        max_im = std::max(max_im, std::abs(back[j].imag()));
    }
    if (max_im > 1e-9 * std::max(max_re, 1e-300) && max_im > 1e-300) {
        throw NumericalError("imaginary residue " + std::to_string(max_im) +
                             " after applying a real even multiplier");
    }
    return SpectralField(SampledField(field.grid(), std::move(re)));
}

SampledField solve_riesz_diffusion(double t, const Grid1D& grid, const TemperParams& p) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ValidationError("diffusion time must be finite and > 0");
    }
    const std::vector<double> freqs = frequency_lattice(grid);
    std::vector<cplx> c(freqs.size());
    for (std::size_t m = 0; m < c.size(); ++m) {
        c[m] = std::exp(t * riesz_multiplier(freqs[m], p));
    }
    // zero field is only used for its lattice and inverse transform
    const SpectralField lattice(SampledField(grid, std::vector<double>(grid.size(), 0.0)));
    const std::vector<cplx> back = lattice.inverse(c);
    std::vector<double> u(back.size());
    double mass = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = back[j].real();
        mass += u[j];
    }
    mass *= grid.spacing();
    if (!(std::abs(mass - 1.0) <= 1e-4)) {
        throw NumericalError("diffusion density mass " + std::to_string(mass) +
                             " deviates from 1; enlarge or refine the grid");
    }
    return SampledField(grid, std::move(u));
}

Grid1D diffusion_grid(double t, const TemperParams& p) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ValidationError("diffusion time must be finite and > 0");
    }
    const double half = 10.0 * (1.0 + std::pow(t, 1.0 / p.alpha()));
    std::size_t n = std::size_t{1} << 10;
    constexpr std::size_t cap = std::size_t{1} << 22;
    while (n < cap) {
        const double nyquist = std::numbers::pi * static_cast<double>(n) / (2.0 * half);
        if (t * riesz_multiplier(nyquist, p) < std::log(1e-12)) {
            break;
        }
        n *= 2;
    }
    const double h = 2.0 * half / static_cast<double>(n);
    return Grid1D(-half, half - h, n);
}

}  // namespace tfd
