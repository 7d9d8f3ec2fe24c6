#pragma once

#include <complex>
#include <vector>

#include "tfd/core.hpp"

namespace tfd {

/// (eta + lambda)^alpha - eta^alpha, the Laplace exponent of the tempered
/// stable subordinator and the symbol of marchaud_tempered.
double laplace_symbol(double lambda, const TemperParams& p);

/// Normalisation of the tempered Riesz derivative, -1 / (2 cos(pi alpha / 2)).
/// The same constant is used for every eta. Rejects alpha > 0.999.
double riesz_constant(const TemperParams& p);

/// Fourier multiplier of the tempered Riesz derivative,
/// C 2|g| (eta^2 + g^2)^{-(1-alpha)/2} sin((1-alpha) atan(|g|/eta)).
/// For eta = 0 this is -|g|^alpha.
double riesz_multiplier(double gamma, const TemperParams& p);

/// The same multiplier written as
/// C 2|g| (eta^2 + g^2)^{-(1-alpha/2)} [|g| cos(alpha th) - eta sin(alpha th)], th = atan(|g|/eta).
double riesz_multiplier_expanded(double gamma, const TemperParams& p);

/// Periodised samples together with their discrete Fourier coefficients.
///
/// The n samples are treated as one period of length P = n h. The frequency
/// lattice is g_k = 2 pi k / P for k = -n/2 .. n/2-1 (stored in FFT order) and
/// the coefficients approximate int e^{+i g x} f(x) dx.
class SpectralField {
public:
    explicit SpectralField(const SampledField& field);

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> freqs() const noexcept { return freqs_; }
    std::span<const std::complex<double>> coeffs() const noexcept { return coeffs_; }

    double period() const noexcept { return grid_.spacing() * static_cast<double>(grid_.size()); }

    /// Inverse transform of arbitrary coefficients on this field's lattice.
    /// Returns complex samples; callers decide what to do with the imaginary part.
    std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> c) const;

private:
    Grid1D grid_;
    std::vector<double> values_;
    std::vector<double> freqs_;
    std::vector<std::complex<double>> coeffs_;
};

/// Angular frequencies of the discrete lattice for a grid, FFT order.
std::vector<double> frequency_lattice(const Grid1D& grid);

/// Applies the tempered Riesz derivative by multiplying the coefficients by
/// riesz_multiplier. The input must be negligible (< 1e-10) at both grid ends.
SpectralField riesz_apply(const SpectralField& field, const TemperParams& p);

/// Density at time t of the diffusion du/dt = (tempered Riesz derivative) u
/// started from a point mass at 0, obtained by inverting exp(t psi(g_k)).
SampledField solve_riesz_diffusion(double t, const Grid1D& grid, const TemperParams& p);

/// Symmetric grid for solve_riesz_diffusion: half-width 10 (1 + t^{1/alpha}),
/// n the smallest power of two >= 2^10 for which exp(t psi) at the Nyquist
/// frequency is below 1e-12 (capped at 2^22). Node n/2 sits at x = 0.
Grid1D diffusion_grid(double t, const TemperParams& p);

}  // namespace tfd
