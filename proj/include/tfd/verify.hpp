#pragma once

#include <functional>
#include <string>

#include "tfd/core.hpp"
#include "tfd/processes.hpp"

namespace tfd {

/// Sup-norm and RMS of a residual field, with the node where the sup is attained.
struct ResidualReport {
    std::string tag;
    std::string grid;
    double max_abs = 0.0;
    double l2 = 0.0;
    double x_at_max = 0.0;
    double y_at_max = 0.0;
    double t_at_max = 0.0;
    std::size_t nodes = 0;
    // closed-form boundary row check where the equation has one, else 0
    double boundary_max_abs = 0.0;
};

struct VerifyOptions {
    unsigned threads = 0;
    // |x - y| <= band is excluded for the two-sided equation
    double diagonal_band = 0.1;
};

// Time handling shared by all residual checks: the fractional derivative is a
// convolution from t = 0, so each time series is sampled on [0, t.hi] with the
// spacing of `tgrid`, and residuals are reported on the nodes inside
// [tgrid.lo, tgrid.hi]. Spatial derivatives use 4th-order central differences;
// the two outermost rows in each differentiated direction are not reported.

/// Residual of D_t^{1/2} g + dg/dy for the heat kernel g(x, y, t), y > x.
/// boundary_max_abs compares g(x, x, t) with 1/sqrt(4 pi t).
ResidualReport check_g_half_derivative(double x, const Grid1D& ygrid, const Grid1D& tgrid,
                                       const VerifyOptions& opt = {});

/// Residual of the drifted-density equation in both stated forms,
///   D_t^{1/2,eta} u + sqrt(eta) u - a(x,y) (du/dx + sqrt(eta) u)
///   D_t^{1/2,eta} u + sqrt(eta) u + a(x,y) (du/dy - sqrt(eta) u),
/// eta = mu^2/4. max_abs is the larger of the two forms.
struct Theorem1Report {
    ResidualReport combined;
    ResidualReport x_form;
    ResidualReport y_form;
    // larger over smaller sup-norm of the two forms
    double form_ratio_max = 0.0;
};
Theorem1Report residual_theorem1(const DriftSpec& d, const Grid1D& xgrid, const Grid1D& ygrid,
                                 const Grid1D& tgrid, const VerifyOptions& opt = {});

enum class TanhTerm { plus, minus, constant_one };

/// Residual of the folded-density equation on y > x,
///   D_t^{1/2,eta} v + dv/dy - sqrt(eta) tanh(sqrt(eta)(y-x)) v + (mu/2) v.
/// TanhTerm::minus flips the sign of the tanh term and constant_one replaces
/// tanh by 1. boundary_max_abs compares v(x, x, t) with e^{-eta t}/sqrt(pi t).
ResidualReport residual_theorem2(const DriftSpec& d, double x, const Grid1D& ygrid,
                                 const Grid1D& tgrid, TanhTerm term = TanhTerm::plus,
                                 const VerifyOptions& opt = {});

/// Pointwise sup of |R_plus - R_const| where R_const replaces tanh by 1.
/// The two equations coincide as y - x grows.
double theorem2_coefficient_gap(const DriftSpec& d, double x, const Grid1D& ygrid,
                                const Grid1D& tgrid, const VerifyOptions& opt = {});

/// |weyl_plus - (marchaud + eta * I)| with I = int (f(x)-f(x-w)) e^{-eta w} w^{-a} dw / Gamma(1-a),
/// the three terms coming from independent quadratures.
double check_weyl_decomposition(const RealFn& f, double x, const TemperParams& p,
                                const QuadConfig& q = {});

using DensityFn = std::function<double(const EvalPoint&, const DriftSpec&)>;

enum class Support { line, right_of_source };

/// Mass of density(x0, ., t) inside |y - x0| < 0.1 (or [x0, x0 + 0.1) for
/// right_of_source), x0 taken from the drift spec.
double check_initial_concentration(const DensityFn& density, const DriftSpec& d, double t,
                                   Support support = Support::line);

/// Same grid with the spacing halved (2n - 1 points).
Grid1D refine(const Grid1D& g);

// Reference grids and thresholds fixed by the convergence study in
// tests/convergence_study.cpp. Thresholds apply to max_abs on the reference grid.
namespace reference {
inline constexpr double g_threshold = 5e-3;
inline constexpr double theorem1_threshold = 1e-2;
inline constexpr double theorem2_threshold = 1e-2;
inline constexpr double min_refinement_gain = 1.5;
}  // namespace reference

}  // namespace tfd
